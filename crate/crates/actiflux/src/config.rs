//! INI-style scenario configuration.
//!
//! Files consist of `[section]` headers and `key = value` lines; `#` and
//! `;` start comments. Sections are `[equation]`, `[grid]`, `[time]`,
//! `[initial]` and `[output]`. Unknown sections or keys are errors (with
//! the line number), as are missing required keys. Optional keys default
//! to: cfl 0.9, alpha 0.5, c 1.0, evolution rk2, well_balanced false,
//! boundary copy, freeze_band 0, n_steps unset, window = the domain.
//!
//! A hand-rolled parser is used instead of an INI crate so that errors can
//! point at the offending line and reject unknown keys, which generic
//! parsers do not track.

use std::collections::BTreeMap;
use std::path::Path;

use crate::equations::SourceKind;
use crate::error::{AfError, Result};
use crate::evolution::EvolutionMode;
use crate::grid::BoundaryRule;
use crate::harness::{EquationSpec, InitialSpec, Scenario};

/// A parsed scenario plus its output settings.
#[derive(Debug, Clone)]
pub struct Config {
    pub scenario: Scenario,
    /// output directory from `[output] dir`; the `ACTIFLUX_OUT_DIR`
    /// environment variable overrides it
    pub out_dir: String,
    /// file-name prefix for outputs
    pub prefix: String,
}

struct RawConfig {
    // (section, key) -> (value, line number)
    entries: BTreeMap<(String, String), (String, usize)>,
    path: String,
}

const SECTIONS: [&str; 5] = ["equation", "grid", "time", "initial", "output"];

const KNOWN_KEYS: [(&str, &[&str]); 5] = [
    (
        "equation",
        &["kind", "u", "u_x", "u_y", "source", "kappa", "b", "c", "g"],
    ),
    (
        "grid",
        &[
            "x_min",
            "x_max",
            "n_cells",
            "y_min",
            "y_max",
            "n_y",
            "boundary",
            "freeze_band",
        ],
    ),
    (
        "time",
        &["cfl", "t_end", "n_steps", "evolution", "alpha", "well_balanced"],
    ),
    (
        "initial",
        &[
            "kind",
            "center",
            "center_x",
            "center_y",
            "width",
            "amplitude",
            "a1",
            "a2",
            "a3",
            "K",
            "gamma",
            "rho0",
            "perturbation_amplitude",
            "perturbation_width",
            "rho",
            "p",
            "v_inner",
            "v_outer",
            "jump_lo",
            "jump_hi",
        ],
    ),
    (
        "output",
        &["dir", "prefix", "name", "window_lo", "window_hi"],
    ),
];

fn parse_raw(path: &Path, text: &str) -> Result<RawConfig> {
    let path_s = path.display().to_string();
    let err = |line: usize, msg: String| {
        Err(AfError::Config {
            path: path_s.clone(),
            line,
            msg,
        })
    };
    let mut entries = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return err(line_no, format!("unknown section [{name}]"));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(line_no, format!("expected `key = value`, got `{line}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = &section else {
            return err(line_no, format!("key `{key}` before any [section]"));
        };
        let known = KNOWN_KEYS
            .iter()
            .find(|(s, _)| s == sec)
            .map(|(_, keys)| keys.contains(&key))
            .unwrap_or(false);
        if !known {
            return err(line_no, format!("unknown key `{key}` in section [{sec}]"));
        }
        if entries
            .insert(
                (sec.clone(), key.to_string()),
                (value.to_string(), line_no),
            )
            .is_some()
        {
            return err(line_no, format!("duplicate key `{key}` in section [{sec}]"));
        }
    }
    Ok(RawConfig {
        entries,
        path: path_s,
    })
}

impl RawConfig {
    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|(v, _)| v.as_str())
    }

    fn field_err(&self, section: &str, key: &str, msg: String) -> AfError {
        let line = self
            .entries
            .get(&(section.to_string(), key.to_string()))
            .map(|(_, l)| *l)
            .unwrap_or(0);
        AfError::Config {
            path: self.path.clone(),
            line,
            msg: format!("[{section}] {key}: {msg}"),
        }
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| self.field_err(section, key, "missing required key".into()))
    }

    fn f64(&self, section: &str, key: &str) -> Result<f64> {
        self.require(section, key)?
            .parse()
            .map_err(|e| self.field_err(section, key, format!("not a number ({e})")))
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            None => Ok(default),
            Some(_) => self.f64(section, key),
        }
    }

    fn usize(&self, section: &str, key: &str) -> Result<usize> {
        self.require(section, key)?
            .parse()
            .map_err(|e| self.field_err(section, key, format!("not a count ({e})")))
    }
}

/// Parses a scenario configuration file.
pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    let raw = parse_raw(path, &text)?;

    let source = parse_source(&raw)?;
    let eq_kind = raw.require("equation", "kind")?;
    let equation = match eq_kind {
        "advection" => EquationSpec::Advection1D {
            u: raw.f64("equation", "u")?,
            source,
        },
        "advection2d" => EquationSpec::Advection2D {
            u: [raw.f64("equation", "u_x")?, raw.f64("equation", "u_y")?],
            source,
        },
        "acoustics" => EquationSpec::AcousticsGravity {
            c: raw.f64_or("equation", "c", 1.0)?,
            g: raw.f64("equation", "g")?,
        },
        other => {
            return Err(raw.field_err(
                "equation",
                "kind",
                format!("unknown equation `{other}` (advection, advection2d, acoustics)"),
            ))
        }
    };

    let is_2d = matches!(equation, EquationSpec::Advection2D { .. });
    let x_min = raw.f64("grid", "x_min")?;
    let x_max = raw.f64("grid", "x_max")?;
    let n_cells = raw.usize("grid", "n_cells")?;
    let (y_min, y_max, n_y) = if is_2d {
        (
            raw.f64("grid", "y_min")?,
            raw.f64("grid", "y_max")?,
            raw.usize("grid", "n_y")?,
        )
    } else {
        (0.0, 1.0, 3)
    };
    let boundary = match raw.get("grid", "boundary").unwrap_or("copy") {
        "copy" => BoundaryRule::Copy,
        "periodic" => BoundaryRule::Periodic,
        other => {
            return Err(raw.field_err(
                "grid",
                "boundary",
                format!("unknown boundary `{other}` (periodic, copy)"),
            ))
        }
    };
    let freeze_band = match raw.get("grid", "freeze_band") {
        None => 0,
        Some(_) => raw.usize("grid", "freeze_band")?,
    };

    let cfl = raw.f64_or("time", "cfl", 0.9)?;
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(raw.field_err("time", "cfl", format!("must be in (0, 1], got {cfl}")));
    }
    let alpha = raw.f64_or("time", "alpha", 0.5)?;
    let n_steps = match raw.get("time", "n_steps") {
        None => None,
        Some(_) => Some(raw.usize("time", "n_steps")?),
    };
    let t_end = match (n_steps, raw.get("time", "t_end")) {
        (Some(_), None) => 0.0, // step count drives the run
        _ => raw.f64("time", "t_end")?,
    };
    let mode = match raw.get("time", "evolution").unwrap_or("rk2") {
        "rk2" => EvolutionMode::Rk2,
        "exact" => EvolutionMode::Exact,
        other => {
            return Err(raw.field_err(
                "time",
                "evolution",
                format!("unknown evolution `{other}` (rk2, exact)"),
            ))
        }
    };
    let well_balanced = match raw.get("time", "well_balanced").unwrap_or("false") {
        "true" => true,
        "false" => false,
        other => {
            return Err(raw.field_err(
                "time",
                "well_balanced",
                format!("expected true or false, got `{other}`"),
            ))
        }
    };

    let initial = parse_initial(&raw, is_2d)?;

    let window = (
        raw.f64_or("output", "window_lo", x_min)?,
        raw.f64_or("output", "window_hi", x_max)?,
    );
    let name = raw
        .get("output", "name")
        .map(str::to_string)
        .unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into())
        });
    let prefix = raw
        .get("output", "prefix")
        .map(str::to_string)
        .unwrap_or_else(|| name.clone());
    let out_dir = raw.get("output", "dir").unwrap_or(".").to_string();

    let scenario = Scenario {
        name,
        equation,
        x_min,
        x_max,
        n_cells,
        y_min,
        y_max,
        n_y,
        cfl,
        t_end,
        n_steps,
        boundary,
        mode,
        alpha,
        well_balanced,
        window,
        freeze_band,
        initial,
    };
    scenario.validate()?;
    Ok(Config {
        scenario,
        out_dir,
        prefix,
    })
}

fn parse_source(raw: &RawConfig) -> Result<SourceKind> {
    match raw.get("equation", "source").unwrap_or("none") {
        "none" => Ok(SourceKind::None),
        "linear" => Ok(SourceKind::Linear {
            kappa: raw.f64("equation", "kappa")?,
        }),
        "power" => Ok(SourceKind::Power {
            kappa: raw.f64("equation", "kappa")?,
            b: raw.f64("equation", "b")?,
        }),
        other => Err(raw.field_err(
            "equation",
            "source",
            format!("unknown source `{other}` (none, linear, power)"),
        )),
    }
}

fn parse_initial(raw: &RawConfig, is_2d: bool) -> Result<InitialSpec> {
    let kind = raw.require("initial", "kind")?;
    match kind {
        "gaussian" if is_2d => Ok(InitialSpec::Gaussian2D {
            center: [
                raw.f64("initial", "center_x")?,
                raw.f64("initial", "center_y")?,
            ],
            width: raw.f64("initial", "width")?,
            amplitude: raw.f64_or("initial", "amplitude", 1.0)?,
        }),
        "gaussian" => Ok(InitialSpec::Gaussian {
            center: raw.f64("initial", "center")?,
            width: raw.f64("initial", "width")?,
            amplitude: raw.f64_or("initial", "amplitude", 1.0)?,
        }),
        "parabola" => Ok(InitialSpec::Parabola {
            a1: raw.f64("initial", "a1")?,
            a2: raw.f64("initial", "a2")?,
            a3: raw.f64("initial", "a3")?,
        }),
        "isentropic" => {
            let amplitude = raw.f64_or("initial", "perturbation_amplitude", 0.0)?;
            let perturbation = if amplitude != 0.0 {
                Some((amplitude, raw.f64("initial", "perturbation_width")?))
            } else {
                None
            };
            Ok(InitialSpec::Isentropic {
                k: raw.f64("initial", "K")?,
                gamma: raw.f64("initial", "gamma")?,
                rho0: raw.f64("initial", "rho0")?,
                perturbation,
            })
        }
        "velocity_jump" => Ok(InitialSpec::VelocityJump {
            rho: raw.f64("initial", "rho")?,
            p: raw.f64("initial", "p")?,
            v_inner: raw.f64("initial", "v_inner")?,
            v_outer: raw.f64("initial", "v_outer")?,
            lo: raw.f64("initial", "jump_lo")?,
            hi: raw.f64("initial", "jump_hi")?,
        }),
        other => Err(raw.field_err(
            "initial",
            "kind",
            format!(
                "unknown initial data `{other}` (gaussian, parabola, isentropic, velocity_jump)"
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        path
    }

    const MINIMAL: &str = "\
[equation]
kind = advection
u = 1.0
source = linear
kappa = 7.0

[grid]
x_min = -1.0
x_max = 2.0
n_cells = 50

[time]
t_end = 0.05

[initial]
kind = gaussian
center = 0.3
width = 100.0
";

    #[test]
    fn minimal_config_gets_defaults() {
        let path = write_temp("actiflux_min.ini", MINIMAL);
        let cfg = parse_config(&path).unwrap();
        let sc = &cfg.scenario;
        assert_eq!(sc.cfl, 0.9);
        assert_eq!(sc.alpha, 0.5);
        assert_eq!(sc.mode, EvolutionMode::Rk2);
        assert!(!sc.well_balanced);
        assert_eq!(sc.boundary, BoundaryRule::Copy);
        assert_eq!(sc.window, (-1.0, 2.0));
        assert_eq!(
            sc.equation,
            EquationSpec::Advection1D {
                u: 1.0,
                source: SourceKind::Linear { kappa: 7.0 }
            }
        );
    }

    #[test]
    fn cfl_out_of_range_rejected() {
        let text = MINIMAL.replace("[time]\nt_end = 0.05", "[time]\nt_end = 0.05\ncfl = 1.5");
        let path = write_temp("actiflux_cfl.ini", &text);
        let err = parse_config(&path).unwrap_err();
        assert!(err.to_string().contains("cfl"), "{err}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{MINIMAL}\nbogus = 1\n");
        let path = write_temp("actiflux_unknown.ini", &text);
        let err = parse_config(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains(":20:"), "{msg}");
    }

    #[test]
    fn acoustics_defaults_c() {
        let text = "\
[equation]
kind = acoustics
g = -1.0

[grid]
x_min = -1.0
x_max = 2.0
n_cells = 300

[time]
n_steps = 1000
well_balanced = true

[initial]
kind = parabola
a1 = 17.0
a2 = -3.0
a3 = 1.0

[output]
window_lo = 0.0
window_hi = 1.0
";
        let path = write_temp("actiflux_ac.ini", text);
        let cfg = parse_config(&path).unwrap();
        assert_eq!(
            cfg.scenario.equation,
            EquationSpec::AcousticsGravity { c: 1.0, g: -1.0 }
        );
        assert_eq!(cfg.scenario.n_steps, Some(1000));
        assert!(cfg.scenario.well_balanced);
        assert_eq!(cfg.scenario.window, (0.0, 1.0));
    }
}
