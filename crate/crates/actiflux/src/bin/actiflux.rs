//! Command-line driver for the Active Flux solver.
//!
//! Subcommands:
//! * `run CONFIG` — execute one scenario, write average and point-value
//!   snapshots.
//! * `convergence CONFIG --grids 50,100,...` — sweep grid resolutions and
//!   write the convergence table with EOC.
//! * `wellbalance CONFIG` — run a hydrostatic scenario twice (with and
//!   without the stationarity correction), write both drift series.
//! * `riemann CONFIG` — run the scheme and the Green's-function oracle,
//!   write both curves and the error norms.
//!
//! All outputs are CSV with headers. The output directory comes from the
//! config's `[output] dir` and can be overridden with `ACTIFLUX_OUT_DIR`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use actiflux::config::{parse_config, Config};
use actiflux::error::Result;
use actiflux::harness::{
    convergence_study_1d, convergence_study_2d, run_scenario, run_scenario_2d, write_drift,
    write_errors, write_points_1d, write_snapshot_1d, EquationSpec, ErrorReport, ErrorRow,
    InitialSpec, Scenario,
};
use actiflux::oracles::{riemann_exact, VelocityData};
use actiflux::AfError;

#[derive(Parser)]
#[command(name = "actiflux", about = "Active Flux solver for hyperbolic balance laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario and write snapshots
    Run { config: PathBuf },
    /// Sweep grid resolutions and write a convergence table
    Convergence {
        config: PathBuf,
        /// comma-separated cell counts, e.g. 50,100,200,400
        #[arg(long, value_delimiter = ',')]
        grids: Vec<usize>,
    },
    /// Run a hydrostatic scenario with and without the well-balancing fix
    Wellbalance { config: PathBuf },
    /// Run the scheme against the exact Riemann solution
    Riemann { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Convergence { config, grids } => cmd_convergence(&config, &grids),
        Command::Wellbalance { config } => cmd_wellbalance(&config),
        Command::Riemann { config } => cmd_riemann(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn out_path(cfg: &Config, suffix: &str) -> Result<PathBuf> {
    let dir = std::env::var("ACTIFLUX_OUT_DIR").unwrap_or_else(|_| cfg.out_dir.clone());
    std::fs::create_dir_all(&dir)?;
    Ok(Path::new(&dir).join(format!("{}_{suffix}", cfg.prefix)))
}

fn cmd_run(config: &Path) -> Result<()> {
    let cfg = parse_config(config)?;
    if matches!(cfg.scenario.equation, EquationSpec::Advection2D { .. }) {
        let run = run_scenario_2d(&cfg.scenario)?;
        let path = out_path(&cfg, "avg.csv")?;
        let mut s = String::from("x,y,q_avg\n");
        for j in 0..run.grid.n_y {
            for i in 0..run.grid.n_x {
                let (x, y) = run.grid.cell_center(i as i64, j as i64);
                s.push_str(&format!("{x},{y},{}\n", run.field.avg(i, j)));
            }
        }
        std::fs::write(&path, s)?;
        println!("{}: t = {}, {} steps -> {}", cfg.scenario.name, run.t, run.steps, path.display());
        return Ok(());
    }
    let run = run_scenario(&cfg.scenario)?;
    let avg_path = out_path(&cfg, "avg.csv")?;
    let pt_path = out_path(&cfg, "points.csv")?;
    write_snapshot_1d(&avg_path, &run.grid, &run.field)?;
    write_points_1d(&pt_path, &run.grid, &run.field)?;
    println!(
        "{}: t = {}, {} steps -> {}, {}",
        cfg.scenario.name,
        run.t,
        run.steps,
        avg_path.display(),
        pt_path.display()
    );
    Ok(())
}

fn cmd_convergence(config: &Path, grids: &[usize]) -> Result<()> {
    if grids.len() < 2 {
        return Err(AfError::Parameter(
            "convergence needs at least two grid sizes (--grids)".into(),
        ));
    }
    let cfg = parse_config(config)?;
    let report = if matches!(cfg.scenario.equation, EquationSpec::Advection2D { .. }) {
        convergence_study_2d(&cfg.scenario, grids)?
    } else {
        convergence_study_1d(&cfg.scenario, grids)?
    };
    let path = out_path(&cfg, "errors.csv")?;
    write_errors(&path, &report)?;
    for row in &report.rows {
        println!(
            "n = {:6}  l1_avg = {:.3e}  eoc = {}",
            row.n_cells,
            row.l1_avg,
            row.eoc.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into())
        );
    }
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_wellbalance(config: &Path) -> Result<()> {
    let cfg = parse_config(config)?;
    let mut fixed = cfg.scenario.clone();
    fixed.well_balanced = true;
    let mut plain = cfg.scenario.clone();
    plain.well_balanced = false;
    let run_fixed = run_scenario(&fixed)?;
    let run_plain = run_scenario(&plain)?;
    let fixed_path = out_path(&cfg, "drift_fixed.csv")?;
    let plain_path = out_path(&cfg, "drift_plain.csv")?;
    write_drift(&fixed_path, &run_fixed.drift)?;
    write_drift(&plain_path, &run_plain.drift)?;
    let peak = |drift: &[(f64, [f64; 3])]| {
        drift
            .iter()
            .map(|(_, d)| d[0].max(d[1]).max(d[2]))
            .fold(0.0f64, f64::max)
    };
    println!(
        "{}: {} steps; max drift with fix {:.3e}, without {:.3e}",
        cfg.scenario.name,
        run_fixed.steps,
        peak(&run_fixed.drift),
        peak(&run_plain.drift)
    );
    println!("-> {}, {}", fixed_path.display(), plain_path.display());
    Ok(())
}

fn cmd_riemann(config: &Path) -> Result<()> {
    let cfg = parse_config(config)?;
    let sc = &cfg.scenario;
    let (c, g) = match sc.equation {
        EquationSpec::AcousticsGravity { c, g } => (c, g),
        _ => {
            return Err(AfError::Parameter(
                "riemann requires the acoustics equation".into(),
            ))
        }
    };
    let (rho, p, v_inner, v_outer, lo, hi) = match sc.initial {
        InitialSpec::VelocityJump {
            rho,
            p,
            v_inner,
            v_outer,
            lo,
            hi,
        } => (rho, p, v_inner, v_outer, lo, hi),
        _ => {
            return Err(AfError::Parameter(
                "riemann requires velocity_jump initial data".into(),
            ))
        }
    };
    let run = run_scenario(sc)?;
    let avg_path = out_path(&cfg, "avg.csv")?;
    write_snapshot_1d(&avg_path, &run.grid, &run.field)?;

    let data = VelocityData::new(
        move |x| {
            if (lo..=hi).contains(&x) {
                v_inner
            } else {
                v_outer
            }
        },
        vec![lo, hi],
    )?;
    let exact_path = out_path(&cfg, "exact.csv")?;
    let mut s = String::from("x,rho,v,p\n");
    let mut exact_pts = Vec::with_capacity(sc.n_cells + 1);
    for i in 0..=sc.n_cells {
        let x = run.grid.interface(i as i64);
        let (r, v, pr) = riemann_exact(rho, p, &data, c, g, run.t, x)?;
        exact_pts.push((r, v, pr));
        s.push_str(&format!("{x},{r},{v},{pr}\n"));
    }
    std::fs::write(&exact_path, s)?;

    let report = riemann_error_report(sc, &run, &exact_pts);
    let err_path = out_path(&cfg, "errors.csv")?;
    write_errors(&err_path, &report)?;
    let row = &report.rows[0];
    println!(
        "{}: t = {}, L1 point error {:.3e} (max over variables)",
        sc.name, run.t, row.l1_point
    );
    println!(
        "-> {}, {}, {}",
        avg_path.display(),
        exact_path.display(),
        err_path.display()
    );
    Ok(())
}

fn riemann_error_report(
    sc: &Scenario,
    run: &actiflux::harness::Run1D,
    exact_pts: &[(f64, f64, f64)],
) -> ErrorReport {
    let mut l1 = [0.0f64; 3];
    let mut linf = [0.0f64; 3];
    for (i, &(r, v, p)) in exact_pts.iter().enumerate() {
        let x = run.grid.interface(i as i64);
        if x < sc.window.0 || x > sc.window.1 {
            continue;
        }
        for (var, ex) in [r, v, p].into_iter().enumerate() {
            let e = (run.field.point(var, i) - ex).abs();
            l1[var] += run.grid.dx * e;
            linf[var] = linf[var].max(e);
        }
    }
    let worst = |a: [f64; 3]| a[0].max(a[1]).max(a[2]);
    ErrorReport {
        rows: vec![ErrorRow {
            n_cells: sc.n_cells,
            dx: run.grid.dx,
            l1_avg: worst(l1),
            l1_point: worst(l1),
            linf_point: worst(linf),
            eoc: None,
        }],
    }
}
