//! Scenario execution, error norms, convergence studies and brute-force
//! quadrature oracles.
//!
//! A [`Scenario`] is a complete experiment description. Runs are
//! deterministic: identical scenarios produce bit-identical outputs. Error
//! norms are measured inside a window to keep boundary effects out, and
//! scenarios on non-periodic domains may pin a band of boundary cells to
//! the initial data (a Dirichlet-type condition for stationary setups,
//! replacing the enlarged domains a paper-scale study would use).

use std::fmt::Write as _;
use std::path::Path;

use crate::equations::{
    make_acoustics_gravity, make_advection_1d, AcousticsParams, Advection2DSpec, LinearSystem1D,
    SourceKind,
};
use crate::error::{AfError, Result};
use crate::evolution::{advect_exact, advect_exact_2d, EvolutionMode, Rk2Options};
use crate::grid::{gauss5_average, BoundaryRule, Field1D, Field2D, Grid1D, Grid2D};
use crate::update::{cfl_dt, l_min_2d, step_1d, step_2d, StepOptions};
use crate::wellbalance::{add_pressure_perturbation, init_isentropic, init_parabola};

/// Equation family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquationSpec {
    Advection1D { u: f64, source: SourceKind },
    Advection2D { u: [f64; 2], source: SourceKind },
    AcousticsGravity { c: f64, g: f64 },
}

/// Initial-data family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    /// `amplitude * exp(-width (x - center)^2)`, scalar
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * exp(-width ((x - cx)^2 + (y - cy)^2))`, 2D scalar
    Gaussian2D {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
    /// hydrostatic parabolic-pressure state
    Parabola { a1: f64, a2: f64, a3: f64 },
    /// isentropic atmosphere, optionally with a Gaussian pressure bump
    Isentropic {
        k: f64,
        gamma: f64,
        rho0: f64,
        perturbation: Option<(f64, f64)>, // (amplitude, width coefficient)
    },
    /// constant (rho, p), velocity `v_inner` on [lo, hi] and `v_outer`
    /// outside
    VelocityJump {
        rho: f64,
        p: f64,
        v_inner: f64,
        v_outer: f64,
        lo: f64,
        hi: f64,
    },
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub equation: EquationSpec,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    /// 2D scenarios only
    pub y_min: f64,
    pub y_max: f64,
    pub n_y: usize,
    pub cfl: f64,
    pub t_end: f64,
    /// if set, run exactly this many CFL-sized steps instead of stopping
    /// at `t_end`
    pub n_steps: Option<usize>,
    pub boundary: BoundaryRule,
    pub mode: EvolutionMode,
    pub alpha: f64,
    pub well_balanced: bool,
    /// measurement window `[a, b]` for error norms
    pub window: (f64, f64),
    /// number of boundary cells (per side) pinned to the initial data
    /// after every step; 0 disables, ignored for periodic runs
    pub freeze_band: usize,
    pub initial: InitialSpec,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(AfError::Parameter(msg));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return err(format!("cfl must be in (0, 1], got {}", self.cfl));
        }
        if self.t_end < 0.0 {
            return err(format!("t_end must be >= 0, got {}", self.t_end));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return err(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.window.0 < self.x_min || self.window.1 > self.x_max || self.window.0 > self.window.1
        {
            return err(format!(
                "window [{}, {}] must lie within the domain [{}, {}]",
                self.window.0, self.window.1, self.x_min, self.x_max
            ));
        }
        Ok(())
    }

    fn context(&self, e: AfError) -> AfError {
        AfError::Scenario {
            name: self.name.clone(),
            source: Box::new(e),
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRow {
    pub n_cells: usize,
    pub dx: f64,
    pub l1_avg: f64,
    pub l1_point: f64,
    pub linf_point: f64,
    /// order between this row and the previous one; `None` on the first
    /// row or when an error vanishes
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

/// `(L1_avg, L1_point, Linf_point)` of variable `var` against an exact
/// profile, measured over cells and interfaces inside the window. Average
/// errors compare against the exact cell average (5-point Gauss).
pub fn error_norms(
    grid: &Grid1D,
    field: &Field1D,
    var: usize,
    exact: &dyn Fn(f64) -> f64,
    window: (f64, f64),
) -> (f64, f64, f64) {
    let eps = 1e-12 * grid.dx;
    let (mut l1a, mut l1p, mut linf) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..grid.n_cells {
        let xc = grid.cell_center(i as i64);
        if xc >= window.0 - eps && xc <= window.1 + eps {
            let exact_avg = gauss5_average(&exact, xc, grid.dx);
            l1a += grid.dx * (field.avg(var, i) - exact_avg).abs();
        }
    }
    for i in 0..=grid.n_cells {
        let x = grid.interface(i as i64);
        if x >= window.0 - eps && x <= window.1 + eps {
            let e = (field.point(var, i) - exact(x)).abs();
            l1p += grid.dx * e;
            linf = linf.max(e);
        }
    }
    (l1a, l1p, linf)
}

/// 2D analogue over the whole (periodic) domain: cell averages against
/// exact averages (tensor 5-point Gauss), point norms over all nodes.
pub fn error_norms_2d(
    grid: &Grid2D,
    field: &Field2D,
    exact: &dyn Fn(f64, f64) -> f64,
) -> (f64, f64, f64) {
    let (mut l1a, mut l1p, mut linf) = (0.0f64, 0.0f64, 0.0f64);
    let cell = grid.dx * grid.dy;
    for j in 0..grid.n_y {
        for i in 0..grid.n_x {
            let (xc, yc) = grid.cell_center(i as i64, j as i64);
            let row = |y: f64| gauss5_average(&|x| exact(x, y), xc, grid.dx);
            let exact_avg = gauss5_average(&row, yc, grid.dy);
            l1a += cell * (field.avg(i, j) - exact_avg).abs();
        }
    }
    for j in 0..grid.n_y {
        for i in 0..grid.n_x {
            let (x, y) = grid.node(i as i64, j as i64);
            let e = (field.node(i, j) - exact(x, y)).abs();
            l1p += cell * e;
            linf = linf.max(e);
        }
    }
    (l1a, l1p, linf)
}

/// Experimental orders of convergence from `(dx, error)` pairs:
/// `log(e_{k-1}/e_k) / log(dx_{k-1}/dx_k)`. `None` where an error is zero.
pub fn eoc(errors: &[(f64, f64)]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            let ((dx0, e0), (dx1, e1)) = (w[0], w[1]);
            if e0 <= 0.0 || e1 <= 0.0 || dx0 <= dx1 {
                None
            } else {
                Some((e0 / e1).ln() / (dx0 / dx1).ln())
            }
        })
        .collect()
}

/// Space-time polynomial
/// `a0 + a1 x + a2 t + a3 x^2 + a4 x t + a5 t^2 + a6 x t^2` on the cell
/// `[-dx/2, dx/2] x [0, dt]`: its exact space-time average and the seven
/// interpolation samples (interface values at the three time levels, in
/// the order expected by the 1D source quadrature, plus the initial cell
/// average in the last slot).
pub fn spacetime_poly_oracle_1d(a: &[f64; 7], dx: f64, dt: f64) -> (f64, [f64; 7]) {
    let q = |x: f64, t: f64| {
        a[0] + a[1] * x + a[2] * t + a[3] * x * x + a[4] * x * t + a[5] * t * t
            + a[6] * x * t * t
    };
    // odd x-powers average to zero; mean of t^k over [0, dt] is dt^k/(k+1)
    let avg = a[0] + a[3] * dx * dx / 12.0 + a[2] * dt / 2.0 + a[5] * dt * dt / 3.0;
    let h = 0.5 * dx;
    let samples = [
        q(-h, 0.0),
        q(h, 0.0),
        q(-h, 0.5 * dt),
        q(h, 0.5 * dt),
        q(-h, dt),
        q(h, dt),
        a[0] + a[3] * dx * dx / 12.0, // initial average
    ];
    (avg, samples)
}

/// The 25 exponent triples `(zeta, eta, theta)` of the 2D space-time
/// ansatz: all of `{0,1,2}^3` with total degree at most 4, plus
/// `(2,1,2)` and `(1,2,2)`.
pub const POLY2D_EXPONENTS: [(u32, u32, u32); 25] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (2, 0, 0),
    (1, 1, 0),
    (0, 2, 0),
    (1, 0, 1),
    (0, 1, 1),
    (0, 0, 2),
    (2, 1, 0),
    (1, 2, 0),
    (2, 0, 1),
    (1, 1, 1),
    (0, 2, 1),
    (1, 0, 2),
    (0, 1, 2),
    (2, 2, 0),
    (2, 1, 1),
    (1, 2, 1),
    (2, 0, 2),
    (1, 1, 2),
    (0, 2, 2),
    (2, 1, 2),
    (1, 2, 2),
];

/// Samples of the 2D ansatz feeding the 2D source quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Poly2DSamples {
    pub edges_n: [f64; 4],
    pub nodes_n: [f64; 4],
    pub edges_half: [f64; 4],
    pub nodes_half: [f64; 4],
    pub edges_full: [f64; 4],
    pub nodes_full: [f64; 4],
    pub avg_n: f64,
}

/// Exact space-time average and interpolation samples of the 25-term
/// ansatz `sum a_i x^zeta y^eta t^theta` over
/// `[-dx/2, dx/2] x [-dy/2, dy/2] x [0, dt]`. Edge order is (W, E, S, N)
/// and node order (SW, SE, NW, NE), matching the quadrature input.
pub fn spacetime_poly_oracle_2d(a: &[f64; 25], dx: f64, dy: f64, dt: f64) -> (f64, Poly2DSamples) {
    let q = |x: f64, y: f64, t: f64| {
        POLY2D_EXPONENTS
            .iter()
            .zip(a)
            .map(|(&(ze, et, th), &c)| c * x.powi(ze as i32) * y.powi(et as i32) * t.powi(th as i32))
            .sum::<f64>()
    };
    // mean of x^k over a symmetric cell: 0 for odd k, (dx/2)^k/(k+1) even
    let mean_sym = |k: u32, d: f64| match k {
        0 => 1.0,
        2 => d * d / 12.0,
        _ => 0.0,
    };
    let mean_t = |k: u32| match k {
        0 => 1.0,
        1 => dt / 2.0,
        _ => dt * dt / 3.0,
    };
    let avg: f64 = POLY2D_EXPONENTS
        .iter()
        .zip(a)
        .map(|(&(ze, et, th), &c)| c * mean_sym(ze, dx) * mean_sym(et, dy) * mean_t(th))
        .sum();
    let avg_n: f64 = POLY2D_EXPONENTS
        .iter()
        .zip(a)
        .filter(|(&(_, _, th), _)| th == 0)
        .map(|(&(ze, et, _), &c)| c * mean_sym(ze, dx) * mean_sym(et, dy))
        .sum();
    let (hx, hy) = (0.5 * dx, 0.5 * dy);
    let at = |t: f64| {
        (
            [q(-hx, 0.0, t), q(hx, 0.0, t), q(0.0, -hy, t), q(0.0, hy, t)],
            [
                q(-hx, -hy, t),
                q(hx, -hy, t),
                q(-hx, hy, t),
                q(hx, hy, t),
            ],
        )
    };
    let (edges_n, nodes_n) = at(0.0);
    let (edges_half, nodes_half) = at(0.5 * dt);
    let (edges_full, nodes_full) = at(dt);
    (
        avg,
        Poly2DSamples {
            edges_n,
            nodes_n,
            edges_half,
            nodes_half,
            edges_full,
            nodes_full,
            avg_n,
        },
    )
}

/// Builds the 1D system described by a scenario.
pub fn build_system_1d(eq: &EquationSpec) -> Result<LinearSystem1D> {
    match *eq {
        EquationSpec::Advection1D { u, source } => Ok(make_advection_1d(u, source)),
        EquationSpec::AcousticsGravity { c, g } => make_acoustics_gravity(AcousticsParams { c, g }),
        EquationSpec::Advection2D { .. } => Err(AfError::Parameter(
            "2D equation in a 1D scenario".into(),
        )),
    }
}

/// Builds the initial 1D field of a scenario.
pub fn build_initial_1d(scenario: &Scenario, grid: &Grid1D) -> Result<Field1D> {
    match scenario.initial {
        InitialSpec::Gaussian {
            center,
            width,
            amplitude,
        } => {
            let mut f = Field1D::zeros(1, grid.n_cells);
            f.fill_from(grid, 0, |x| {
                amplitude * (-width * (x - center) * (x - center)).exp()
            });
            Ok(f)
        }
        InitialSpec::Parabola { a1, a2, a3 } => {
            let g = acoustics_g(scenario)?;
            init_parabola(grid, a1, a2, a3, g)
        }
        InitialSpec::Isentropic {
            k,
            gamma,
            rho0,
            perturbation,
        } => {
            let g = acoustics_g(scenario)?;
            let base = init_isentropic(grid, k, gamma, rho0, g)?;
            Ok(match perturbation {
                Some((amplitude, width)) => {
                    add_pressure_perturbation(grid, &base, amplitude, width)
                }
                None => base,
            })
        }
        InitialSpec::VelocityJump {
            rho,
            p,
            v_inner,
            v_outer,
            lo,
            hi,
        } => {
            let mut f = Field1D::zeros(3, grid.n_cells);
            f.fill_from(grid, 0, |_| rho);
            f.fill_from(grid, 2, |_| p);
            // fill_from computes averages by quadrature, which is wrong at
            // the jumps; set the piecewise data directly instead
            let v = |x: f64| if (lo..=hi).contains(&x) { v_inner } else { v_outer };
            for i in 0..=grid.n_cells {
                f.set_point(1, i, v(grid.interface(i as i64)));
            }
            for i in 0..grid.n_cells {
                let (xl, xr) = (grid.interface(i as i64), grid.interface(i as i64 + 1));
                // exact average of the piecewise-constant profile
                let covered = (xr.min(hi) - xl.max(lo)).clamp(0.0, xr - xl);
                f.set_avg(1, i, (covered * v_inner + (xr - xl - covered) * v_outer) / grid.dx);
            }
            Ok(f)
        }
        InitialSpec::Gaussian2D { .. } => Err(AfError::Parameter(
            "2D initial data in a 1D scenario".into(),
        )),
    }
}

fn acoustics_g(scenario: &Scenario) -> Result<f64> {
    match scenario.equation {
        EquationSpec::AcousticsGravity { g, .. } => Ok(g),
        _ => Err(AfError::Parameter(
            "hydrostatic initial data requires the acoustics equation".into(),
        )),
    }
}

/// Result of a 1D run: the final state plus a per-step drift series (max
/// point-value deviation from the initial data inside the window, one
/// entry per variable; recorded for 3-variable systems).
#[derive(Debug)]
pub struct Run1D {
    pub grid: Grid1D,
    pub field: Field1D,
    pub t: f64,
    pub steps: usize,
    pub drift: Vec<(f64, [f64; 3])>,
}

/// Executes a 1D scenario: CFL time stepping with the final step clipped
/// to land on `t_end` exactly (unless a fixed step count is requested).
pub fn run_scenario(scenario: &Scenario) -> Result<Run1D> {
    let ctx = |e: AfError| scenario.context(e);
    scenario.validate().map_err(ctx)?;
    let grid = Grid1D::new(scenario.x_min, scenario.x_max, scenario.n_cells).map_err(ctx)?;
    let system = build_system_1d(&scenario.equation).map_err(ctx)?;
    let initial = build_initial_1d(scenario, &grid).map_err(ctx)?;

    let opts = StepOptions {
        mode: scenario.mode,
        rk2: Rk2Options {
            alpha: scenario.alpha,
            well_balanced: scenario.well_balanced,
        },
    };
    let dt_cfl = cfl_dt(grid.dx, system.lambda_max(), scenario.cfl).map_err(ctx)?;

    let mut field = initial.clone();
    let mut t = 0.0;
    let mut steps = 0;
    let mut drift = Vec::new();
    let track_drift = field.m == 3;

    loop {
        let done = match scenario.n_steps {
            Some(n) => steps >= n,
            None => t >= scenario.t_end - 1e-14 * scenario.t_end.max(1.0),
        };
        if done {
            break;
        }
        let dt = match scenario.n_steps {
            Some(_) => dt_cfl,
            None => dt_cfl.min(scenario.t_end - t),
        };
        field = step_1d(&grid, &field, scenario.boundary, &system, opts, dt).map_err(ctx)?;
        if scenario.boundary != BoundaryRule::Periodic && scenario.freeze_band > 0 {
            freeze_band_1d(&grid, &mut field, &initial, scenario.freeze_band);
        }
        t += dt;
        steps += 1;
        if track_drift {
            drift.push((t, window_drift(&grid, &field, &initial, scenario.window)));
        }
    }

    Ok(Run1D {
        grid,
        field,
        t,
        steps,
        drift,
    })
}

/// Overwrites the outer `band` cells on each side (averages and the point
/// values on their interfaces) with the initial data.
fn freeze_band_1d(grid: &Grid1D, field: &mut Field1D, initial: &Field1D, band: usize) {
    let n = grid.n_cells;
    let band = band.min(n / 2);
    for var in 0..field.m {
        for i in 0..band {
            field.set_avg(var, i, initial.avg(var, i));
            field.set_avg(var, n - 1 - i, initial.avg(var, n - 1 - i));
        }
        for i in 0..=band {
            field.set_point(var, i, initial.point(var, i));
            field.set_point(var, n - i, initial.point(var, n - i));
        }
    }
}

fn window_drift(grid: &Grid1D, field: &Field1D, initial: &Field1D, window: (f64, f64)) -> [f64; 3] {
    let mut d = [0.0f64; 3];
    for i in 0..=grid.n_cells {
        let x = grid.interface(i as i64);
        if x >= window.0 && x <= window.1 {
            for (var, dv) in d.iter_mut().enumerate() {
                *dv = dv.max((field.point(var, i) - initial.point(var, i)).abs());
            }
        }
    }
    d
}

/// Result of a 2D run.
#[derive(Debug)]
pub struct Run2D {
    pub grid: Grid2D,
    pub field: Field2D,
    pub t: f64,
    pub steps: usize,
}

/// Executes a 2D scalar advection scenario (periodic boundaries).
pub fn run_scenario_2d(scenario: &Scenario) -> Result<Run2D> {
    let ctx = |e: AfError| scenario.context(e);
    scenario.validate().map_err(ctx)?;
    let (u, source) = match scenario.equation {
        EquationSpec::Advection2D { u, source } => (u, source),
        _ => {
            return Err(ctx(AfError::Parameter(
                "run_scenario_2d requires a 2D equation".into(),
            )))
        }
    };
    let spec = Advection2DSpec::new(u, source).map_err(ctx)?;
    let grid = Grid2D::new(
        scenario.x_min,
        scenario.x_max,
        scenario.y_min,
        scenario.y_max,
        scenario.n_cells,
        scenario.n_y,
    )
    .map_err(ctx)?;
    let mut field = Field2D::zeros(grid.n_x, grid.n_y);
    match scenario.initial {
        InitialSpec::Gaussian2D {
            center,
            width,
            amplitude,
        } => field.fill_from(&grid, |x, y| {
            amplitude * (-width * ((x - center[0]).powi(2) + (y - center[1]).powi(2))).exp()
        }),
        _ => {
            return Err(ctx(AfError::Parameter(
                "2D scenarios support Gaussian initial data".into(),
            )))
        }
    }
    let opts = StepOptions {
        mode: scenario.mode,
        rk2: Rk2Options {
            alpha: scenario.alpha,
            well_balanced: false,
        },
    };
    let lam = u[0].abs().max(u[1].abs());
    let dt_cfl = cfl_dt(l_min_2d(&grid), lam, scenario.cfl).map_err(ctx)?;
    let mut t = 0.0;
    let mut steps = 0;
    while t < scenario.t_end - 1e-14 * scenario.t_end.max(1.0) {
        let dt = dt_cfl.min(scenario.t_end - t);
        field = step_2d(&grid, &field, scenario.boundary, &spec, opts, dt).map_err(ctx)?;
        t += dt;
        steps += 1;
    }
    Ok(Run2D {
        grid,
        field,
        t,
        steps,
    })
}

/// Exact solution of a 1D advection scenario at `(t, x)`: transport of the
/// initial profile along the characteristic, then the source ODE.
pub fn exact_advection_1d(scenario: &Scenario, t: f64) -> Result<impl Fn(f64) -> f64> {
    let (u, source) = match scenario.equation {
        EquationSpec::Advection1D { u, source } => (u, source),
        _ => {
            return Err(AfError::Parameter(
                "exact_advection_1d requires 1D advection".into(),
            ))
        }
    };
    let q0: Box<dyn Fn(f64) -> f64> = match scenario.initial {
        InitialSpec::Gaussian {
            center,
            width,
            amplitude,
        } => Box::new(move |x: f64| amplitude * (-width * (x - center) * (x - center)).exp()),
        _ => {
            return Err(AfError::Parameter(
                "exact advection solution supports Gaussian data".into(),
            ))
        }
    };
    Ok(move |x: f64| advect_exact(&q0, u, source, t, x).expect("no blow-up"))
}

/// Exact solution of a 2D advection scenario at time `t`.
pub fn exact_advection_2d(scenario: &Scenario, t: f64) -> Result<impl Fn(f64, f64) -> f64> {
    let (u, source) = match scenario.equation {
        EquationSpec::Advection2D { u, source } => (u, source),
        _ => {
            return Err(AfError::Parameter(
                "exact_advection_2d requires 2D advection".into(),
            ))
        }
    };
    let q0: Box<dyn Fn(f64, f64) -> f64> = match scenario.initial {
        InitialSpec::Gaussian2D {
            center,
            width,
            amplitude,
        } => Box::new(move |x: f64, y: f64| {
            amplitude * (-width * ((x - center[0]).powi(2) + (y - center[1]).powi(2))).exp()
        }),
        _ => {
            return Err(AfError::Parameter(
                "exact advection solution supports Gaussian data".into(),
            ))
        }
    };
    Ok(move |x: f64, y: f64| advect_exact_2d(&q0, u, source, t, x, y).expect("no blow-up"))
}

/// Convergence study for a 1D advection scenario: reruns the scenario on
/// each grid and compares with the exact solution at `t_end`.
pub fn convergence_study_1d(template: &Scenario, grids: &[usize]) -> Result<ErrorReport> {
    let mut rows: Vec<ErrorRow> = Vec::new();
    for &n in grids {
        let mut sc = template.clone();
        sc.n_cells = n;
        let run = run_scenario(&sc)?;
        let exact = exact_advection_1d(&sc, run.t)?;
        let (l1a, l1p, linf) = error_norms(&run.grid, &run.field, 0, &exact, sc.window);
        rows.push(ErrorRow {
            n_cells: n,
            dx: run.grid.dx,
            l1_avg: l1a,
            l1_point: l1p,
            linf_point: linf,
            eoc: None,
        });
    }
    fill_eoc(&mut rows);
    Ok(ErrorReport { rows })
}

/// Convergence study for a 2D scenario (`n_y` scaled with `n_cells`).
pub fn convergence_study_2d(template: &Scenario, grids: &[usize]) -> Result<ErrorReport> {
    let mut rows: Vec<ErrorRow> = Vec::new();
    for &n in grids {
        let mut sc = template.clone();
        sc.n_cells = n;
        sc.n_y = n * template.n_y / template.n_cells;
        let run = run_scenario_2d(&sc)?;
        let exact = exact_advection_2d(&sc, run.t)?;
        let (l1a, l1p, linf) = error_norms_2d(&run.grid, &run.field, &exact);
        rows.push(ErrorRow {
            n_cells: n,
            dx: run.grid.dx,
            l1_avg: l1a,
            l1_point: l1p,
            linf_point: linf,
            eoc: None,
        });
    }
    fill_eoc(&mut rows);
    Ok(ErrorReport { rows })
}

fn fill_eoc(rows: &mut [ErrorRow]) {
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.dx, r.l1_avg)).collect();
    let orders = eoc(&pairs);
    for (row, o) in rows.iter_mut().skip(1).zip(orders) {
        row.eoc = o;
    }
}

/// Point-value L1 distance of variable `var` between a run and a reference
/// run on a nested finer grid (`ref_n = ratio * n`, same domain), over the
/// window. Coarse interface `i` coincides with fine interface `ratio * i`.
pub fn point_l1_against_reference(
    coarse_grid: &Grid1D,
    coarse: &Field1D,
    fine_grid: &Grid1D,
    fine: &Field1D,
    var: usize,
    window: (f64, f64),
) -> Result<f64> {
    if fine_grid.n_cells % coarse_grid.n_cells != 0 {
        return Err(AfError::Parameter(format!(
            "grids are not nested: {} vs {}",
            coarse_grid.n_cells, fine_grid.n_cells
        )));
    }
    let ratio = fine_grid.n_cells / coarse_grid.n_cells;
    let mut l1 = 0.0;
    for i in 0..=coarse_grid.n_cells {
        let x = coarse_grid.interface(i as i64);
        if x >= window.0 && x <= window.1 {
            l1 += coarse_grid.dx * (coarse.point(var, i) - fine.point(var, ratio * i)).abs();
        }
    }
    Ok(l1)
}

// --- CSV output -----------------------------------------------------------

/// Writes a 1D snapshot CSV: `x,rho_avg,v_avg,p_avg` for 3-variable
/// fields, `x,q_avg` for scalars; `x` is the cell center.
pub fn write_snapshot_1d(path: &Path, grid: &Grid1D, field: &Field1D) -> Result<()> {
    let mut s = String::new();
    if field.m == 3 {
        s.push_str("x,rho_avg,v_avg,p_avg\n");
        for i in 0..grid.n_cells {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                grid.cell_center(i as i64),
                field.avg(0, i),
                field.avg(1, i),
                field.avg(2, i)
            );
        }
    } else {
        s.push_str("x,q_avg\n");
        for i in 0..grid.n_cells {
            let _ = writeln!(s, "{},{}", grid.cell_center(i as i64), field.avg(0, i));
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes point values: `x,q_point` per variable column (`x,rho_point,...`
/// for 3-variable fields).
pub fn write_points_1d(path: &Path, grid: &Grid1D, field: &Field1D) -> Result<()> {
    let mut s = String::new();
    if field.m == 3 {
        s.push_str("x,rho_point,v_point,p_point\n");
        for i in 0..=grid.n_cells {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                grid.interface(i as i64),
                field.point(0, i),
                field.point(1, i),
                field.point(2, i)
            );
        }
    } else {
        s.push_str("x,q_point\n");
        for i in 0..=grid.n_cells {
            let _ = writeln!(s, "{},{}", grid.interface(i as i64), field.point(0, i));
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes a convergence table: `n_cells,dx,l1_avg,l1_point,linf_point,eoc`
/// (empty EOC cell where undefined).
pub fn write_errors(path: &Path, report: &ErrorReport) -> Result<()> {
    let mut s = String::from("n_cells,dx,l1_avg,l1_point,linf_point,eoc\n");
    for r in &report.rows {
        let eoc_cell = r.eoc.map(|o| o.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n_cells, r.dx, r.l1_avg, r.l1_point, r.linf_point, eoc_cell
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes a drift time series: `t,err_rho,err_v,err_p`.
pub fn write_drift(path: &Path, drift: &[(f64, [f64; 3])]) -> Result<()> {
    let mut s = String::from("t,err_rho,err_v,err_p\n");
    for (t, d) in drift {
        let _ = writeln!(s, "{},{},{},{}", t, d[0], d[1], d[2]);
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::update::{source_quadrature_1d, source_quadrature_2d, SourceSamples1D, SourceSamples2D};
    use crate::reconstruction::{recon1d_midpoint, recon2d_eval, CellDofs2D};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn advection_scenario() -> Scenario {
        Scenario {
            name: "advection".into(),
            equation: EquationSpec::Advection1D {
                u: 1.0,
                source: SourceKind::Linear { kappa: 7.0 },
            },
            x_min: -1.0,
            x_max: 2.0,
            n_cells: 60,
            y_min: 0.0,
            y_max: 1.0,
            n_y: 3,
            cfl: 0.9,
            t_end: 0.05,
            n_steps: None,
            boundary: BoundaryRule::Copy,
            mode: EvolutionMode::Exact,
            alpha: 0.5,
            well_balanced: false,
            window: (0.0, 1.0),
            freeze_band: 0,
            initial: InitialSpec::Gaussian {
                center: 0.3,
                width: 100.0,
                amplitude: 1.0,
            },
        }
    }

    #[test]
    fn eoc_examples() {
        let orders = eoc(&[(0.2, 8.0), (0.1, 1.0), (0.05, 0.25)]);
        assert!((orders[0].unwrap() - 3.0).abs() < 1e-14);
        assert!((orders[1].unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(eoc(&[(0.2, 1.0), (0.1, 0.0)]), vec![None]);
    }

    #[test]
    fn error_norm_examples() {
        let grid = Grid1D::new(0.0, 1.0, 10).unwrap();
        let mut field = Field1D::zeros(1, 10);
        let f = |x: f64| 0.5 + x * x;
        field.fill_from(&grid, 0, f);
        let (l1a, l1p, linf) = error_norms(&grid, &field, 0, &f, (0.0, 1.0));
        assert!(l1a <= 1e-13 && l1p <= 1e-13 && linf <= 1e-13);
        // one average off by epsilon contributes dx * epsilon
        field.set_avg(0, 4, field.avg(0, 4) + 1e-3);
        let (l1a, _, _) = error_norms(&grid, &field, 0, &f, (0.0, 1.0));
        assert!((l1a - 0.1 * 1e-3).abs() < 1e-16);
        // window selects interfaces: only those in [0.35, 0.65] (x = 0.4,
        // 0.5, 0.6) and cells with centers inside count
        field.set_point(0, 2, f(0.2) + 1.0);
        let (_, l1p, linf) = error_norms(&grid, &field, 0, &f, (0.35, 0.65));
        assert_eq!(l1p, 0.0);
        assert_eq!(linf, 0.0);
    }

    #[test]
    fn poly_oracle_1d_matches_quadrature() {
        // the source quadrature with an identity source must reproduce
        // the exact space-time average of every ansatz member
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (dx, dt) = (0.17, 0.09);
        for _ in 0..100 {
            let mut a = [0.0; 7];
            for c in &mut a {
                *c = rng.gen_range(-1.0..1.0);
            }
            let (avg, s) = spacetime_poly_oracle_1d(&a, dx, dt);
            assert!((avg - a[0] - a[3] * dx * dx / 12.0 - a[2] * dt / 2.0 - a[5] * dt * dt / 3.0).abs() < 1e-15);
            let quad = source_quadrature_1d(&SourceSamples1D {
                left_n: s[0],
                right_n: s[1],
                left_half: s[2],
                right_half: s[3],
                left_full: s[4],
                right_full: s[5],
                mid_n: recon1d_midpoint(s[6], s[0], s[1]),
            });
            assert!(
                (quad - avg).abs() <= 1e-12 * avg.abs().max(1.0),
                "quadrature {quad} vs exact {avg}"
            );
        }
        // spot checks
        assert_eq!(spacetime_poly_oracle_1d(&[3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], dx, dt).0, 3.0);
        let (avg, _) = spacetime_poly_oracle_1d(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], dx, dt);
        assert!((avg - dx * dx / 12.0).abs() < 1e-16);
    }

    #[test]
    fn poly_oracle_2d_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (dx, dy, dt) = (0.2, 0.15, 0.05);
        for _ in 0..100 {
            let mut a = [0.0; 25];
            for c in &mut a {
                *c = rng.gen_range(-1.0..1.0);
            }
            let (avg, s) = spacetime_poly_oracle_2d(&a, dx, dy, dt);
            let d = CellDofs2D {
                avg: s.avg_n,
                w: s.edges_n[0],
                e: s.edges_n[1],
                s: s.edges_n[2],
                n: s.edges_n[3],
                sw: s.nodes_n[0],
                se: s.nodes_n[1],
                nw: s.nodes_n[2],
                ne: s.nodes_n[3],
            };
            let quad = source_quadrature_2d(&SourceSamples2D {
                edges_n: s.edges_n,
                nodes_n: s.nodes_n,
                edges_half: s.edges_half,
                nodes_half: s.nodes_half,
                edges_full: s.edges_full,
                nodes_full: s.nodes_full,
                center_n: recon2d_eval(&d, 0.0, 0.0),
            });
            assert!(
                (quad - avg).abs() <= 1e-12 * avg.abs().max(1.0),
                "quadrature {quad} vs exact {avg}"
            );
        }
        let mut a = [0.0; 25];
        a[0] = 2.5;
        assert_eq!(spacetime_poly_oracle_2d(&a, dx, dy, dt).0, 2.5);
        a[0] = 0.0;
        a[4] = 1.0; // x^2 term
        assert!((spacetime_poly_oracle_2d(&a, dx, dy, dt).0 - dx * dx / 12.0).abs() < 1e-17);
    }

    #[test]
    fn run_scenario_t_zero_is_identity() {
        let mut sc = advection_scenario();
        sc.t_end = 0.0;
        let run = run_scenario(&sc).unwrap();
        let grid = Grid1D::new(sc.x_min, sc.x_max, sc.n_cells).unwrap();
        let initial = build_initial_1d(&sc, &grid).unwrap();
        assert_eq!(run.steps, 0);
        for i in 0..sc.n_cells {
            assert_eq!(run.field.avg(0, i), initial.avg(0, i));
        }
    }

    #[test]
    fn run_scenario_deterministic() {
        let sc = advection_scenario();
        let a = run_scenario(&sc).unwrap();
        let b = run_scenario(&sc).unwrap();
        for i in 0..=sc.n_cells {
            assert_eq!(a.field.point(0, i).to_bits(), b.field.point(0, i).to_bits());
        }
        assert_eq!(a.t, b.t);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let mut sc = advection_scenario();
        sc.cfl = 1.5;
        assert!(run_scenario(&sc).is_err());
        let mut sc = advection_scenario();
        sc.window = (-2.0, 1.0);
        assert!(matches!(
            run_scenario(&sc),
            Err(AfError::Scenario { .. })
        ));
    }

    #[test]
    fn small_convergence_study() {
        // coarse three-level sweep; the full sweep lives in the
        // acceptance suite
        let sc = advection_scenario();
        let report = convergence_study_1d(&sc, &[30, 60, 120]).unwrap();
        assert_eq!(report.rows.len(), 3);
        let last = report.rows[2].eoc.unwrap();
        assert!((2.2..=3.8).contains(&last), "EOC {last}");
    }

    #[test]
    fn csv_outputs() {
        let dir = std::env::temp_dir().join("actiflux_harness_test");
        std::fs::create_dir_all(&dir).unwrap();
        let sc = advection_scenario();
        let run = run_scenario(&sc).unwrap();
        let snap = dir.join("snap.csv");
        write_snapshot_1d(&snap, &run.grid, &run.field).unwrap();
        let text = std::fs::read_to_string(&snap).unwrap();
        assert!(text.starts_with("x,q_avg\n"));
        assert_eq!(text.lines().count(), sc.n_cells + 1);

        let report = ErrorReport {
            rows: vec![ErrorRow {
                n_cells: 50,
                dx: 0.02,
                l1_avg: 1e-3,
                l1_point: 2e-3,
                linf_point: 5e-3,
                eoc: None,
            }],
        };
        let errs = dir.join("errors.csv");
        write_errors(&errs, &report).unwrap();
        let text = std::fs::read_to_string(&errs).unwrap();
        assert!(text.starts_with("n_cells,dx,l1_avg,l1_point,linf_point,eoc\n"));
        assert!(text.contains("50,0.02,0.001,0.002,0.005,"));
    }
}
