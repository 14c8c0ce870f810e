//! Flux and source quadratures, CFL time-step selection and the full
//! Active Flux time step.
//!
//! A step runs in phases: (1) evolve every point value to t + dt/2 and
//! t + dt from the frozen reconstruction of the input field, (2) Simpson
//! flux quadrature in time (tensor Simpson in space-time on 2D edges),
//! (3) source quadrature per cell, (4) conservative average update. The
//! input field is immutable throughout; fresh buffers are returned.

use crate::equations::{Advection2DSpec, LinearSystem1D};
use crate::error::{AfError, Result};
use crate::evolution::{evolve_point_1d, evolve_point_2d, EvolutionMode, PointLoc2D, Rk2Options};
use crate::grid::{BoundaryRule, Field1D, Field2D, Grid1D, Grid2D};
use crate::reconstruction::{cell_dofs_1d, cell_dofs_2d, recon1d_midpoint, recon2d_eval};

/// Step configuration: evolution operator, RK2 options.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub mode: EvolutionMode,
    pub rk2: Rk2Options,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            mode: EvolutionMode::Rk2,
            rk2: Rk2Options::default(),
        }
    }
}

/// CFL time step `dt = cfl * l_min / lambda_max`, with `l_min = dx` in 1D
/// and `l_min = min(dx, dy)/2` in 2D.
pub fn cfl_dt(l_min: f64, lambda_max: f64, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(AfError::Parameter(format!("cfl must be in (0, 1], got {cfl}")));
    }
    if lambda_max <= 0.0 {
        return Err(AfError::NoWaveSpeed);
    }
    Ok(cfl * l_min / lambda_max)
}

pub fn l_min_1d(grid: &Grid1D) -> f64 {
    grid.dx
}

pub fn l_min_2d(grid: &Grid2D) -> f64 {
    0.5 * grid.dx.min(grid.dy)
}

/// Simpson's rule in time for the interface flux:
/// `(f(q^n) + 4 f(q^{n+1/2}) + f(q^{n+1})) / 6` componentwise.
pub fn flux_quadrature_time(
    q_n: &[f64],
    q_half: &[f64],
    q_full: &[f64],
    flux: &dyn Fn(&[f64], &mut [f64]),
    out: &mut [f64],
) {
    let m = q_n.len();
    let mut f = vec![0.0; m];
    flux(q_n, &mut f);
    for k in 0..m {
        out[k] = f[k];
    }
    flux(q_half, &mut f);
    for k in 0..m {
        out[k] += 4.0 * f[k];
    }
    flux(q_full, &mut f);
    for k in 0..m {
        out[k] = (out[k] + f[k]) / 6.0;
    }
}

/// Space-time Simpson rule on a 2D edge. `values[s][t]` holds the point
/// values in spatial order {node-, edge-mid, node+} and time order
/// {n, n+1/2, n+1}; the result is `normal_speed` times the space-time
/// average of q over the edge and the step.
pub fn edge_flux_quadrature_2d(values: &[[f64; 3]; 3], normal_speed: f64) -> f64 {
    const W: [f64; 3] = [1.0, 4.0, 1.0];
    let mut s = 0.0;
    for (si, row) in values.iter().enumerate() {
        for (ti, v) in row.iter().enumerate() {
            s += W[si] * W[ti] * v;
        }
    }
    normal_speed * s / 36.0
}

/// The seven source samples of a 1D cell: the two interface values at the
/// three time levels plus the reconstruction midpoint value at t^n.
#[derive(Debug, Clone, Copy)]
pub struct SourceSamples1D {
    pub left_n: f64,
    pub right_n: f64,
    pub left_half: f64,
    pub right_half: f64,
    pub left_full: f64,
    pub right_full: f64,
    pub mid_n: f64,
}

/// Space-time source quadrature for one 1D cell; weights
/// (-3, -3 | 4, 4 | 1, 1 | 8)/12 on (interfaces t^n | t^{n+1/2} | t^{n+1} |
/// midpoint). Exact for the degree-(2,2) space-time interpolation ansatz.
pub fn source_quadrature_1d(s: &SourceSamples1D) -> f64 {
    (s.left_full + s.right_full + 4.0 * (s.left_half + s.right_half)
        - 3.0 * (s.left_n + s.right_n)
        + 8.0 * s.mid_n)
        / 12.0
}

/// Source samples of a 2D cell: 4 edge midpoints and 4 nodes at each time
/// level, plus the reconstruction center value at t^n.
#[derive(Debug, Clone, Copy)]
pub struct SourceSamples2D {
    pub edges_n: [f64; 4],
    pub nodes_n: [f64; 4],
    pub edges_half: [f64; 4],
    pub nodes_half: [f64; 4],
    pub edges_full: [f64; 4],
    pub nodes_full: [f64; 4],
    pub center_n: f64,
}

/// 2D space-time source quadrature with weights (/72): center 32; t^n edges
/// -12, nodes 7; t^{n+1/2} edges 16, nodes -4; t^{n+1} edges 4, nodes -1.
pub fn source_quadrature_2d(s: &SourceSamples2D) -> f64 {
    let sum = |a: &[f64; 4]| a[0] + a[1] + a[2] + a[3];
    (32.0 * s.center_n - 12.0 * sum(&s.edges_n) + 7.0 * sum(&s.nodes_n)
        + 16.0 * sum(&s.edges_half)
        - 4.0 * sum(&s.nodes_half)
        + 4.0 * sum(&s.edges_full)
        - sum(&s.nodes_full))
        / 72.0
}

/// One Active Flux step for a 1D system. Returns the field at t^{n+1}.
pub fn step_1d(
    grid: &Grid1D,
    field: &Field1D,
    rule: BoundaryRule,
    system: &LinearSystem1D,
    opts: StepOptions,
    dt: f64,
) -> Result<Field1D> {
    let m = system.m;
    let n = grid.n_cells;
    let lam = system.lambda_max();
    if lam > 0.0 {
        let max_dt = grid.dx / lam;
        if dt > max_dt * (1.0 + 1e-12) {
            return Err(AfError::CflViolation { dt, max_dt });
        }
    }

    // phase 1: evolve all point values from the frozen t^n reconstruction
    let mut points_half = vec![0.0; m * (n + 1)];
    let mut points_full = vec![0.0; m * (n + 1)];
    for iface in 0..=n {
        let half = evolve_point_1d(grid, field, rule, system, iface, opts.mode, opts.rk2, 0.5 * dt)?;
        let full = evolve_point_1d(grid, field, rule, system, iface, opts.mode, opts.rk2, dt)?;
        for k in 0..m {
            points_half[k * (n + 1) + iface] = half[k];
            points_full[k * (n + 1) + iface] = full[k];
        }
    }
    if rule == BoundaryRule::Periodic {
        // first and last slot alias the same interface
        for k in 0..m {
            debug_assert!(
                (points_full[k * (n + 1)] - points_full[k * (n + 1) + n]).abs()
                    <= 1e-11 * (1.0 + points_full[k * (n + 1)].abs()),
                "periodic point identification broken"
            );
            points_half[k * (n + 1) + n] = points_half[k * (n + 1)];
            points_full[k * (n + 1) + n] = points_full[k * (n + 1)];
        }
    }

    // phase 2: Simpson-in-time interface fluxes
    let mut fluxes = vec![0.0; m * (n + 1)];
    let mut q_n = vec![0.0; m];
    let mut q_h = vec![0.0; m];
    let mut q_f = vec![0.0; m];
    let mut fhat = vec![0.0; m];
    for iface in 0..=n {
        for k in 0..m {
            q_n[k] = field.point(k, iface);
            q_h[k] = points_half[k * (n + 1) + iface];
            q_f[k] = points_full[k * (n + 1) + iface];
        }
        flux_quadrature_time(&q_n, &q_h, &q_f, &system.flux_conserved, &mut fhat);
        for k in 0..m {
            fluxes[k * (n + 1) + iface] = fhat[k];
        }
    }

    // phases 3-4: source quadrature and conservative average update
    let mut next = Field1D::zeros(m, n);
    let mut state = vec![0.0; m];
    let mut src = vec![0.0; m];
    // source values at the 7 sample states of the current cell
    let mut s_samples = vec![[0.0f64; 7]; m];
    for i in 0..n {
        // sample states in order: left_n, right_n, left_half, right_half,
        // left_full, right_full, mid_n
        let getters: [&dyn Fn(usize) -> f64; 7] = [
            &|k| field.point(k, i),
            &|k| field.point(k, i + 1),
            &|k| points_half[k * (n + 1) + i],
            &|k| points_half[k * (n + 1) + i + 1],
            &|k| points_full[k * (n + 1) + i],
            &|k| points_full[k * (n + 1) + i + 1],
            &|k| {
                let (avg, ql, qr) = cell_dofs_1d(grid, field, rule, k, i as i64);
                recon1d_midpoint(avg, ql, qr)
            },
        ];
        for (col, getter) in getters.into_iter().enumerate() {
            for (k, sk) in state.iter_mut().enumerate() {
                *sk = getter(k);
            }
            (system.source_conserved)(&state, &mut src);
            for k in 0..m {
                s_samples[k][col] = src[k];
            }
        }

        for k in 0..m {
            let s = &s_samples[k];
            let shat = source_quadrature_1d(&SourceSamples1D {
                left_n: s[0],
                right_n: s[1],
                left_half: s[2],
                right_half: s[3],
                left_full: s[4],
                right_full: s[5],
                mid_n: s[6],
            });
            let div = (fluxes[k * (n + 1) + i + 1] - fluxes[k * (n + 1) + i]) / grid.dx;
            next.set_avg(k, i, field.avg(k, i) - dt * div + dt * shat);
        }
    }
    for k in 0..m {
        for iface in 0..=n {
            next.set_point(k, iface, points_full[k * (n + 1) + iface]);
        }
    }
    Ok(next)
}

/// One Active Flux step for 2D scalar advection with a source.
pub fn step_2d(
    grid: &Grid2D,
    field: &Field2D,
    rule: BoundaryRule,
    spec: &Advection2DSpec,
    opts: StepOptions,
    dt: f64,
) -> Result<Field2D> {
    let (nx, ny) = (grid.n_x, grid.n_y);
    let lam = spec.u[0].abs().max(spec.u[1].abs());
    if lam > 0.0 {
        let max_dt = l_min_2d(grid) / lam;
        if dt > max_dt * (1.0 + 1e-12) {
            return Err(AfError::CflViolation { dt, max_dt });
        }
    }

    // phase 1: evolve every point DoF at dt/2 and dt
    let mut half = Field2D::zeros(nx, ny);
    let mut full = Field2D::zeros(nx, ny);
    let evolve = |loc: PointLoc2D, t: f64| -> Result<f64> {
        evolve_point_2d(grid, field, rule, spec, loc, opts.mode, opts.rk2, t)
    };
    for j in 0..=ny {
        for i in 0..=nx {
            let loc = PointLoc2D::Node { i, j };
            let vh = evolve(loc, 0.5 * dt)?;
            let vf = evolve(loc, dt)?;
            half.set_node(i, j, vh);
            full.set_node(i, j, vf);
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            let loc = PointLoc2D::EdgeV { i, j };
            let vh = evolve(loc, 0.5 * dt)?;
            let vf = evolve(loc, dt)?;
            half.set_edge_v(i, j, vh);
            full.set_edge_v(i, j, vf);
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let loc = PointLoc2D::EdgeH { i, j };
            let vh = evolve(loc, 0.5 * dt)?;
            let vf = evolve(loc, dt)?;
            half.set_edge_h(i, j, vh);
            full.set_edge_h(i, j, vf);
        }
    }
    if rule == BoundaryRule::Periodic {
        // identify opposite boundary slots
        for f in [&mut half, &mut full] {
            for j in 0..=ny {
                let v = f.node(0, j);
                f.set_node(nx, j, v);
            }
            for i in 0..=nx {
                let v = f.node(i, 0);
                f.set_node(i, ny, v);
            }
            for j in 0..ny {
                let v = f.edge_v(0, j);
                f.set_edge_v(nx, j, v);
            }
            for i in 0..nx {
                let v = f.edge_h(i, 0);
                f.set_edge_h(i, ny, v);
            }
        }
    }

    // phase 2: space-time Simpson edge fluxes
    // vertical edges carry U_x, horizontal edges U_y
    let mut flux_v = vec![0.0; (nx + 1) * ny];
    for j in 0..ny {
        for i in 0..=nx {
            let vals = [
                [field.node(i, j), half.node(i, j), full.node(i, j)],
                [field.edge_v(i, j), half.edge_v(i, j), full.edge_v(i, j)],
                [
                    field.node(i, j + 1),
                    half.node(i, j + 1),
                    full.node(i, j + 1),
                ],
            ];
            flux_v[i + (nx + 1) * j] = edge_flux_quadrature_2d(&vals, spec.u[0]);
        }
    }
    let mut flux_h = vec![0.0; nx * (ny + 1)];
    for j in 0..=ny {
        for i in 0..nx {
            let vals = [
                [field.node(i, j), half.node(i, j), full.node(i, j)],
                [field.edge_h(i, j), half.edge_h(i, j), full.edge_h(i, j)],
                [
                    field.node(i + 1, j),
                    half.node(i + 1, j),
                    full.node(i + 1, j),
                ],
            ];
            flux_h[i + nx * j] = edge_flux_quadrature_2d(&vals, spec.u[1]);
        }
    }

    // phases 3-4
    let mut next = Field2D::zeros(nx, ny);
    let s = |q: f64| spec.source.eval(q);
    for j in 0..ny {
        for i in 0..nx {
            let d = cell_dofs_2d(grid, field, rule, i as i64, j as i64);
            let center = recon2d_eval(&d, 0.0, 0.0);
            let samples = SourceSamples2D {
                edges_n: [s(d.w), s(d.e), s(d.s), s(d.n)],
                nodes_n: [s(d.sw), s(d.se), s(d.nw), s(d.ne)],
                edges_half: [
                    s(half.edge_v(i, j)),
                    s(half.edge_v(i + 1, j)),
                    s(half.edge_h(i, j)),
                    s(half.edge_h(i, j + 1)),
                ],
                nodes_half: [
                    s(half.node(i, j)),
                    s(half.node(i + 1, j)),
                    s(half.node(i, j + 1)),
                    s(half.node(i + 1, j + 1)),
                ],
                edges_full: [
                    s(full.edge_v(i, j)),
                    s(full.edge_v(i + 1, j)),
                    s(full.edge_h(i, j)),
                    s(full.edge_h(i, j + 1)),
                ],
                nodes_full: [
                    s(full.node(i, j)),
                    s(full.node(i + 1, j)),
                    s(full.node(i, j + 1)),
                    s(full.node(i + 1, j + 1)),
                ],
                center_n: s(center),
            };
            let shat = source_quadrature_2d(&samples);
            let div_x = (flux_v[i + 1 + (nx + 1) * j] - flux_v[i + (nx + 1) * j]) / grid.dx;
            let div_y = (flux_h[i + nx * (j + 1)] - flux_h[i + nx * j]) / grid.dy;
            next.set_avg(i, j, field.avg(i, j) - dt * (div_x + div_y) + dt * shat);
        }
    }
    next.nodes = full.nodes;
    next.edges_v = full.edges_v;
    next.edges_h = full.edges_h;
    Ok(next)
}
