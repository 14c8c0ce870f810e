//! Hydrostatic initial data for acoustics with gravity and discrete
//! equilibrium diagnostics.
//!
//! A hydrostatic state has v = 0 and dp/dx = g rho. On the discrete level
//! the scheme keeps data exactly stationary when three finite-difference
//! relations between the point values and averages hold; see
//! [`hydrostatic_residual`]. The parabolic pressure profile satisfies them
//! to round-off; the isentropic atmosphere does not, and the scheme
//! relaxes it to a nearby discrete equilibrium.

use crate::error::{AfError, Result};
use crate::grid::{gauss5_average, Field1D, Grid1D};

/// Hydrostatic state with parabolic pressure: `p = A1 x^2 + A2 x + A3`,
/// `rho = (2 A1 x + A2)/g`, `v = 0`. Averages are analytic: the average of
/// a parabola over a cell is its center value plus `A1 dx^2 / 12`, and rho
/// is linear so its average is the center value. Variables are ordered
/// (rho, v, p).
pub fn init_parabola(grid: &Grid1D, a1: f64, a2: f64, a3: f64, g: f64) -> Result<Field1D> {
    if g == 0.0 {
        return Err(AfError::Parameter(
            "hydrostatic data requires g != 0".into(),
        ));
    }
    let mut field = Field1D::zeros(3, grid.n_cells);
    let p = |x: f64| a1 * x * x + a2 * x + a3;
    let rho = |x: f64| (2.0 * a1 * x + a2) / g;
    for i in 0..=grid.n_cells {
        let x = grid.interface(i as i64);
        field.set_point(0, i, rho(x));
        field.set_point(2, i, p(x));
    }
    for i in 0..grid.n_cells {
        let xc = grid.cell_center(i as i64);
        field.set_avg(0, i, rho(xc));
        field.set_avg(2, i, p(xc) + a1 * grid.dx * grid.dx / 12.0);
    }
    Ok(field)
}

/// Hydrostatic state reminiscent of an isentropic atmosphere:
/// `rho = (g (gamma-1) x / (K gamma) + rho0^(gamma-1))^(1/(gamma-1))`,
/// `p = K rho^gamma`, `v = 0`. Point values are sampled; averages use
/// 5-point Gauss per cell (no closed form). Errors if the radicand is not
/// positive somewhere on the grid (atmosphere cutoff inside the domain).
pub fn init_isentropic(grid: &Grid1D, k: f64, gamma: f64, rho0: f64, g: f64) -> Result<Field1D> {
    if !(k > 0.0 && gamma > 1.0 && rho0 > 0.0) {
        return Err(AfError::Parameter(format!(
            "need K > 0, gamma > 1, rho0 > 0; got K={k}, gamma={gamma}, rho0={rho0}"
        )));
    }
    let base = rho0.powf(gamma - 1.0);
    let slope = g * (gamma - 1.0) / (k * gamma);
    let radicand = |x: f64| slope * x + base;
    // the radicand is affine in x: checking the two domain ends suffices
    for x in [grid.x_min, grid.x_max] {
        let r = radicand(x);
        if r <= 0.0 {
            return Err(AfError::BlowUp { radicand: r });
        }
    }
    let rho = |x: f64| radicand(x).powf(1.0 / (gamma - 1.0));
    let p = |x: f64| k * rho(x).powf(gamma);
    let mut field = Field1D::zeros(3, grid.n_cells);
    field.fill_from(grid, 0, rho);
    field.fill_from(grid, 2, p);
    Ok(field)
}

/// Adds `amplitude * exp(-width_coeff x^2)` to the pressure point values,
/// and to the pressure averages via 5-point Gauss per cell.
pub fn add_pressure_perturbation(
    grid: &Grid1D,
    field: &Field1D,
    amplitude: f64,
    width_coeff: f64,
) -> Field1D {
    let mut out = field.clone();
    let bump = |x: f64| amplitude * (-width_coeff * x * x).exp();
    for i in 0..=grid.n_cells {
        let x = grid.interface(i as i64);
        out.set_point(2, i, field.point(2, i) + bump(x));
    }
    for i in 0..grid.n_cells {
        let xc = grid.cell_center(i as i64);
        let avg_bump = gauss5_average(&bump, xc, grid.dx);
        out.set_avg(2, i, field.avg(2, i) + avg_bump);
    }
    out
}

/// Max norms over interior cells of the three discrete hydrostatic
/// residuals:
///
/// * `r0 = rho_avg_i - (rho_{i+1/2} + rho_{i-1/2})/2`
/// * `r1 = (p_{i+1/2} - p_{i-1/2})/dx - g (rho_{i-1/2} + rho_{i+1/2})/2`
/// * `r2 = (p_avg_{i+1} - p_avg_i)/dx
///        - g (rho_{i+3/2} + 4 rho_{i+1/2} + rho_{i-1/2})/6`
///
/// Data with all three at round-off stays exactly stationary under the
/// well-balanced step.
pub fn hydrostatic_residual(grid: &Grid1D, field: &Field1D, g: f64) -> (f64, f64, f64) {
    let n = grid.n_cells;
    let dx = grid.dx;
    let (mut r0, mut r1, mut r2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let rho_l = field.point(0, i);
        let rho_r = field.point(0, i + 1);
        let p_l = field.point(2, i);
        let p_r = field.point(2, i + 1);
        r0 = r0.max((field.avg(0, i) - 0.5 * (rho_l + rho_r)).abs());
        r1 = r1.max(((p_r - p_l) / dx - 0.5 * g * (rho_l + rho_r)).abs());
        if i + 1 < n {
            let rho_rr = field.point(0, i + 2);
            let v = (field.avg(2, i + 1) - field.avg(2, i)) / dx
                - g * (rho_rr + 4.0 * rho_r + rho_l) / 6.0;
            r2 = r2.max(v.abs());
        }
    }
    (r0, r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{make_acoustics_gravity, AcousticsParams};
    use crate::evolution::{wb_correction, EvolutionMode, Rk2Options};
    use crate::grid::BoundaryRule;
    use crate::update::{step_1d, StepOptions};

    #[test]
    fn parabola_is_discretely_hydrostatic() {
        let grid = Grid1D::new(-1.0, 2.0, 60).unwrap();
        let field = init_parabola(&grid, 17.0, -3.0, 1.0, -1.0).unwrap();
        let (r0, r1, r2) = hydrostatic_residual(&grid, &field, -1.0);
        assert!(r0 <= 1e-13, "r0 = {r0}");
        assert!(r1 <= 1e-12, "r1 = {r1}");
        assert!(r2 <= 1e-12, "r2 = {r2}");
        assert!(init_parabola(&grid, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn linear_pressure_case() {
        // A1 = 0: constant rho, linear p
        let grid = Grid1D::new(0.0, 1.0, 25).unwrap();
        let field = init_parabola(&grid, 0.0, 2.0, 5.0, -4.0).unwrap();
        for i in 0..25 {
            assert_eq!(field.avg(0, i), -0.5);
        }
        let (r0, r1, r2) = hydrostatic_residual(&grid, &field, -4.0);
        assert!(r0.max(r1).max(r2) <= 1e-13);
    }

    #[test]
    fn constant_pressure_is_not_hydrostatic() {
        let grid = Grid1D::new(0.0, 1.0, 10).unwrap();
        let mut field = Field1D::zeros(3, 10);
        field.fill_from(&grid, 0, |_| 2.0);
        field.fill_from(&grid, 2, |_| 1.0);
        let g = -3.0;
        let (r0, r1, r2) = hydrostatic_residual(&grid, &field, g);
        assert_eq!(r0, 0.0);
        assert!((r1 - (g * 2.0).abs()).abs() < 1e-14);
        assert!((r2 - (g * 2.0).abs()).abs() < 1e-14);
        // g = 0, constant everything: all residuals vanish
        let (r0, r1, r2) = hydrostatic_residual(&grid, &field, 0.0);
        assert_eq!((r0, r1, r2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn isentropic_anchor_and_residuals() {
        let grid = Grid1D::new(-5.5, 5.5, 110).unwrap();
        let field = init_isentropic(&grid, 1.0, 1.4, 100.0, -1.0).unwrap();
        // x = 0 is interface 55; rho there is exactly rho0
        assert!((field.point(0, 55) - 100.0).abs() < 1e-10);
        assert!((field.point(2, 55) - 100.0f64.powf(1.4)).abs() < 3e-8);
        // not discretely stationary, but close
        let (r0, r1, r2) = hydrostatic_residual(&grid, &field, -1.0);
        assert!(r0 > 0.0 && r1 > 0.0 && r2 > 0.0);
        assert!(r0 < 1e-2 && r1 < 1e-2 && r2 < 1e-2);
        // atmosphere cutoff inside the domain is rejected: rho -> 0 at
        // x = K gamma rho0^(gamma-1) / (g (gamma-1)) for g < 0
        let wide = Grid1D::new(-10.0, 30.0, 40).unwrap();
        assert!(matches!(
            init_isentropic(&wide, 1.0, 1.4, 1.0, -1.0),
            Err(AfError::BlowUp { .. })
        ));
    }

    #[test]
    fn perturbation_examples() {
        let grid = Grid1D::new(-5.5, 5.5, 110).unwrap();
        let field = init_isentropic(&grid, 1.0, 1.4, 100.0, -1.0).unwrap();
        let same = add_pressure_perturbation(&grid, &field, 0.0, 100.0);
        for i in 0..=110 {
            assert_eq!(same.point(2, i), field.point(2, i));
        }
        let bumped = add_pressure_perturbation(&grid, &field, 200.0, 100.0);
        // interface at x = 0 gains the full amplitude
        assert!((bumped.point(2, 55) - field.point(2, 55) - 200.0).abs() < 1e-12);
        // rho and v untouched
        for i in 0..=110 {
            assert_eq!(bumped.point(0, i), field.point(0, i));
            assert_eq!(bumped.point(1, i), field.point(1, i));
        }
        // support well inside |x| < 3: at x = 3 the bump is below round-off
        assert!((bumped.point(2, 85) - field.point(2, 85)).abs() < 1e-300 * 200.0 + 1e-13);
    }

    #[test]
    fn stationarity_with_and_without_correction() {
        let g = -1.0;
        let grid = Grid1D::new(-1.0, 2.0, 300).unwrap();
        let field = init_parabola(&grid, 17.0, -3.0, 1.0, g).unwrap();
        let sys = make_acoustics_gravity(AcousticsParams { c: 1.0, g }).unwrap();
        let dt = 0.9 * grid.dx;
        let run = |wb: bool| {
            step_1d(
                &grid,
                &field,
                BoundaryRule::Copy,
                &sys,
                StepOptions {
                    mode: EvolutionMode::Rk2,
                    rk2: Rk2Options {
                        alpha: 0.5,
                        well_balanced: wb,
                    },
                },
                dt,
            )
            .unwrap()
        };
        let fixed = run(true);
        let mut max_change = 0.0f64;
        for i in 30..270 {
            max_change = max_change.max((fixed.avg(0, i) - field.avg(0, i)).abs());
            max_change = max_change.max((fixed.avg(2, i) - field.avg(2, i)).abs());
            max_change = max_change.max(fixed.avg(1, i).abs());
            max_change = max_change.max(fixed.point(1, i).abs());
        }
        assert!(max_change <= 1e-13, "well-balanced drift {max_change}");

        // without the correction the velocity error after one step matches
        // (alpha g^2 / 4) |d rho/dx| dt^3 within a factor of 2
        let plain = run(false);
        let mut max_v = 0.0f64;
        for i in 30..270 {
            max_v = max_v.max(plain.point(1, i).abs());
        }
        let drho_dx = (2.0 * 17.0 / g).abs();
        let predicted = wb_correction(0.5, g, 1.0, drho_dx, 0.0, dt).abs();
        assert!(
            max_v >= predicted / 2.0 && max_v <= predicted * 2.0,
            "max |v| = {max_v}, predicted {predicted}"
        );
    }
}
