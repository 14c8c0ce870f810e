//! Cell-local polynomial reconstruction.
//!
//! 1D: the parabola interpolating the two interface point values whose cell
//! average matches the given one. 2D: the unique biparabolic polynomial
//! through the 9 cell DoFs. Both are globally continuous (but in general not
//! continuously differentiable) across interfaces.

use crate::error::Result;
use crate::grid::{BoundaryRule, Field1D, Field2D, Grid1D, Grid2D};

/// Evaluate the cell parabola at `xi = (x - x_i)/dx`, `xi` in [-1/2, 1/2].
#[inline]
pub fn recon1d_eval(q_avg: f64, q_left: f64, q_right: f64, xi: f64) -> f64 {
    -3.0 * (2.0 * q_avg - q_left - q_right) * xi * xi
        + (q_right - q_left) * xi
        + (6.0 * q_avg - q_left - q_right) * 0.25
}

/// Reconstruction value at the cell midpoint, `(6 q_avg - qL - qR)/4`.
#[inline]
pub fn recon1d_midpoint(q_avg: f64, q_left: f64, q_right: f64) -> f64 {
    (6.0 * q_avg - q_left - q_right) * 0.25
}

/// The 9 DoFs of a 2D cell, in the compass naming of the reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct CellDofs2D {
    pub avg: f64,
    pub w: f64,
    pub e: f64,
    pub s: f64,
    pub n: f64,
    pub sw: f64,
    pub se: f64,
    pub nw: f64,
    pub ne: f64,
}

/// Evaluate the biparabolic reconstruction at `(xi, eta)` in [-1/2, 1/2]^2.
pub fn recon2d_eval(d: &CellDofs2D, xi: f64, eta: f64) -> f64 {
    let x2 = xi * xi;
    let e2 = eta * eta;
    2.25 * d.avg * (-1.0 + 4.0 * x2) * (-1.0 + 4.0 * e2)
        - 0.25 * d.w * (-1.0 - 4.0 * xi + 12.0 * x2) * (-1.0 + 4.0 * e2)
        - 0.25 * d.e * (-1.0 + 4.0 * xi + 12.0 * x2) * (-1.0 + 4.0 * e2)
        - 0.25 * d.s * (-1.0 + 4.0 * x2) * (-1.0 - 4.0 * eta + 12.0 * e2)
        - 0.25 * d.n * (-1.0 + 4.0 * x2) * (-1.0 + 4.0 * eta + 12.0 * e2)
        + d.sw / 16.0
            * (-1.0 + 2.0 * xi)
            * (-1.0 + 2.0 * eta)
            * (-1.0 - 2.0 * eta + 2.0 * xi * (-1.0 + 6.0 * eta))
        + d.se / 16.0
            * (1.0 + 2.0 * xi)
            * (-1.0 + 2.0 * eta)
            * (1.0 + 2.0 * eta + 2.0 * xi * (-1.0 + 6.0 * eta))
        + d.nw / 16.0
            * (-1.0 + 2.0 * xi)
            * (1.0 + 2.0 * eta)
            * (1.0 - 2.0 * eta + 2.0 * xi * (1.0 + 6.0 * eta))
        + d.ne / 16.0
            * (1.0 + 2.0 * xi)
            * (1.0 + 2.0 * eta)
            * (-1.0 + 2.0 * eta + 2.0 * xi * (1.0 + 6.0 * eta))
}

/// Gather the 3 DoFs of (possibly ghost) cell `i` under the boundary rule.
pub fn cell_dofs_1d(
    grid: &Grid1D,
    field: &Field1D,
    rule: BoundaryRule,
    var: usize,
    i: i64,
) -> (f64, f64, f64) {
    let avg = field.avg(var, grid.resolve_avg(rule, i));
    let ql = field.point(var, grid.resolve_point(rule, i));
    let qr = field.point(var, grid.resolve_point(rule, i + 1));
    (avg, ql, qr)
}

/// Evaluate the global piecewise reconstruction of variable `var` at `x`.
pub fn global_eval_1d(
    grid: &Grid1D,
    field: &Field1D,
    rule: BoundaryRule,
    var: usize,
    x: f64,
) -> Result<f64> {
    let i = grid.locate_cell(x)?;
    let (avg, ql, qr) = cell_dofs_1d(grid, field, rule, var, i);
    let xi = (x - grid.cell_center(i)) / grid.dx;
    Ok(recon1d_eval(avg, ql, qr, xi))
}

/// Gather the 9 DoFs of (possibly ghost) cell `(i, j)`.
pub fn cell_dofs_2d(
    grid: &Grid2D,
    field: &Field2D,
    rule: BoundaryRule,
    i: i64,
    j: i64,
) -> CellDofs2D {
    let ai = grid.resolve_avg_x(rule, i);
    let aj = grid.resolve_avg_y(rule, j);
    let pi = grid.resolve_point_x(rule, i);
    let pi1 = grid.resolve_point_x(rule, i + 1);
    let pj = grid.resolve_point_y(rule, j);
    let pj1 = grid.resolve_point_y(rule, j + 1);
    CellDofs2D {
        avg: field.avg(ai, aj),
        w: field.edge_v(pi, aj),
        e: field.edge_v(pi1, aj),
        s: field.edge_h(ai, pj),
        n: field.edge_h(ai, pj1),
        sw: field.node(pi, pj),
        se: field.node(pi1, pj),
        nw: field.node(pi, pj1),
        ne: field.node(pi1, pj1),
    }
}

pub fn global_eval_2d(
    grid: &Grid2D,
    field: &Field2D,
    rule: BoundaryRule,
    x: f64,
    y: f64,
) -> Result<f64> {
    let (i, j) = grid.locate_cell(x, y)?;
    let d = cell_dofs_2d(grid, field, rule, i, j);
    let (xc, yc) = grid.cell_center(i, j);
    let xi = (x - xc) / grid.dx;
    let eta = (y - yc) / grid.dy;
    Ok(recon2d_eval(&d, xi, eta))
}
