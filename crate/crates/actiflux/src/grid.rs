//! Uniform Cartesian grids and the Active Flux degree-of-freedom layout.
//!
//! In 1D every cell carries one average and shares a point value with each
//! neighbour at the interface. In 2D a cell sees 9 DoFs: its average, the
//! four edge midpoints and the four nodes. Interface/edge/node values are
//! stored exactly once; under periodic boundaries the first and last slot
//! along an axis alias each other and are kept equal after every step.

use crate::error::{AfError, Result};

/// How indices beyond the boundary are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Wrap modulo the cell count; first and last point slot alias.
    Periodic,
    /// Zeroth-order extrapolation: clamp to the nearest valid index.
    Copy,
}

#[derive(Debug, Clone)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(AfError::Parameter(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_cells < 3 {
            return Err(AfError::Parameter(format!(
                "n_cells must be >= 3, got {n_cells}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx,
        })
    }

    /// Center of cell `i` (raw index, may point into the ghost region).
    pub fn cell_center(&self, i: i64) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Position of interface `i` (point value slot `i`, 0..=n_cells).
    pub fn interface(&self, i: i64) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// Cell containing `x`, allowing one ghost layer on each side.
    ///
    /// If `x` lies exactly on an interface the left cell is returned; the
    /// reconstruction is continuous there, so the value is unaffected.
    pub fn locate_cell(&self, x: f64) -> Result<i64> {
        let lo = self.x_min - self.dx;
        let hi = self.x_max + self.dx;
        if !(x >= lo && x <= hi) {
            return Err(AfError::OutOfRange { x, lo, hi });
        }
        let r = (x - self.x_min) / self.dx;
        let mut i = r.floor() as i64;
        if i as f64 == r {
            // exact interface: left tie-break
            i -= 1;
        }
        i = i.clamp(-1, self.n_cells as i64);
        Ok(i)
    }

    /// Resolve a raw average index to a storage index.
    pub fn resolve_avg(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_cells, self.n_cells)
    }

    /// Resolve a raw point (interface) index to a storage index.
    ///
    /// Under periodicity the period is `n_cells`: point 0 and point
    /// `n_cells` alias the same interface.
    pub fn resolve_point(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_cells, self.n_cells + 1)
    }
}

#[derive(Debug, Clone)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        n_x: usize,
        n_y: usize,
    ) -> Result<Self> {
        if !(x_max > x_min && y_max > y_min) {
            return Err(AfError::Parameter("2D grid bounds degenerate".into()));
        }
        if n_x < 3 || n_y < 3 {
            return Err(AfError::Parameter(format!(
                "n_x, n_y must be >= 3, got {n_x} x {n_y}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            n_x,
            n_y,
            dx: (x_max - x_min) / n_x as f64,
            dy: (y_max - y_min) / n_y as f64,
        })
    }

    pub fn cell_center(&self, i: i64, j: i64) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx,
            self.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Node position `(x_{i-1/2}, y_{j-1/2})` for node indices `(i, j)`.
    pub fn node(&self, i: i64, j: i64) -> (f64, f64) {
        (
            self.x_min + i as f64 * self.dx,
            self.y_min + j as f64 * self.dy,
        )
    }

    pub fn locate_cell(&self, x: f64, y: f64) -> Result<(i64, i64)> {
        let i = locate_axis(x, self.x_min, self.x_max, self.dx, self.n_x)?;
        let j = locate_axis(y, self.y_min, self.y_max, self.dy, self.n_y)?;
        Ok((i, j))
    }

    pub fn resolve_avg_x(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_x, self.n_x)
    }
    pub fn resolve_avg_y(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_y, self.n_y)
    }
    pub fn resolve_point_x(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_x, self.n_x + 1)
    }
    pub fn resolve_point_y(&self, rule: BoundaryRule, raw: i64) -> usize {
        resolve(rule, raw, self.n_y, self.n_y + 1)
    }
}

fn locate_axis(x: f64, lo_bound: f64, hi_bound: f64, d: f64, n: usize) -> Result<i64> {
    let lo = lo_bound - d;
    let hi = hi_bound + d;
    if !(x >= lo && x <= hi) {
        return Err(AfError::OutOfRange { x, lo, hi });
    }
    let r = (x - lo_bound) / d;
    let mut i = r.floor() as i64;
    if i as f64 == r {
        i -= 1;
    }
    Ok(i.clamp(-1, n as i64))
}

fn resolve(rule: BoundaryRule, raw: i64, period: usize, count: usize) -> usize {
    match rule {
        BoundaryRule::Periodic => raw.rem_euclid(period as i64) as usize,
        BoundaryRule::Copy => raw.clamp(0, count as i64 - 1) as usize,
    }
}

/// Active Flux state in 1D: `m` variables, cell averages plus shared
/// interface point values (interface `i+1/2` has global point index `i+1`).
#[derive(Debug, Clone)]
pub struct Field1D {
    pub m: usize,
    pub n_cells: usize,
    averages: Vec<f64>,
    points: Vec<f64>,
}

impl Field1D {
    pub fn zeros(m: usize, n_cells: usize) -> Self {
        Self {
            m,
            n_cells,
            averages: vec![0.0; m * n_cells],
            points: vec![0.0; m * (n_cells + 1)],
        }
    }

    #[inline]
    pub fn avg(&self, var: usize, i: usize) -> f64 {
        self.averages[var * self.n_cells + i]
    }
    #[inline]
    pub fn set_avg(&mut self, var: usize, i: usize, v: f64) {
        self.averages[var * self.n_cells + i] = v;
    }
    #[inline]
    pub fn point(&self, var: usize, i: usize) -> f64 {
        self.points[var * (self.n_cells + 1) + i]
    }
    #[inline]
    pub fn set_point(&mut self, var: usize, i: usize, v: f64) {
        self.points[var * (self.n_cells + 1) + i] = v;
    }

    pub fn averages(&self, var: usize) -> &[f64] {
        &self.averages[var * self.n_cells..(var + 1) * self.n_cells]
    }
    pub fn points(&self, var: usize) -> &[f64] {
        &self.points[var * (self.n_cells + 1)..(var + 1) * (self.n_cells + 1)]
    }

    /// Fill variable `var` from pointwise initial data `f`; averages are set
    /// to the analytic cell average of `f` via 5-point Gauss-Legendre.
    pub fn fill_from(&mut self, grid: &Grid1D, var: usize, f: impl Fn(f64) -> f64) {
        for i in 0..=self.n_cells {
            self.set_point(var, i, f(grid.interface(i as i64)));
        }
        for i in 0..self.n_cells {
            let xc = grid.cell_center(i as i64);
            self.set_avg(var, i, gauss5_average(&f, xc, grid.dx));
        }
    }
}

/// 5-point Gauss-Legendre average of `f` over a cell of width `dx`
/// centered at `xc`. Exact for polynomials up to degree 9.
pub fn gauss5_average(f: &impl Fn(f64) -> f64, xc: f64, dx: f64) -> f64 {
    const NODES: [f64; 5] = [
        -0.906179845938663992797626878299,
        -0.538469310105683091036314420700,
        0.0,
        0.538469310105683091036314420700,
        0.906179845938663992797626878299,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236926885056189087514264040720,
        0.478628670499366468041291514836,
        0.568888888888888888888888888889,
        0.478628670499366468041291514836,
        0.236926885056189087514264040720,
    ];
    let mut s = 0.0;
    for (z, w) in NODES.iter().zip(WEIGHTS) {
        s += w * f(xc + 0.5 * dx * z);
    }
    0.5 * s
}

/// Active Flux state in 2D for a single scalar variable.
#[derive(Debug, Clone)]
pub struct Field2D {
    pub n_x: usize,
    pub n_y: usize,
    /// cell averages, row-major `[i + n_x * j]`
    pub averages: Vec<f64>,
    /// node values, `(n_x+1) x (n_y+1)`, index `[i + (n_x+1) * j]`
    pub nodes: Vec<f64>,
    /// vertical-edge midpoints at `(x_{i-1/2}, y_j)`, `(n_x+1) x n_y`
    pub edges_v: Vec<f64>,
    /// horizontal-edge midpoints at `(x_i, y_{j-1/2})`, `n_x x (n_y+1)`
    pub edges_h: Vec<f64>,
}

impl Field2D {
    pub fn zeros(n_x: usize, n_y: usize) -> Self {
        Self {
            n_x,
            n_y,
            averages: vec![0.0; n_x * n_y],
            nodes: vec![0.0; (n_x + 1) * (n_y + 1)],
            edges_v: vec![0.0; (n_x + 1) * n_y],
            edges_h: vec![0.0; n_x * (n_y + 1)],
        }
    }

    #[inline]
    pub fn avg(&self, i: usize, j: usize) -> f64 {
        self.averages[i + self.n_x * j]
    }
    #[inline]
    pub fn set_avg(&mut self, i: usize, j: usize, v: f64) {
        self.averages[i + self.n_x * j] = v;
    }
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.nodes[i + (self.n_x + 1) * j]
    }
    #[inline]
    pub fn set_node(&mut self, i: usize, j: usize, v: f64) {
        self.nodes[i + (self.n_x + 1) * j] = v;
    }
    #[inline]
    pub fn edge_v(&self, i: usize, j: usize) -> f64 {
        self.edges_v[i + (self.n_x + 1) * j]
    }
    #[inline]
    pub fn set_edge_v(&mut self, i: usize, j: usize, v: f64) {
        self.edges_v[i + (self.n_x + 1) * j] = v;
    }
    #[inline]
    pub fn edge_h(&self, i: usize, j: usize) -> f64 {
        self.edges_h[i + self.n_x * j]
    }
    #[inline]
    pub fn set_edge_h(&mut self, i: usize, j: usize, v: f64) {
        self.edges_h[i + self.n_x * j] = v;
    }

    /// Fill from pointwise data; averages via tensor 5-point Gauss.
    pub fn fill_from(&mut self, grid: &Grid2D, f: impl Fn(f64, f64) -> f64) {
        for j in 0..=self.n_y {
            for i in 0..=self.n_x {
                let (x, y) = grid.node(i as i64, j as i64);
                self.set_node(i, j, f(x, y));
            }
        }
        for j in 0..self.n_y {
            let yc = grid.cell_center(0, j as i64).1;
            for i in 0..=self.n_x {
                let x = grid.node(i as i64, 0).0;
                self.set_edge_v(i, j, f(x, yc));
            }
        }
        for j in 0..=self.n_y {
            let y = grid.node(0, j as i64).1;
            for i in 0..self.n_x {
                let xc = grid.cell_center(i as i64, 0).0;
                self.set_edge_h(i, j, f(xc, y));
            }
        }
        for j in 0..self.n_y {
            for i in 0..self.n_x {
                let (xc, yc) = grid.cell_center(i as i64, j as i64);
                let row = |y: f64| gauss5_average(&|x| f(x, y), xc, grid.dx);
                self.set_avg(i, j, gauss5_average(&row, yc, grid.dy));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_cell_basics() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        assert_eq!(g.locate_cell(0.05).unwrap(), 0);
        // exact interface: left tie-break
        assert_eq!(g.locate_cell(0.1).unwrap(), 0);
        assert_eq!(g.locate_cell(0.999).unwrap(), 9);
        // ghost layer
        assert_eq!(g.locate_cell(-0.05).unwrap(), -1);
        assert_eq!(g.locate_cell(1.05).unwrap(), 10);
        assert!(g.locate_cell(1.2).is_err());
    }

    #[test]
    fn resolve_examples() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        assert_eq!(g.resolve_avg(BoundaryRule::Periodic, -1), 9);
        assert_eq!(g.resolve_avg(BoundaryRule::Copy, -1), 0);
        // interface identification: point 0 == point 10
        assert_eq!(g.resolve_point(BoundaryRule::Periodic, 11), 1);
        assert_eq!(g.resolve_point(BoundaryRule::Periodic, 10), 0);
        assert_eq!(g.resolve_point(BoundaryRule::Copy, 12), 10);
    }

    #[test]
    fn resolve_idempotent_on_valid_indices() {
        let g = Grid1D::new(-1.0, 2.0, 7).unwrap();
        for rule in [BoundaryRule::Periodic, BoundaryRule::Copy] {
            for i in 0..7i64 {
                let r = g.resolve_avg(rule, i);
                assert_eq!(r as i64, i);
                assert_eq!(g.resolve_avg(rule, r as i64), r);
            }
        }
    }

    #[test]
    fn field_shapes() {
        let f = Field1D::zeros(3, 10);
        assert_eq!(f.averages(1).len(), 10);
        assert_eq!(f.points(2).len(), 11);
        let f2 = Field2D::zeros(4, 5);
        assert_eq!(f2.averages.len(), 20);
        assert_eq!(f2.nodes.len(), 30);
        assert_eq!(f2.edges_v.len(), 25);
        assert_eq!(f2.edges_h.len(), 24);
    }

    #[test]
    fn gauss5_exact_for_parabola() {
        // average of x^2 over [xc-dx/2, xc+dx/2] = xc^2 + dx^2/12
        let avg = gauss5_average(&|x: f64| x * x, 0.3, 0.2);
        assert!((avg - (0.09 + 0.04 / 12.0)).abs() < 1e-15);
    }
}
