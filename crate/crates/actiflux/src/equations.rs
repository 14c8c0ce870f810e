//! Equation definitions: 1D linear systems in characteristic form and 2D
//! scalar advection, both with (possibly nonlinear) sources.

use crate::error::{AfError, Result};

/// Source term for scalar advection equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    None,
    /// s(q) = kappa * q
    Linear { kappa: f64 },
    /// s(q) = kappa * q^b, b != 1
    Power { kappa: f64, b: f64 },
}

impl SourceKind {
    pub fn eval(&self, q: f64) -> f64 {
        match *self {
            SourceKind::None => 0.0,
            SourceKind::Linear { kappa } => kappa * q,
            SourceKind::Power { kappa, b } => kappa * signed_pow(q, b),
        }
    }
}

/// q^b with the sign of q preserved for odd-behaving data. For integer b
/// this is the ordinary power; used so that small negative undershoots in
/// the numerical solution do not produce NaNs for fractional b.
fn signed_pow(q: f64, b: f64) -> f64 {
    if b == b.round() {
        q.powi(b as i32)
    } else {
        q.signum() * q.abs().powf(b)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AcousticsParams {
    /// sound speed, > 0
    pub c: f64,
    /// gravitational acceleration
    pub g: f64,
}

pub type StateFn = Box<dyn Fn(&[f64], &mut [f64]) + Sync + Send>;

/// A hyperbolic system whose homogeneous part is linear, given in
/// characteristic form: `(d_t + lambda_l d_x) Q_l = S_l(Q_1, ..., Q_m)`.
pub struct LinearSystem1D {
    pub m: usize,
    /// characteristic speeds lambda_l
    pub speeds: Vec<f64>,
    /// conserved -> characteristic map (matrix L, row-major m x m)
    pub to_char: Vec<f64>,
    /// characteristic -> conserved map (matrix R = L^-1, row-major)
    pub from_char: Vec<f64>,
    /// source in characteristic variables
    pub source_char: StateFn,
    /// physical flux f(q) in conserved variables
    pub flux_conserved: StateFn,
    /// source s(q) in conserved variables (used in the average update)
    pub source_conserved: StateFn,
    /// acoustics parameters when this system is acoustics with gravity
    pub acoustics: Option<AcousticsParams>,
    /// the scalar source for m = 1 advection systems (enables the exact
    /// evolution operator)
    pub scalar_source: Option<SourceKind>,
}

impl LinearSystem1D {
    pub fn lambda_max(&self) -> f64 {
        self.speeds.iter().fold(0.0, |a, s| a.max(s.abs()))
    }

    pub fn apply_to_char(&self, q: &[f64], out: &mut [f64]) {
        mat_vec(&self.to_char, self.m, q, out);
    }

    pub fn apply_from_char(&self, q: &[f64], out: &mut [f64]) {
        mat_vec(&self.from_char, self.m, q, out);
    }
}

pub fn mat_vec(mat: &[f64], m: usize, v: &[f64], out: &mut [f64]) {
    for i in 0..m {
        let mut s = 0.0;
        for j in 0..m {
            s += mat[i * m + j] * v[j];
        }
        out[i] = s;
    }
}

/// 1D scalar advection `d_t q + u d_x q = s(q)` as a one-component system.
pub fn make_advection_1d(u: f64, source: SourceKind) -> LinearSystem1D {
    let s_fn = move |q: &[f64], out: &mut [f64]| out[0] = source.eval(q[0]);
    LinearSystem1D {
        m: 1,
        speeds: vec![u],
        to_char: vec![1.0],
        from_char: vec![1.0],
        source_char: Box::new(s_fn),
        flux_conserved: Box::new(move |q, out| out[0] = u * q[0]),
        source_conserved: Box::new(s_fn),
        acoustics: None,
        scalar_source: Some(source),
    }
}

/// Linear acoustics with gravity, conserved ordering (rho, v, p):
///
/// ```text
/// d_t rho + d_x v    = 0
/// d_t v   + d_x p    = rho g
/// d_t p   + c^2 d_x v = 0
/// ```
///
/// Characteristic variables `Q1 = (p + c v)/2`, `Q2 = (p - c v)/2`,
/// `Q3 = -p/c^2 + rho` with speeds `(c, -c, 0)` and source
/// `S1 = -S2 = g/(2c) (Q1 + Q2) + (c g / 2) Q3`, `S3 = 0`.
pub fn make_acoustics_gravity(params: AcousticsParams) -> Result<LinearSystem1D> {
    let AcousticsParams { c, g } = params;
    if !(c > 0.0) {
        return Err(AfError::Parameter(format!("sound speed must be > 0, got {c}")));
    }
    let c2 = c * c;
    #[rustfmt::skip]
    let to_char = vec![
        0.0,        0.5 * c,  0.5,
        0.0,       -0.5 * c,  0.5,
        1.0,        0.0,     -1.0 / c2,
    ];
    #[rustfmt::skip]
    let from_char = vec![
        1.0 / c2,  1.0 / c2, 1.0,
        1.0 / c,  -1.0 / c,  0.0,
        1.0,       1.0,      0.0,
    ];
    let source_char = move |q: &[f64], out: &mut [f64]| {
        let s1 = g / (2.0 * c) * (q[0] + q[1]) + 0.5 * c * g * q[2];
        out[0] = s1;
        out[1] = -s1;
        out[2] = 0.0;
    };
    Ok(LinearSystem1D {
        m: 3,
        speeds: vec![c, -c, 0.0],
        to_char,
        from_char,
        source_char: Box::new(source_char),
        flux_conserved: Box::new(move |q, out| {
            out[0] = q[1];
            out[1] = q[2];
            out[2] = c2 * q[1];
        }),
        source_conserved: Box::new(move |q, out| {
            out[0] = 0.0;
            out[1] = q[0] * g;
            out[2] = 0.0;
        }),
        acoustics: Some(params),
        scalar_source: None,
    })
}

/// 2D scalar advection `d_t q + U . grad q = s(q)`.
#[derive(Debug, Clone)]
pub struct Advection2DSpec {
    pub u: [f64; 2],
    pub source: SourceKind,
}

impl Advection2DSpec {
    pub fn new(u: [f64; 2], source: SourceKind) -> Result<Self> {
        if !u[0].is_finite() || !u[1].is_finite() {
            return Err(AfError::Parameter("advection velocity must be finite".into()));
        }
        Ok(Self { u, source })
    }
}
