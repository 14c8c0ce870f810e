//! Active Flux finite-volume library for hyperbolic balance laws.
//!
//! The scheme carries two kinds of degrees of freedom: cell averages and
//! point values shared between neighboring cells. Point values sit on cell
//! interfaces (1D) or on nodes and edge midpoints (2D). Each step evolves
//! the point values with a characteristics-based operator applied to the
//! frozen piecewise-polynomial reconstruction, then updates the averages
//! conservatively with Simpson-type flux and source quadratures. No Riemann
//! solver is involved, and the method is third-order accurate.
//!
//! Supported models: 1D linear systems with source terms (scalar advection
//! with linear or power-law sources, linear acoustics with gravity) and 2D
//! scalar advection. [`oracles`] provides closed-form and Green's-function
//! reference solutions, [`wellbalance`] hydrostatic setups and residuals,
//! and [`harness`] scenario running, error norms and convergence studies.

pub mod config;
pub mod equations;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod harness;
pub mod oracles;
pub mod reconstruction;
pub mod update;
pub mod wellbalance;

pub use error::{AfError, Result};
