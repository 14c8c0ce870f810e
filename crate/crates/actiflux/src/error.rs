use thiserror::Error;

/// Errors produced by the solver and its drivers.
#[derive(Debug, Error)]
pub enum AfError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("position {x} outside grid range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("time step {dt} violates the CFL bound {max_dt}")]
    CflViolation { dt: f64, max_dt: f64 },

    #[error("no finite wave speed; the scenario must supply a time step")]
    NoWaveSpeed,

    #[error("finite-time blow-up: nonpositive radicand {radicand} in the exact source solution")]
    BlowUp { radicand: f64 },

    #[error("oracle quadrature did not converge: last change {last_change:e} after {panels} panels")]
    OracleAccuracy { last_change: f64, panels: usize },

    #[error("config error at {path}:{line}: {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<AfError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AfError>;
