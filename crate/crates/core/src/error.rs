use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("extrapolation refused at r = {r} (table covers [{lo}, {hi}])")]
    ExtrapolationRefused { r: f64, lo: f64, hi: f64 },
    #[error("power-law fit failed: log-log residual {residual:.3e} exceeds {tolerance:.1e}")]
    FitFailed { residual: f64, tolerance: f64 },
    #[error("grid mismatch between discrete functions")]
    GridMismatch,
    #[error("support violation: {0}")]
    Support(String),
    #[error("singular linear system at row {0}")]
    Singular(usize),
    #[error("no Nehari scaling: positive part vanishes where K > 0")]
    NoScale,
    #[error("escape direction not found within {0} doublings")]
    EscapeFailed(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
