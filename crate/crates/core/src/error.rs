use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Inputs that are individually valid but do not fit together
    /// (grid too narrow for the density, etc).
    #[error("configuration error: {0}")]
    Config(String),

    /// A value outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The discretization cannot resolve the requested feature.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Arguments that violate the calling contract (mismatched grids, etc).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{solver}: step size {dt} exceeds the stability limit {max_dt}; use a smaller dt")]
    StepSize { solver: &'static str, dt: f64, max_dt: f64 },

    #[error("{solver}: non-finite amplitude at t = {time} us")]
    NumericalInstability { solver: &'static str, time: f64 },

    #[error("insufficient data: {what} (need {needed}, found {found})")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        found: usize,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True for failures of a time-stepping solver (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepSize { .. } | Error::NumericalInstability { .. })
    }
}
