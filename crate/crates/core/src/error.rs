use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("{what} did not converge (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    NoConvergence {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },
    #[error("input law has no density")]
    NoDensity,
    #[error("channel is degenerate: {0}")]
    DegenerateChannel(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
