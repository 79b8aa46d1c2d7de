use thiserror::Error;

/// Errors produced by the medium, channel, and gate computations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a domain precondition (non-finite, out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock cutoff is too small to hold the state without truncating it.
    #[error("cutoff nmax = {nmax} cannot hold a state with {photons} photons")]
    Capacity { nmax: usize, photons: usize },

    /// A bracketed root search found no sign change.
    #[error("no solution for the gate condition inside the search bracket")]
    NoSolution,

    /// Quadrature refinement stalled above the requested tolerance.
    #[error("quadrature did not converge: residual {residual:.3e} after {refinements} refinements")]
    QuadratureNotConverged { residual: f64, refinements: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
