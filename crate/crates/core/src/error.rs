use thiserror::Error;

/// Errors produced by design, evaluation, solving, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented range or a structural precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A fraction solver's target consistency probability exceeds the
    /// supremum attainable under the requested structure.
    #[error("target consistency probability unattainable (supremum {supremum:.6})")]
    Unattainable { supremum: f64 },

    /// Exact enumeration would exceed the term budget; Monte Carlo is the
    /// intended fallback at this size.
    #[error("exact enumeration budget exceeded: needs ~{required} terms (budget {budget})")]
    EnumerationBudget { required: u128, budget: u128 },

    /// An adaptive quadrature did not reach its tolerance within the
    /// subdivision limit.
    #[error(
        "quadrature failed to converge: error estimate {error_estimate:.3e} after {panels} panels"
    )]
    QuadratureNonConvergence { error_estimate: f64, panels: usize },

    /// No replication rejected the null, so the conditional consistency
    /// probability is undefined.
    #[error("degenerate simulation: zero rejections in {replications} replications")]
    DegenerateSimulation { replications: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
