use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series power undefined: polynomial has zero constant term")]
    ZeroConstantTerm,

    #[error("series power {alpha} of a negative constant term {constant} lies on a complex branch")]
    ComplexBranch { constant: f64, alpha: f64 },

    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("truncation order would exceed the cap of {cap} (reached {reached})")]
    TruncationCap { reached: usize, cap: usize },

    #[error("distribution holds indices 0..={available} but index {needed} is required")]
    DistributionTooShort { needed: usize, available: usize },

    #[error("Fock truncation at {n_trunc} loses {loss:e} of the norm (limit {limit:e})")]
    TruncationLoss { n_trunc: usize, loss: f64, limit: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of a numerical budget (truncation caps or losses) rather
    /// than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::TruncationCap { .. } | Error::TruncationLoss { .. }
        )
    }
}
