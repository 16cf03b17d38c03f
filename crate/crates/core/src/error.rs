use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to a distinct
/// precondition failure so callers (and the CLI) can report it by name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(i128),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precision p^{precision} exhausted while computing {what}")]
    PrecisionError { what: &'static str, precision: u32 },

    #[error("vector is not primitive at p = {0}")]
    NotPrimitive(u64),

    #[error("enumeration size {size} exceeds ceiling {ceiling}")]
    TooLarge { size: u128, ceiling: u128 },

    #[error("no valid pivot index: need p ∤ a_j and p ∤ u_j")]
    NoPivot,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("C_p undefined for t_p = {t_p}, r_p = {r_p}")]
    UndefinedBranch { t_p: usize, r_p: u32 },

    #[error("conductor {0} is even")]
    EvenConductor(u64),

    #[error("gcd(d_L, Q(u), c) is divisible by {prime}")]
    GcdHypothesisViolated { prime: u64 },

    #[error("rank {0} is too small, need at least 3")]
    RankTooSmall(usize),

    #[error("shift vector is isotropic: Q(u) = 0")]
    IsotropicShift,

    #[error("rank {0} unsupported, expected 3..=10")]
    UnsupportedRank(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "InvalidPrime",
            Error::InvalidInput(_) => "InvalidInput",
            Error::PrecisionError { .. } => "PrecisionError",
            Error::NotPrimitive(_) => "NotPrimitive",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoPivot => "NoPivot",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::UndefinedBranch { .. } => "UndefinedBranch",
            Error::EvenConductor(_) => "EvenConductor",
            Error::GcdHypothesisViolated { .. } => "GcdHypothesisViolated",
            Error::RankTooSmall(_) => "RankTooSmall",
            Error::IsotropicShift => "IsotropicShift",
            Error::UnsupportedRank(_) => "UnsupportedRank",
        }
    }
}
