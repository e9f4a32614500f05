use thiserror::Error;

/// Errors raised by distribution construction, entropy evaluation and the
/// axiom engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative mass at index {index}: {value}")]
    NegativeMass { index: usize, value: f64 },

    #[error("bad normalization: weights sum to {sum}, expected 1")]
    BadNormalization { sum: f64 },

    #[error("bad size: {0}")]
    BadSize(String),

    #[error("index {index} out of range for length {len}")]
    BadIndex { index: usize, len: usize },

    #[error("split mass mismatch: parts sum to {parts}, split weight is {expected}")]
    SplitMassMismatch { expected: f64, parts: f64 },

    #[error("split of zero mass at index {index}")]
    ZeroMassSplit { index: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a permutation: {0:?}")]
    BadPermutation(Vec<usize>),

    #[error("non-finite weight at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error("degenerate scale: H(uniform(2)) = {0} is not positive")]
    DegenerateScale(f64),
}

impl Error {
    /// Name of the violated invariant, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeMass { .. } => "NegativeMass",
            Error::BadNormalization { .. } => "BadNormalization",
            Error::BadSize(_) => "BadSize",
            Error::BadIndex { .. } => "BadIndex",
            Error::SplitMassMismatch { .. } => "SplitMassMismatch",
            Error::ZeroMassSplit { .. } => "ZeroMassSplit",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::BadPermutation(_) => "BadPermutation",
            Error::NonFinite { .. } => "NonFinite",
            Error::BadParam(_) => "BadParam",
            Error::BadConfig(_) => "BadConfig",
            Error::DegenerateScale(_) => "DegenerateScale",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
