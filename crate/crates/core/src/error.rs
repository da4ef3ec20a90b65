use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis index {occupations:?} is outside cutoffs {cutoffs:?}")]
    InvalidIndex {
        occupations: Vec<usize>,
        cutoffs: Vec<usize>,
    },

    #[error("state has zero norm")]
    ZeroState,

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("truncation unsafe: weight {leaked:.3e} exceeds tolerance {epsilon:.3e}")]
    TruncationUnsafe { leaked: f64, epsilon: f64 },

    #[error("expected {expected} modes, got {actual}")]
    WrongArity { expected: usize, actual: usize },

    #[error("operator combination is not Hermitian: {0}")]
    NotHermitianCombination(String),

    #[error("expectation of a Hermitian operator has imaginary part {imag:.3e}")]
    NotHermitianAtRuntime { imag: f64 },

    #[error("variance {0:.3e} is negative beyond tolerance")]
    NegativeVariance(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mode set {modes:?} for {mode_count} modes")]
    InvalidModeSet {
        modes: Vec<usize>,
        mode_count: usize,
    },

    #[error("matrix dimension {dim} exceeds limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_truncation(&self) -> bool {
        matches!(self, Error::TruncationUnsafe { .. })
    }
}
