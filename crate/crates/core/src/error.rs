use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("structure constant key requires i < j, got ({i}, {j})")]
    InvalidBracketKey { i: usize, j: usize },

    #[error("dimension {found} is too small (at least {required} required)")]
    DimensionTooSmall { required: usize, found: usize },

    #[error("sigma is not a permutation of 1..{0}")]
    InvalidPermutation(usize),

    #[error("sigma contains the 2-cycle ({0} {1}); Milnor brackets are undefined on 2-cycles")]
    TwoCycle(usize, usize),

    #[error("Jacobi identity fails on {0} basis triple(s)")]
    NotALieAlgebra(usize),

    #[error("Milnor condition lambda_i * lambda_(i+2) = 0 fails at 1-based index/indices {0:?}")]
    MilnorConditionViolated(Vec<usize>),

    #[error("3-dimensional Milnor data with two or more nonzero constants is the general 3-dim case, not a splitting")]
    ThreeDimensionalGeneralCase,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("algebra is not unimodular")]
    NotUnimodular,

    #[error("matrix is singular")]
    Singular,

    #[error("flag is not strictly nested")]
    FlagNotNested,

    #[error("canonical flag is degenerate (dimensions {0:?})")]
    DegenerateFlag(Vec<usize>),

    #[error("wrong algebra shape: {0}")]
    WrongShape(String),

    #[error("L-operator is not self-adjoint (algebra is not unimodular)")]
    NotSelfAdjoint,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),

    #[error("numerical residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
