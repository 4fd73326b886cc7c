use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all columns of the input are numerically zero")]
    AllZeroInput,
    #[error("{0} did not converge within its iteration cap")]
    ConvergenceFailure(&'static str),
    #[error("singular matrix: pivot {pivot} is below tolerance")]
    SingularMatrix { pivot: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Matrix Market parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("structurally singular: column {column} has no entries")]
    StructurallySingular { column: usize },
    #[error("numerically singular at elimination step {pivot}")]
    NumericallySingular { pivot: usize },

    #[error("invalid number of parts {parts} for a graph with {vertices} vertices")]
    TooManyParts { parts: usize, vertices: usize },
    #[error("at least two parts are required, got {0}")]
    InvalidParts(usize),
    #[error("invalid part labels: {0}")]
    InvalidLabels(String),

    #[error("quadrature order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("disk radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("evaluation point coincides with pole {0}")]
    PoleHit(usize),

    #[error("pole {0} lies on the spectrum of the pencil")]
    PoleOnSpectrum(usize),
    #[error("pole {pole} lies on the spectrum of interior block {block}")]
    PoleOnBlockSpectrum { pole: usize, block: usize },
    #[error("interface size {size} exceeds the dense Schur complement cap {cap}")]
    InterfaceTooLarge { size: usize, cap: usize },
    #[error("the partition has no interface variables; use the unpartitioned solver")]
    NoInterface,

    #[error("invalid range finder configuration: {0}")]
    InvalidConfig(String),

    #[error("projection basis is empty")]
    EmptyBasis,
    #[error("projected matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditionedProjection(f64),

    #[error("mass block {0} is singular")]
    SingularMassBlock(usize),
    #[error("interior block of size {size} exceeds the dense eigensolver cap {cap}")]
    BlockTooLarge { size: usize, cap: usize },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
