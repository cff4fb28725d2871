use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("q={0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("empty input")]
    EmptyInput,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial must be non-constant")]
    Constant,
    #[error("polynomial must be squarefree")]
    NotSquarefree,
    #[error("degree {0} must be odd")]
    EvenDegree(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-integral K2 order {0}")]
    NonIntegral(String),
    #[error("root finder did not converge after {0} iterations")]
    RootFinder(usize),
    #[error("work budget exceeded: need ~{required} symbol evaluations, ceiling {ceiling}")]
    WorkBudget { required: u128, ceiling: u128 },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable kebab-case tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotOddPrime(_) => "not-odd-prime",
            Error::FieldMismatch { .. } => "field-mismatch",
            Error::DivisionByZero => "division-by-zero",
            Error::EmptyInput => "empty-input",
            Error::Syntax { .. } => "syntax",
            Error::ZeroPolynomial => "zero-polynomial",
            Error::NotMonic => "not-monic",
            Error::Constant => "constant",
            Error::NotSquarefree => "not-squarefree",
            Error::EvenDegree(_) => "even-degree",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NonIntegral(_) => "non-integral",
            Error::RootFinder(_) => "root-finder",
            Error::WorkBudget { .. } => "work-budget",
            Error::Io(_) => "io",
        }
    }
}
