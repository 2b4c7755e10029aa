use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic must be an odd prime, got {0}")]
    InvalidCharacteristic(u64),
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("not a square: {0}")]
    NotASquare(String),
    #[error("minimal polynomial is not separable")]
    NotSeparable,
    #[error("zero divisor met in extension layer (minimal polynomial is reducible)")]
    ZeroDivisor,
    #[error("bad reduction: {0}")]
    BadReduction(String),
    #[error("curve is not ordinary")]
    NotOrdinary,
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("sign of the Verschiebung y-map could not be determined")]
    SignUndetermined,
    #[error("evaluation divisor meets the support of the Miller function")]
    SupportCollision,
    #[error("no rational kernel point of the Verschiebung within the degree bound")]
    NoRationalKernel,
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("isotrivial family: omega and its Gauss-Manin derivative are dependent")]
    IsotrivialFamily,
    #[error("no rational transport factor: {0}")]
    NoRationalTransport(String),
    #[error("delta-rank is zero (Kodaira-Spencer map vanishes)")]
    DeltaRankZero,
    #[error("no witness: V-fibre over the point is not rational within the degree bound")]
    NoWitness,
    #[error("prolongation order {0} exceeds the supported maximum of 2")]
    OrderTooLarge(usize),
    #[error("expression uses order {used} but declares order {declared}")]
    OrderMismatch { used: usize, declared: usize },
    #[error("canonical lift violates a prolonged relation")]
    LiftInconsistent,
    #[error("descent constant beta(S) vanishes")]
    DegenerateDescent,
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid specification: {0}")]
    Validation(String),
}

impl Error {
    /// Short machine-readable name of the variant, used in CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidCharacteristic(_) => "InvalidCharacteristic",
            Error::NotAPthPower => "NotAPthPower",
            Error::NotASquare(_) => "NotASquare",
            Error::NotSeparable => "NotSeparable",
            Error::ZeroDivisor => "ZeroDivisor",
            Error::BadReduction(_) => "BadReduction",
            Error::NotOrdinary => "NotOrdinary",
            Error::StructureViolation(_) => "StructureViolation",
            Error::SignUndetermined => "SignUndetermined",
            Error::SupportCollision => "SupportCollision",
            Error::NoRationalKernel => "NoRationalKernel",
            Error::DegenerateFamily(_) => "DegenerateFamily",
            Error::IsotrivialFamily => "IsotrivialFamily",
            Error::NoRationalTransport(_) => "NoRationalTransport",
            Error::DeltaRankZero => "DeltaRankZero",
            Error::NoWitness => "NoWitness",
            Error::OrderTooLarge(_) => "OrderTooLarge",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::LiftInconsistent => "LiftInconsistent",
            Error::DegenerateDescent => "DegenerateDescent",
            Error::Unsupported(_) => "Unsupported",
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
