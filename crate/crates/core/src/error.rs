use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Domain and resource errors. Usage errors are handled by the CLI parser.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is reducible over Q: {0}")]
    Reducible(String),

    #[error("basis element {index} is not integral")]
    NonIntegralBasis { index: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("prime {0} divides the index of the order; unsupported")]
    IndexDivisor(u64),

    #[error("zero element where a nonzero one is required")]
    ZeroElement,

    #[error("element is not in O_S")]
    NotSInteger,

    #[error("element is not an S-unit of the generated group: {0}")]
    NotSUnit(String),

    #[error("missing field data: {0}")]
    MissingData(String),

    #[error("trusted data supplied in verify mode: {0}")]
    TrustViolation(String),

    #[error("search space of {required} candidates exceeds the cap of {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("could not decide at maximum precision: {0}")]
    Undecided(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Machine-readable kind, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Reducible(_) => "reducible_polynomial",
            Error::NonIntegralBasis { .. } => "non_integral_basis",
            Error::DivisionByZero => "division_by_zero",
            Error::IndexDivisor(_) => "index_divisor_prime",
            Error::ZeroElement => "zero_element",
            Error::NotSInteger => "not_s_integer",
            Error::NotSUnit(_) => "not_s_unit",
            Error::MissingData(_) => "missing_data",
            Error::TrustViolation(_) => "trust_violation",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Undecided(_) => "undecided",
            Error::Precondition(_) => "precondition",
            Error::Inconsistent(_) => "internal_inconsistency",
        }
    }
}
