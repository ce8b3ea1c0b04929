use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("operands belong to different orders ({0} vs {1})")]
    OrderMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero ideal has no inverse")]
    ZeroIdeal,
    #[error("invalid field data: {0}")]
    InvalidField(String),
    #[error("insufficient units: {0}")]
    InsufficientUnits(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not integral: {0}")]
    NotIntegral(String),
    #[error("homogeneity violated at ({witness}): {detail}")]
    Homogeneity { witness: String, detail: String },
    #[error("invalid locally constant function: {0}")]
    InvalidFunction(String),
    #[error("cannot decide {0} within the configured limits")]
    Undecided(String),
    #[error("inconsistent tower data: {0}")]
    CorruptTower(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("search limit exceeded: {0}")]
    LimitExceeded(String),
}

pub type Result<T> = core::result::Result<T, Error>;
