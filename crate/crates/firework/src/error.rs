use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A distribution definition failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A vertex layout failed validation.
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    /// A config document failed validation after parsing.
    #[error("invalid config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    /// Brute-force enumeration would exceed the state-space budget.
    #[error("enumeration budget exceeded: {required} states required, {budget} allowed")]
    BudgetExceeded { required: u128, budget: u128 },

    /// An operation was called on inputs it does not support.
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_parameter(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
