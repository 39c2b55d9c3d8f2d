use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("nu2 is undefined at 0")]
    Nu2OfZero,
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: String,
        needed: String,
        limit: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("validity check failed: {0}")]
    ValidityCheckFailed(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn budget(
        what: impl Into<String>,
        needed: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }

    /// True for resource-limit errors, false for mathematical ones.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
