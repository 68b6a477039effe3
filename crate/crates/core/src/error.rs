use std::fmt;

/// Position inside a model source, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{origin}:{location}: {message}")]
    Parse {
        origin: String,
        location: Location,
        message: String,
    },
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("model has {} violation(s); first: {}", .0.len(), .0[0])]
    Violations(Vec<crate::model::Violation>),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("impossible observation: Pr(o | b, a) = 0")]
    ImpossibleObservation,
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("policy graph has {found} observations, model has {expected}")]
    AlphabetMismatch { expected: usize, found: usize },
    #[error("policy space too large ({0} policies, limit {1})")]
    PolicySpaceTooLarge(u64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
