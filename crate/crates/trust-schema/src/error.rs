use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid pattern {pattern:?}: {reason}")]
pub struct PatternError {
    pub pattern: String,
    pub reason: &'static str,
}

impl PatternError {
    pub(crate) fn new(pattern: &str, reason: &'static str) -> Self {
        PatternError { pattern: pattern.to_owned(), reason }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema has no anchor")]
    MissingAnchor,
    #[error("schema has no rules")]
    NoRules,
    #[error("rule {rule}: signer refers to undefined capture <{capture}>")]
    UndefinedCapture { rule: String, capture: String },
    #[error("anchor certificate: {0}")]
    BadAnchor(String),
}
