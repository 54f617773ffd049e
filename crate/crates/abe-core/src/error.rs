use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbeError {
    /// `position` is 1-based; end of input is `len + 1`.
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown operator {op:?} at position {position}")]
    UnknownOperator { position: usize, op: String },
    #[error("integer out of 32-bit range at position {position}")]
    IntegerOutOfRange { position: usize },
    #[error("invalid attribute {0:?}: {1}")]
    InvalidAttribute(String, &'static str),
    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: u32 },
    #[error("policy can never be satisfied")]
    AlwaysFalse,
    #[error("attribute set is empty")]
    EmptyAttributes,
    #[error("unknown attribute: {0}")]
    UnknownAttribute(String),
    #[error("policy not satisfied")]
    PolicyNotSatisfied,
    #[error("params mismatch")]
    ParamsMismatch,
    #[error("authentication failed")]
    AuthenticationFailed,
    #[error("malformed encoding: {0}")]
    Malformed(String),
}

impl From<ndn_core::TlvError> for AbeError {
    fn from(e: ndn_core::TlvError) -> Self {
        AbeError::Malformed(e.to_string())
    }
}
