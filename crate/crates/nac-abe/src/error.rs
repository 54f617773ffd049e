use abe_core::AbeError;
use ndn_core::error::{SimError, TlvError};
use ndn_core::Name;
use thiserror::Error;
use trust_schema::Outcome;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NacError {
    #[error("validation of {name} failed: {outcome}")]
    Validation { name: Name, outcome: Outcome },
    #[error("policy not satisfied")]
    PolicyNotSatisfied,
    #[error("unknown attribute: {0}")]
    UnknownAttribute(String),
    #[error("timed out fetching {0}")]
    Timeout(Name),
    #[error("no certificate for consumer {0}")]
    UnknownConsumer(Name),
    #[error("{abe_type} authority cannot grant {grant}")]
    GrantTypeMismatch { abe_type: &'static str, grant: &'static str },
    #[error("{abe_type} encryptor cannot encrypt under {tag}")]
    TagTypeMismatch { abe_type: &'static str, tag: &'static str },
    #[error("decryption key unwrap failed")]
    Unwrap,
    #[error("content decryption failed")]
    ContentDecryption,
    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },
    #[error(transparent)]
    Abe(AbeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl NacError {
    pub(crate) fn malformed(what: &'static str, detail: impl ToString) -> Self {
        NacError::Malformed {
            what,
            detail: detail.to_string(),
        }
    }
}

impl From<AbeError> for NacError {
    fn from(e: AbeError) -> Self {
        match e {
            AbeError::PolicyNotSatisfied => NacError::PolicyNotSatisfied,
            AbeError::UnknownAttribute(a) => NacError::UnknownAttribute(a),
            other => NacError::Abe(other),
        }
    }
}

impl From<TlvError> for NacError {
    fn from(e: TlvError) -> Self {
        NacError::malformed("TLV", e)
    }
}
