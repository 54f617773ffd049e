use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TlvError {
    #[error("truncated")]
    Truncated,
    #[error("trailing bytes: {0} unconsumed")]
    TrailingBytes(usize),
    #[error("length overflow")]
    LengthOverflow,
    #[error("unknown critical TLV type {0:#x}")]
    UnknownCritical(u64),
    #[error("expected TLV type {expected:#x}, found {found:#x}")]
    UnexpectedType { expected: u64, found: u64 },
    #[error("non-negative integer of invalid width {0}")]
    BadInteger(usize),
    #[error("invalid field: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PacketError {
    #[error("name component of {0} bytes exceeds 255")]
    ComponentTooLong(usize),
    #[error("content of {0} bytes exceeds the 64 KiB cap")]
    ContentTooLarge(usize),
    #[error("a packet name must not be empty")]
    EmptyName,
    #[error("interest lifetime must be positive")]
    ZeroLifetime,
    #[error(transparent)]
    Tlv(#[from] TlvError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("name component of {0} bytes exceeds 255")]
    ComponentTooLong(usize),
    #[error("bad percent-escape in {0:?}")]
    BadEscape(String),
    #[error("bad typed component {0:?}")]
    BadTypedComponent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("prefix must not be empty")]
    EmptyPrefix,
    #[error("prefix {0} already registered on this face")]
    DuplicateRegistration(String),
    #[error("face {0} is not an application face")]
    NotAppFace(usize),
    #[error("face {0} is detached")]
    Detached(usize),
    #[error(transparent)]
    Packet(#[from] PacketError),
}
