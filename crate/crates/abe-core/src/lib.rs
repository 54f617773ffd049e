//! Attribute-based encryption for named-data access control.
//!
//! Policies are parsed from text, integer comparisons are expanded into
//! bit-prefix attributes, and the result is compiled into a threshold-gate
//! access tree. [`scheme`] provides key-policy and ciphertext-policy
//! encryption over that tree using an arithmetic emulation of the group
//! operations; [`provider::AbeProvider`] is the boundary a real
//! pairing-based backend would implement.

pub mod attribute;
pub mod batch;
pub mod error;
pub mod field;
pub mod parser;
pub mod policy;
pub mod provider;
pub mod scheme;
pub mod serialize;
pub mod sharing;
pub mod tree;

pub use attribute::{data_attributes_for, Attribute, AttributeKind, AttributeSet};
pub use error::AbeError;
pub use field::Fe;
pub use parser::parse_policy;
pub use policy::{expand_comparison, CompareOp, PolicyExpr};
pub use provider::{AbeProvider, Emulated};
pub use scheme::{
    cp_encrypt, cp_keygen, decrypt, kp_encrypt, kp_keygen, setup, AbeCiphertext, AbeKey, AbeType, MasterKey,
    PublicParams,
};
pub use serialize::{
    deserialize_ciphertext, deserialize_key, deserialize_params, serialize_ciphertext, serialize_key,
    serialize_params,
};
pub use tree::{build_access_tree, satisfies, AccessTree};

/// Bit width of every timestamp comparison.
pub const TIMESTAMP_BITS: u32 = attribute::MAX_BIT_WIDTH;
