//! Name-based trust schemas: rules binding data names to the names of the
//! keys allowed to sign them, plus chain validation up to a trust anchor.

pub mod error;
pub mod naming;
pub mod pattern;
pub mod schema;
pub mod validate;

pub use error::{PatternError, SchemaError};
pub use naming::{check_name, check_naming_convention, NamingViolation};
pub use pattern::{Captures, Pattern};
pub use schema::{load_schema, mhealth_schema_text, SchemaRule, Signer, TrustSchema};
pub use validate::{validate, Outcome, ValidationResult, Validator, MAX_CHAIN_DEPTH};
