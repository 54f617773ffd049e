//! Name-based access control with attribute-based encryption.
//!
//! An [`AttributeAuthority`] publishes public parameters and, per consumer,
//! a decryption key (DKEY) wrapped to that consumer's encryption key. An
//! [`Encryptor`] encrypts application data under content keys (CKs), which
//! it ABE-encrypts and publishes. A [`Decryptor`] fetches data, the CK named
//! inside it, the parameters and its own DKEY, validating every packet
//! against a trust schema on the way.
//!
//! All roles run on one [`ndn_core::Sim`]; large objects are segmented and
//! fetched with an AIMD window.

pub mod aa;
pub mod decryptor;
pub mod embed;
pub mod encryptor;
pub mod endpoint;
pub mod error;
pub mod fetch;
pub mod hybrid;
pub mod identity;
pub mod naming;
pub mod segment;

pub use aa::{AttributeAuthority, Grant, GrantRecord};
pub use decryptor::{Decryptor, DecryptorStats};
pub use embed::{embed_ck_name, extract_ck_name};
pub use encryptor::{CachePolicy, CkCache, CkCacheEntry, Encryptor, EncryptorConfig, EncryptorStats, Tag};
pub use endpoint::{Publisher, Session, ValidationRecord};
pub use error::NacError;
pub use fetch::{fetch_one, fetch_segments, Aimd, FetchOptions, FetchStats, Fetched};
pub use hybrid::EncryptionKeyPair;
pub use identity::Identity;
pub use segment::{publish_segments, segment_count, SegmentSpec, SegmentedObject, DEFAULT_MSS};
