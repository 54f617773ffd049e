//! Named Data Networking substrate: hierarchical names, Interest and Data
//! packets with a TLV codec, Ed25519 packet signing, and an in-memory
//! forwarder network driven by a virtual clock.

pub mod error;
pub mod forwarder;
pub mod name;
pub mod packet;
pub mod repo;
pub mod security;
pub mod sim;
pub mod tlv;

pub use error::{NameError, PacketError, SimError, TlvError};
pub use name::{Component, Name};
pub use packet::{decode_packet, encode_packet, ContentType, Data, Interest, Packet};
pub use repo::Repo;
pub use security::{sign_data, verify_data, Certificate, CertificateRequest, KeyPair, Validity};
pub use sim::{repo_handler, Counters, FaceEvent, LinkPolicy, NodeId, PendingId, RegistrationId, Sim};
pub use forwarder::FaceId;
