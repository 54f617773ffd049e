//! Hybrid encryption of decryption keys for one consumer.
//!
//! Content layout:
//!
//! ```text
//! 0x90 wrapped key   = ephemeral X25519 public (32) | wrap nonce (12) | AES-256-GCM(kek, key)
//! 0x91 nonce         = 12 bytes
//! 0x92 encrypted key = AES-256-GCM(key, serialized ABE key)
//! ```
//!
//! `kek` is HKDF-SHA256 over the X25519 shared secret, salted with the
//! ephemeral and recipient public keys.

use aes_gcm::aead::{Aead, KeyInit};
use aes_gcm::{Aes256Gcm, Nonce};
use hkdf::Hkdf;
use ndn_core::tlv::{write_tlv, Reader};
use rand::{CryptoRng, RngCore};
use sha2::Sha256;
use x25519_dalek::{PublicKey, StaticSecret};

use crate::error::NacError;

pub const TLV_WRAPPED_KEY: u64 = 0x90;
pub const TLV_NONCE: u64 = 0x91;
pub const TLV_ENCRYPTED_KEY: u64 = 0x92;

const WRAP_INFO: &[u8] = b"nacabe dkey wrap";
const NONCE_LEN: usize = 12;

/// An X25519 key pair held by a consumer.
#[derive(Clone)]
pub struct EncryptionKeyPair {
    secret: StaticSecret,
}

impl std::fmt::Debug for EncryptionKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EncryptionKeyPair").field("public", &self.public_key()).finish_non_exhaustive()
    }
}

impl EncryptionKeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut bytes = [0u8; 32];
        rng.fill_bytes(&mut bytes);
        EncryptionKeyPair {
            secret: StaticSecret::from(bytes),
        }
    }

    pub fn public_key(&self) -> [u8; 32] {
        PublicKey::from(&self.secret).to_bytes()
    }
}

fn kek(shared: &[u8; 32], ephemeral: &[u8; 32], recipient: &[u8; 32]) -> Aes256Gcm {
    let mut salt = [0u8; 64];
    salt[..32].copy_from_slice(ephemeral);
    salt[32..].copy_from_slice(recipient);
    let mut okm = [0u8; 32];
    Hkdf::<Sha256>::new(Some(&salt), shared)
        .expand(WRAP_INFO, &mut okm)
        .expect("32 bytes is a valid HKDF length");
    Aes256Gcm::new(&okm.into())
}

fn nonce<R: RngCore>(rng: &mut R) -> [u8; NONCE_LEN] {
    let mut n = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut n);
    n
}

pub fn wrap<R: RngCore + CryptoRng>(recipient: &[u8], plaintext: &[u8], rng: &mut R) -> Result<Vec<u8>, NacError> {
    let recipient: [u8; 32] = recipient
        .try_into()
        .map_err(|_| NacError::malformed("encryption key", "expected 32 bytes"))?;
    let ephemeral = EncryptionKeyPair::generate(rng);
    let eph_pub = ephemeral.public_key();
    let shared = ephemeral.secret.diffie_hellman(&PublicKey::from(recipient));

    let mut key = [0u8; 32];
    rng.fill_bytes(&mut key);
    let wrap_nonce = nonce(rng);
    let wrapped = kek(shared.as_bytes(), &eph_pub, &recipient)
        .encrypt(Nonce::from_slice(&wrap_nonce), key.as_slice())
        .expect("in-memory AEAD does not fail");
    let body_nonce = nonce(rng);
    let body = Aes256Gcm::new(&key.into())
        .encrypt(Nonce::from_slice(&body_nonce), plaintext)
        .expect("in-memory AEAD does not fail");

    let mut first = Vec::with_capacity(32 + NONCE_LEN + wrapped.len());
    first.extend_from_slice(&eph_pub);
    first.extend_from_slice(&wrap_nonce);
    first.extend_from_slice(&wrapped);
    let mut out = Vec::new();
    write_tlv(&mut out, TLV_WRAPPED_KEY, &first);
    write_tlv(&mut out, TLV_NONCE, &body_nonce);
    write_tlv(&mut out, TLV_ENCRYPTED_KEY, &body);
    Ok(out)
}

pub fn unwrap(keys: &EncryptionKeyPair, content: &[u8]) -> Result<Vec<u8>, NacError> {
    let mut r = Reader::new(content);
    let first = r.expect(TLV_WRAPPED_KEY)?.value;
    let body_nonce = r.expect(TLV_NONCE)?.value;
    let body = r.expect(TLV_ENCRYPTED_KEY)?.value;
    r.finish()?;
    if first.len() < 32 + NONCE_LEN || body_nonce.len() != NONCE_LEN {
        return Err(NacError::malformed("DKEY content", "short field"));
    }
    let eph_pub: [u8; 32] = first[..32].try_into().expect("length checked");
    let wrap_nonce = &first[32..32 + NONCE_LEN];
    let shared = keys.secret.diffie_hellman(&PublicKey::from(eph_pub));
    let key = kek(shared.as_bytes(), &eph_pub, &keys.public_key())
        .decrypt(Nonce::from_slice(wrap_nonce), &first[32 + NONCE_LEN..])
        .map_err(|_| NacError::Unwrap)?;
    let key: [u8; 32] = key.try_into().map_err(|_| NacError::Unwrap)?;
    Aes256Gcm::new(&key.into())
        .decrypt(Nonce::from_slice(body_nonce), body)
        .map_err(|_| NacError::Unwrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_and_wrong_recipient() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bob = EncryptionKeyPair::generate(&mut rng);
        let eve = EncryptionKeyPair::generate(&mut rng);
        let msg = b"an abe key".repeat(50);
        let content = wrap(&bob.public_key(), &msg, &mut rng).unwrap();
        assert_eq!(unwrap(&bob, &content).unwrap(), msg);
        assert_eq!(unwrap(&eve, &content), Err(NacError::Unwrap));
    }

    #[test]
    fn layout_is_three_tlvs_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bob = EncryptionKeyPair::generate(&mut rng);
        let content = wrap(&bob.public_key(), b"k", &mut rng).unwrap();
        let mut r = Reader::new(&content);
        assert_eq!(r.read().unwrap().typ, TLV_WRAPPED_KEY);
        let n = r.read().unwrap();
        assert_eq!((n.typ, n.value.len()), (TLV_NONCE, NONCE_LEN));
        assert_eq!(r.read().unwrap().typ, TLV_ENCRYPTED_KEY);
        assert!(r.is_empty());
    }

    #[test]
    fn tampering_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bob = EncryptionKeyPair::generate(&mut rng);
        let content = wrap(&bob.public_key(), b"secret", &mut rng).unwrap();
        for i in 0..content.len() {
            let mut c = content.clone();
            c[i] ^= 0x01;
            assert!(unwrap(&bob, &c).is_err(), "byte {i}");
        }
    }
}
