//! Ed25519 packet signatures and certificates.
//!
//! Signatures are computed over the SHA-256 digest of [`Data::signed_portion`].

use ed25519_dalek::{Signature, Signer as _, SigningKey, Verifier as _, VerifyingKey};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::error::TlvError;
use crate::name::{Component, Name};
use crate::packet::{ContentType, Data};
use crate::tlv::{self, Reader};

pub const SIGNATURE_NONCE_LEN: usize = 8;
pub const KEY_COMPONENT: &str = "KEY";

const TLV_SIGNING_KEY: u64 = 0x96;
const TLV_ENCRYPTION_KEY: u64 = 0x98;
const TLV_NOT_BEFORE: u64 = 0x9C;
const TLV_NOT_AFTER: u64 = 0x9E;

/// An Ed25519 signing key.
#[derive(Clone)]
pub struct KeyPair {
    key: SigningKey,
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &hex(&self.public_key()))
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        KeyPair {
            key: SigningKey::generate(rng),
        }
    }

    pub fn public_key(&self) -> [u8; 32] {
        self.key.verifying_key().to_bytes()
    }

    /// Short identifier derived from the public key.
    pub fn key_id(&self) -> String {
        let digest = Sha256::digest(self.public_key());
        hex(&digest[..8])
    }

    fn sign_digest(&self, message: &[u8]) -> Vec<u8> {
        let digest = Sha256::digest(message);
        self.key.sign(&digest).to_bytes().to_vec()
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Signs `data` in place: sets the KeyLocator to `signer_cert`, draws a
/// fresh signature nonce and computes the signature.
pub fn sign_data<R: RngCore + CryptoRng>(
    mut data: Data,
    key: &KeyPair,
    signer_cert: &Name,
    rng: &mut R,
) -> Data {
    data.key_locator = signer_cert.clone();
    let mut nonce = vec![0u8; SIGNATURE_NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    data.signature_nonce = nonce;
    data.signature = key.sign_digest(&data.signed_portion());
    data
}

/// Verifies the signature of `data` against a raw Ed25519 public key.
pub fn verify_data(data: &Data, public_key: &[u8]) -> bool {
    let Ok(pk) = <[u8; 32]>::try_from(public_key) else {
        return false;
    };
    let Ok(vk) = VerifyingKey::from_bytes(&pk) else {
        return false;
    };
    let Ok(sig) = Signature::from_slice(&data.signature) else {
        return false;
    };
    let digest = Sha256::digest(data.signed_portion());
    vk.verify(&digest, &sig).is_ok()
}

/// `<identity>/KEY/<key-id>`
pub fn key_name(identity: &Name, key_id: &str) -> Name {
    identity.child_str(KEY_COMPONENT).child_str(key_id)
}

/// The key name a certificate name belongs to: everything up to and
/// including the component after `KEY`.
pub fn key_name_of(cert_name: &Name) -> Option<Name> {
    let idx = cert_name
        .components()
        .iter()
        .rposition(|c| c.is(KEY_COMPONENT))?;
    (idx + 1 < cert_name.len()).then(|| cert_name.prefix(idx + 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validity {
    pub not_before: u64,
    pub not_after: u64,
}

impl Validity {
    pub const FOREVER: Validity = Validity {
        not_before: 0,
        not_after: u64::MAX,
    };

    pub fn contains(&self, t: u64) -> bool {
        self.not_before <= t && t <= self.not_after
    }
}

/// A certificate: a signed Data packet named
/// `<identity>/KEY/<key-id>/<issuer>/<version>` whose content carries the
/// subject's public keys and validity period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    data: Data,
    signing_key: Vec<u8>,
    encryption_key: Vec<u8>,
    validity: Validity,
}

pub struct CertificateRequest<'a> {
    pub identity: &'a Name,
    pub subject: &'a KeyPair,
    /// Opaque key-agreement public key published alongside the signing key.
    pub encryption_key: &'a [u8],
    pub validity: Validity,
    pub version: u64,
}

impl Certificate {
    /// Issues a certificate. With `issuer == None` the certificate is
    /// self-signed.
    pub fn issue<R: RngCore + CryptoRng>(
        req: CertificateRequest<'_>,
        issuer: Option<(&KeyPair, &Name)>,
        rng: &mut R,
    ) -> Certificate {
        let issuer_tag = if issuer.is_some() { "anchor" } else { "self" };
        let name = key_name(req.identity, &req.subject.key_id())
            .child_str(issuer_tag)
            .child(Component::version(req.version));
        let signing_key = req.subject.public_key().to_vec();
        let mut content = Vec::new();
        tlv::write_tlv(&mut content, TLV_SIGNING_KEY, &signing_key);
        tlv::write_tlv(&mut content, TLV_ENCRYPTION_KEY, req.encryption_key);
        tlv::write_nonneg_tlv(&mut content, TLV_NOT_BEFORE, req.validity.not_before);
        tlv::write_nonneg_tlv(&mut content, TLV_NOT_AFTER, req.validity.not_after);
        let unsigned = Data::new(name.clone(), content)
            .with_content_type(ContentType::Key)
            .with_freshness(3_600_000);
        let data = match issuer {
            Some((key, cert)) => sign_data(unsigned, key, cert, rng),
            None => sign_data(unsigned, req.subject, &key_name(req.identity, &req.subject.key_id()), rng),
        };
        Certificate {
            data,
            signing_key,
            encryption_key: req.encryption_key.to_vec(),
            validity: req.validity,
        }
    }

    pub fn from_data(data: Data) -> Result<Certificate, TlvError> {
        if key_name_of(&data.name).is_none() || data.name.len() < 5 {
            return Err(TlvError::Invalid("certificate name"));
        }
        let mut r = Reader::new(&data.content);
        let signing_key = r.expect(TLV_SIGNING_KEY)?.value.to_vec();
        let encryption_key = r.expect(TLV_ENCRYPTION_KEY)?.value.to_vec();
        let not_before = r.expect(TLV_NOT_BEFORE)?.as_nonneg()?;
        let not_after = r.expect(TLV_NOT_AFTER)?.as_nonneg()?;
        r.finish()?;
        Ok(Certificate {
            data,
            signing_key,
            encryption_key,
            validity: Validity {
                not_before,
                not_after,
            },
        })
    }

    pub fn name(&self) -> &Name {
        &self.data.name
    }

    pub fn key_name(&self) -> Name {
        key_name_of(&self.data.name).expect("checked at construction")
    }

    pub fn data(&self) -> &Data {
        &self.data
    }

    pub fn into_data(self) -> Data {
        self.data
    }

    pub fn public_key(&self) -> &[u8] {
        &self.signing_key
    }

    pub fn encryption_key(&self) -> &[u8] {
        &self.encryption_key
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    /// Self-signed iff the KeyLocator names this certificate's own key.
    pub fn is_self_signed(&self) -> bool {
        key_name_of(&self.data.key_locator).is_some_and(|k| k == self.key_name())
    }

    pub fn verify(&self, data: &Data) -> bool {
        verify_data(data, &self.signing_key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(7)
    }

    #[test]
    fn sign_then_verify() {
        let mut rng = rng();
        let key = KeyPair::generate(&mut rng);
        let other = KeyPair::generate(&mut rng);
        let cert: Name = "/p/KEY/1/self/v=1".parse().unwrap();
        let d = sign_data(Data::new("/p/data".parse().unwrap(), b"x".to_vec()), &key, &cert, &mut rng);
        assert_eq!(d.key_locator, cert);
        assert!(verify_data(&d, &key.public_key()));
        assert!(!verify_data(&d, &other.public_key()));
    }

    #[test]
    fn repeated_signing_uses_fresh_nonces() {
        let mut rng = rng();
        let key = KeyPair::generate(&mut rng);
        let cert: Name = "/p/KEY/1/self/v=1".parse().unwrap();
        let base = Data::new("/p/data".parse().unwrap(), b"x".to_vec());
        let a = sign_data(base.clone(), &key, &cert, &mut rng);
        let b = sign_data(base, &key, &cert, &mut rng);
        assert_ne!(a.signature_nonce, b.signature_nonce);
        assert_ne!(a.signature, b.signature);
        assert!(verify_data(&a, &key.public_key()));
        assert!(verify_data(&b, &key.public_key()));
    }

    #[test]
    fn tampering_breaks_signature() {
        let mut rng = rng();
        let key = KeyPair::generate(&mut rng);
        let cert: Name = "/p/KEY/1/self/v=1".parse().unwrap();
        let d = sign_data(Data::new("/p/data".parse().unwrap(), b"x".to_vec()), &key, &cert, &mut rng);
        let mut flipped = d.clone();
        flipped.signature[10] ^= 1;
        assert!(!verify_data(&flipped, &key.public_key()));
        let mut renamed = d.clone();
        renamed.key_locator = "/q/KEY/1/self/v=1".parse().unwrap();
        assert!(!verify_data(&renamed, &key.public_key()));
        let mut fresh = d;
        fresh.freshness_period_ms = 5;
        assert!(!verify_data(&fresh, &key.public_key()));
    }

    #[test]
    fn certificate_round_trip() {
        let mut rng = rng();
        let anchor_key = KeyPair::generate(&mut rng);
        let id: Name = "/org/mhealth".parse().unwrap();
        let anchor = Certificate::issue(
            CertificateRequest {
                identity: &id,
                subject: &anchor_key,
                encryption_key: &[],
                validity: Validity::FOREVER,
                version: 1,
            },
            None,
            &mut rng,
        );
        assert!(anchor.is_self_signed());
        assert!(anchor.verify(anchor.data()));

        let sub_key = KeyPair::generate(&mut rng);
        let sub_id: Name = "/org/mhealth/producer/alice".parse().unwrap();
        let cert = Certificate::issue(
            CertificateRequest {
                identity: &sub_id,
                subject: &sub_key,
                encryption_key: &[5; 32],
                validity: Validity { not_before: 0, not_after: 100 },
                version: 1,
            },
            Some((&anchor_key, anchor.name())),
            &mut rng,
        );
        assert!(!cert.is_self_signed());
        assert!(anchor.verify(cert.data()));
        assert_eq!(cert.key_name(), key_name(&sub_id, &sub_key.key_id()));
        let bytes = cert.data().encode().unwrap();
        let decoded = Certificate::from_data(Data::decode(&bytes).unwrap()).unwrap();
        assert_eq!(decoded, cert);
        assert_eq!(decoded.encryption_key(), &[5; 32]);
        assert!(decoded.validity().contains(100));
        assert!(!decoded.validity().contains(101));
    }
}
