use ndn_core::security::key_name;
use ndn_core::{sign_data, Certificate, CertificateRequest, Data, KeyPair, Name, Validity};
use rand::{CryptoRng, RngCore};

use crate::hybrid::EncryptionKeyPair;

/// A named entity with a signing key, an encryption key and a certificate
/// binding both to its name.
#[derive(Debug, Clone)]
pub struct Identity {
    name: Name,
    signing: KeyPair,
    encryption: EncryptionKeyPair,
    cert: Certificate,
}

impl Identity {
    /// A self-signed trust anchor.
    pub fn anchor<R: RngCore + CryptoRng>(name: Name, rng: &mut R) -> Identity {
        Self::create(name, None, rng)
    }

    /// An identity certified by `issuer`.
    pub fn issued<R: RngCore + CryptoRng>(name: Name, issuer: &Identity, rng: &mut R) -> Identity {
        Self::create(name, Some(issuer), rng)
    }

    fn create<R: RngCore + CryptoRng>(name: Name, issuer: Option<&Identity>, rng: &mut R) -> Identity {
        let signing = KeyPair::generate(rng);
        let encryption = EncryptionKeyPair::generate(rng);
        let enc_pub = encryption.public_key();
        let cert = Certificate::issue(
            CertificateRequest {
                identity: &name,
                subject: &signing,
                encryption_key: &enc_pub,
                validity: Validity::FOREVER,
                version: 1,
            },
            issuer.map(|i| (&i.signing, i.cert.name())),
            rng,
        );
        Identity {
            name,
            signing,
            encryption,
            cert,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn key_name(&self) -> Name {
        key_name(&self.name, &self.signing.key_id())
    }

    pub fn cert(&self) -> &Certificate {
        &self.cert
    }

    pub fn encryption_keys(&self) -> &EncryptionKeyPair {
        &self.encryption
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, data: Data, rng: &mut R) -> Data {
        sign_data(data, &self.signing, self.cert.name(), rng)
    }
}
