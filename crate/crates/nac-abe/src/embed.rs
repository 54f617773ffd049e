//! Application data content: the CK name followed by the encrypted payload.
//!
//! ```text
//! 0x07 Name              CK object name
//! 0x93 encrypted payload nonce (12) | AES-256-GCM(ck, payload, aad = data name)
//! ```

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Nonce};
use ndn_core::tlv::{types, write_tlv, Reader};
use ndn_core::Name;
use rand::RngCore;

use crate::error::NacError;

pub const TLV_ENCRYPTED_PAYLOAD: u64 = 0x93;
const NONCE_LEN: usize = 12;

pub fn embed_ck_name(ck_name: &Name, ciphertext: &[u8]) -> Vec<u8> {
    let mut out = ck_name.encode();
    write_tlv(&mut out, TLV_ENCRYPTED_PAYLOAD, ciphertext);
    out
}

pub fn extract_ck_name(content: &[u8]) -> Result<(Name, Vec<u8>), NacError> {
    let mut r = Reader::new(content);
    let name = r.expect(types::NAME).map_err(|e| NacError::malformed("data content", e))?;
    let name = Name::decode_value(name.value)?;
    let payload = r.expect(TLV_ENCRYPTED_PAYLOAD)?.value.to_vec();
    r.finish()?;
    if name.is_empty() {
        return Err(NacError::malformed("data content", "empty CK name"));
    }
    Ok((name, payload))
}

pub fn seal_payload<R: RngCore>(ck: &[u8; 32], data_name: &Name, plaintext: &[u8], rng: &mut R) -> Vec<u8> {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let aad = data_name.encode();
    let ct = Aes256Gcm::new(ck.into())
        .encrypt(Nonce::from_slice(&nonce), Payload { msg: plaintext, aad: &aad })
        .expect("in-memory AEAD does not fail");
    let mut out = nonce.to_vec();
    out.extend_from_slice(&ct);
    out
}

pub fn open_payload(ck: &[u8; 32], data_name: &Name, sealed: &[u8]) -> Result<Vec<u8>, NacError> {
    if sealed.len() < NONCE_LEN {
        return Err(NacError::ContentDecryption);
    }
    let (nonce, ct) = sealed.split_at(NONCE_LEN);
    let aad = data_name.encode();
    Aes256Gcm::new(ck.into())
        .decrypt(Nonce::from_slice(nonce), Payload { msg: ct, aad: &aad })
        .map_err(|_| NacError::ContentDecryption)
}
