//! The encryption-provider boundary. The protocol layer only needs these
//! operations, so a pairing-based backend can stand in for [`Emulated`].

use rand::{CryptoRng, RngCore};

use crate::attribute::AttributeSet;
use crate::error::AbeError;
use crate::policy::PolicyExpr;
use crate::scheme::{self, AbeCiphertext, AbeKey, AbeType, MasterKey, PublicParams};
use crate::serialize;

pub trait AbeProvider {
    type Params: Clone;
    type Master;
    type Key;
    type Ciphertext;

    fn setup<R: RngCore + CryptoRng>(&self, abe_type: AbeType, rng: &mut R) -> (Self::Params, Self::Master);

    /// KP key generation; may grow the attribute universe.
    fn kp_keygen<R: RngCore + CryptoRng>(
        &self,
        master: &mut Self::Master,
        params: &mut Self::Params,
        policy: &PolicyExpr,
        rng: &mut R,
    ) -> Result<Self::Key, AbeError>;

    /// CP key generation; may grow the attribute universe.
    fn cp_keygen<R: RngCore + CryptoRng>(
        &self,
        master: &mut Self::Master,
        params: &mut Self::Params,
        attrs: &AttributeSet,
        rng: &mut R,
    ) -> Result<Self::Key, AbeError>;

    fn kp_encrypt<R: RngCore + CryptoRng>(
        &self,
        params: &Self::Params,
        attrs: &AttributeSet,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<Self::Ciphertext, AbeError>;

    fn cp_encrypt<R: RngCore + CryptoRng>(
        &self,
        params: &Self::Params,
        policy: &PolicyExpr,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<Self::Ciphertext, AbeError>;

    fn decrypt(&self, params: &Self::Params, key: &Self::Key, ct: &Self::Ciphertext) -> Result<Vec<u8>, AbeError>;

    fn params_version(&self, params: &Self::Params) -> u64;

    fn encode_params(&self, params: &Self::Params) -> Vec<u8>;
    fn decode_params(&self, bytes: &[u8]) -> Result<Self::Params, AbeError>;
    fn encode_key(&self, key: &Self::Key) -> Vec<u8>;
    fn decode_key(&self, bytes: &[u8]) -> Result<Self::Key, AbeError>;
    fn encode_ciphertext(&self, ct: &Self::Ciphertext) -> Vec<u8>;
    fn decode_ciphertext(&self, bytes: &[u8]) -> Result<Self::Ciphertext, AbeError>;
}

/// The arithmetic emulation in [`crate::scheme`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Emulated;

impl AbeProvider for Emulated {
    type Params = PublicParams;
    type Master = MasterKey;
    type Key = AbeKey;
    type Ciphertext = AbeCiphertext;

    fn setup<R: RngCore + CryptoRng>(&self, abe_type: AbeType, rng: &mut R) -> (PublicParams, MasterKey) {
        scheme::setup(abe_type, rng)
    }

    fn kp_keygen<R: RngCore + CryptoRng>(
        &self,
        master: &mut MasterKey,
        params: &mut PublicParams,
        policy: &PolicyExpr,
        rng: &mut R,
    ) -> Result<AbeKey, AbeError> {
        scheme::kp_keygen_extending(master, params, policy, rng)
    }

    fn cp_keygen<R: RngCore + CryptoRng>(
        &self,
        master: &mut MasterKey,
        params: &mut PublicParams,
        attrs: &AttributeSet,
        rng: &mut R,
    ) -> Result<AbeKey, AbeError> {
        scheme::cp_keygen_extending(master, params, attrs, rng)
    }

    fn kp_encrypt<R: RngCore + CryptoRng>(
        &self,
        params: &PublicParams,
        attrs: &AttributeSet,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<AbeCiphertext, AbeError> {
        scheme::kp_encrypt(params, attrs, plaintext, rng)
    }

    fn cp_encrypt<R: RngCore + CryptoRng>(
        &self,
        params: &PublicParams,
        policy: &PolicyExpr,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<AbeCiphertext, AbeError> {
        scheme::cp_encrypt(params, policy, plaintext, rng)
    }

    fn decrypt(&self, params: &PublicParams, key: &AbeKey, ct: &AbeCiphertext) -> Result<Vec<u8>, AbeError> {
        scheme::decrypt(params, key, ct)
    }

    fn params_version(&self, params: &PublicParams) -> u64 {
        params.version
    }

    fn encode_params(&self, params: &PublicParams) -> Vec<u8> {
        serialize::serialize_params(params)
    }

    fn decode_params(&self, bytes: &[u8]) -> Result<PublicParams, AbeError> {
        serialize::deserialize_params(bytes)
    }

    fn encode_key(&self, key: &AbeKey) -> Vec<u8> {
        serialize::serialize_key(key)
    }

    fn decode_key(&self, bytes: &[u8]) -> Result<AbeKey, AbeError> {
        serialize::deserialize_key(bytes)
    }

    fn encode_ciphertext(&self, ct: &AbeCiphertext) -> Vec<u8> {
        serialize::serialize_ciphertext(ct)
    }

    fn decode_ciphertext(&self, bytes: &[u8]) -> Result<AbeCiphertext, AbeError> {
        serialize::deserialize_ciphertext(bytes)
    }
}
