//! Emulated KP-ABE and CP-ABE over GF(2^61 - 1).
//!
//! Group exponents are computed in the clear: decryptability is exactly
//! policy satisfaction and the tree structure is the real one, but the
//! published `t_x` values and the `__master__` slot leave no secrecy against
//! anyone holding the public parameters.

use std::collections::BTreeMap;

use aes_gcm::aead::{Aead, Payload};
use aes_gcm::{Aes256Gcm, KeyInit, Nonce};
use rand::{CryptoRng, Rng, RngCore};
use sha2::{Digest, Sha256};

use crate::attribute::{Attribute, AttributeSet};
use crate::error::AbeError;
use crate::field::Fe;
use crate::policy::PolicyExpr;
use crate::sharing::{reconstruct, share_leaves, Selection};
use crate::tree::{build_access_tree, satisfies, AccessTree};

pub type ParamsId = [u8; 16];

const KDF_DOMAIN: &[u8; 16] = b"nacabe-kdf-v1\0\0\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AbeType {
    Cp,
    Kp,
}

impl AbeType {
    pub fn as_str(self) -> &'static str {
        match self {
            AbeType::Cp => "CP",
            AbeType::Kp => "KP",
        }
    }

    pub fn parse(s: &str) -> Option<AbeType> {
        match s.to_ascii_uppercase().as_str() {
            "CP" => Some(AbeType::Cp),
            "KP" => Some(AbeType::Kp),
            _ => None,
        }
    }
}

impl std::fmt::Display for AbeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pub abe_type: AbeType,
    pub params_id: ParamsId,
    /// `t_x` per attribute, plus the master value under `__master__`.
    pub attr_public: BTreeMap<Attribute, Fe>,
    pub version: u64,
}

impl PublicParams {
    pub fn knows(&self, a: &Attribute) -> bool {
        self.attr_public.contains_key(a)
    }

    fn master_value(&self) -> Result<Fe, AbeError> {
        self.attr_public
            .get(&Attribute::master())
            .copied()
            .ok_or_else(|| AbeError::Malformed("params lack the master slot".into()))
    }

    fn t(&self, a: &Attribute) -> Result<Fe, AbeError> {
        self.attr_public
            .get(a)
            .copied()
            .ok_or_else(|| AbeError::UnknownAttribute(a.to_string()))
    }

    /// Every attribute in `attrs` that these params cannot encrypt to.
    pub fn missing<'a>(&self, attrs: impl IntoIterator<Item = &'a Attribute>) -> Vec<Attribute> {
        attrs.into_iter().filter(|a| !self.knows(a)).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey {
    pub y: Fe,
    pub attr_secret: BTreeMap<Attribute, Fe>,
    pub params_id: ParamsId,
}

impl MasterKey {
    /// Adds fresh `t_x` values for unseen attributes, mirroring them into
    /// `params`. Bumps the params version once if anything was added.
    pub fn extend<'a, R: Rng + ?Sized>(
        &mut self,
        params: &mut PublicParams,
        attrs: impl IntoIterator<Item = &'a Attribute>,
        rng: &mut R,
    ) -> bool {
        let mut grew = false;
        for a in attrs {
            if self.attr_secret.contains_key(a) {
                continue;
            }
            let t = Fe::random_nonzero(rng);
            self.attr_secret.insert(a.clone(), t);
            params.attr_public.insert(a.clone(), t);
            grew = true;
        }
        if grew {
            params.version += 1;
        }
        grew
    }

    fn t(&self, a: &Attribute) -> Result<Fe, AbeError> {
        self.attr_secret
            .get(a)
            .copied()
            .ok_or_else(|| AbeError::UnknownAttribute(a.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyBody {
    /// Access tree with `d_x = q_x(0) / t_x` per leaf, preorder.
    Kp { tree: AccessTree, leaf_values: Vec<Fe> },
    /// `k_x = y / t_x` per attribute.
    Cp { attrs: BTreeMap<Attribute, Fe> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbeKey {
    pub abe_type: AbeType,
    pub params_id: ParamsId,
    pub body: KeyBody,
}

impl AbeKey {
    /// Number of leaves (KP) or attributes (CP) carried.
    pub fn size_hint(&self) -> usize {
        match &self.body {
            KeyBody::Kp { leaf_values, .. } => leaf_values.len(),
            KeyBody::Cp { attrs } => attrs.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CiphertextBody {
    /// `c_x = t_x * s` per attribute.
    Kp { attrs: BTreeMap<Attribute, Fe> },
    /// Access tree with `c_x = q_x(0) * t_x` per leaf, preorder.
    Cp { tree: AccessTree, leaf_values: Vec<Fe> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbeCiphertext {
    pub abe_type: AbeType,
    pub params_id: ParamsId,
    pub body: CiphertextBody,
    pub nonce: [u8; 12],
    /// AES-256-GCM output, tag included.
    pub payload: Vec<u8>,
}

impl AbeCiphertext {
    /// Attribute set a KP ciphertext was made for, without the reserved
    /// attribute.
    pub fn attributes(&self) -> Option<AttributeSet> {
        match &self.body {
            CiphertextBody::Kp { attrs } => Some(attrs.keys().filter(|a| !a.is_reserved()).cloned().collect()),
            CiphertextBody::Cp { .. } => None,
        }
    }

    pub fn tree(&self) -> Option<&AccessTree> {
        match &self.body {
            CiphertextBody::Cp { tree, .. } => Some(tree),
            CiphertextBody::Kp { .. } => None,
        }
    }
}

/// Fresh parameters. The reserved always attribute is registered up front
/// and the version starts at 1.
pub fn setup<R: RngCore + CryptoRng>(abe_type: AbeType, rng: &mut R) -> (PublicParams, MasterKey) {
    let mut params_id = [0u8; 16];
    rng.fill_bytes(&mut params_id);
    let y = Fe::random_nonzero(rng);
    let t_always = Fe::random_nonzero(rng);
    let params = PublicParams {
        abe_type,
        params_id,
        attr_public: BTreeMap::from([(Attribute::master(), y), (Attribute::always(), t_always)]),
        version: 1,
    };
    let master = MasterKey {
        y,
        attr_secret: BTreeMap::from([(Attribute::always(), t_always)]),
        params_id,
    };
    (params, master)
}

/// Symmetric key derived from the blinding value `y * s`.
pub fn kdf(params_id: &ParamsId, ys: Fe) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(KDF_DOMAIN);
    h.update(params_id);
    h.update(ys.to_be_bytes());
    h.finalize().into()
}

fn seal<R: RngCore + CryptoRng>(params_id: &ParamsId, ys: Fe, plaintext: &[u8], rng: &mut R) -> ([u8; 12], Vec<u8>) {
    let cipher = Aes256Gcm::new(&kdf(params_id, ys).into());
    let mut nonce = [0u8; 12];
    rng.fill_bytes(&mut nonce);
    let ct = cipher
        .encrypt(Nonce::from_slice(&nonce), Payload { msg: plaintext, aad: params_id })
        .expect("in-memory AES-GCM cannot fail");
    (nonce, ct)
}

fn open(params_id: &ParamsId, ys: Fe, nonce: &[u8; 12], payload: &[u8]) -> Result<Vec<u8>, AbeError> {
    let cipher = Aes256Gcm::new(&kdf(params_id, ys).into());
    cipher
        .decrypt(Nonce::from_slice(nonce), Payload { msg: payload, aad: params_id })
        .map_err(|_| AbeError::AuthenticationFailed)
}

fn check_type(params: &PublicParams, want: AbeType) -> Result<(), AbeError> {
    if params.abe_type != want {
        return Err(AbeError::ParamsMismatch);
    }
    Ok(())
}

/// KP key for `policy`. Every leaf attribute must already be registered;
/// see [`kp_keygen_extending`].
pub fn kp_keygen<R: RngCore + CryptoRng>(master: &MasterKey, policy: &PolicyExpr, rng: &mut R) -> Result<AbeKey, AbeError> {
    let tree = build_access_tree(policy)?;
    kp_keygen_tree(master, tree, rng)
}

pub fn kp_keygen_tree<R: RngCore + CryptoRng>(master: &MasterKey, tree: AccessTree, rng: &mut R) -> Result<AbeKey, AbeError> {
    let ts: Vec<Fe> = tree.leaves().into_iter().map(|a| master.t(a)).collect::<Result<_, _>>()?;
    let shares = share_leaves(&tree, master.y, rng);
    let leaf_values = shares
        .into_iter()
        .zip(ts)
        .map(|(q, t)| q * t.inv().expect("t_x is nonzero"))
        .collect();
    Ok(AbeKey {
        abe_type: AbeType::Kp,
        params_id: master.params_id,
        body: KeyBody::Kp { tree, leaf_values },
    })
}

/// [`kp_keygen`] after registering any unseen leaf attributes.
pub fn kp_keygen_extending<R: RngCore + CryptoRng>(
    master: &mut MasterKey,
    params: &mut PublicParams,
    policy: &PolicyExpr,
    rng: &mut R,
) -> Result<AbeKey, AbeError> {
    check_type(params, AbeType::Kp)?;
    let tree = build_access_tree(policy)?;
    master.extend(params, tree.leaves(), rng);
    kp_keygen_tree(master, tree, rng)
}

pub fn kp_encrypt<R: RngCore + CryptoRng>(
    params: &PublicParams,
    attrs: &AttributeSet,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<AbeCiphertext, AbeError> {
    check_type(params, AbeType::Kp)?;
    if attrs.is_empty() {
        return Err(AbeError::EmptyAttributes);
    }
    let y = params.master_value()?;
    let s = Fe::random_nonzero(rng);
    let mut cs = BTreeMap::new();
    for a in attrs.iter().chain(std::iter::once(&Attribute::always())) {
        cs.insert(a.clone(), params.t(a)? * s);
    }
    let (nonce, payload) = seal(&params.params_id, y * s, plaintext, rng);
    Ok(AbeCiphertext {
        abe_type: AbeType::Kp,
        params_id: params.params_id,
        body: CiphertextBody::Kp { attrs: cs },
        nonce,
        payload,
    })
}

/// CP key for `attrs`; the reserved always attribute is added. Every
/// attribute must already be registered; see [`cp_keygen_extending`].
pub fn cp_keygen(master: &MasterKey, attrs: &AttributeSet) -> Result<AbeKey, AbeError> {
    if attrs.is_empty() {
        return Err(AbeError::EmptyAttributes);
    }
    let mut ks = BTreeMap::new();
    for a in attrs.iter().chain(std::iter::once(&Attribute::always())) {
        ks.insert(a.clone(), master.y * master.t(a)?.inv().expect("t_x is nonzero"));
    }
    Ok(AbeKey {
        abe_type: AbeType::Cp,
        params_id: master.params_id,
        body: KeyBody::Cp { attrs: ks },
    })
}

pub fn cp_keygen_extending<R: RngCore + CryptoRng>(
    master: &mut MasterKey,
    params: &mut PublicParams,
    attrs: &AttributeSet,
    rng: &mut R,
) -> Result<AbeKey, AbeError> {
    check_type(params, AbeType::Cp)?;
    master.extend(params, attrs.iter(), rng);
    cp_keygen(master, attrs)
}

pub fn cp_encrypt<R: RngCore + CryptoRng>(
    params: &PublicParams,
    policy: &PolicyExpr,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<AbeCiphertext, AbeError> {
    let tree = build_access_tree(policy)?;
    cp_encrypt_tree(params, tree, plaintext, rng)
}

pub fn cp_encrypt_tree<R: RngCore + CryptoRng>(
    params: &PublicParams,
    tree: AccessTree,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<AbeCiphertext, AbeError> {
    check_type(params, AbeType::Cp)?;
    let y = params.master_value()?;
    let ts: Vec<Fe> = tree.leaves().into_iter().map(|a| params.t(a)).collect::<Result<_, _>>()?;
    let s = Fe::random_nonzero(rng);
    let shares = share_leaves(&tree, s, rng);
    let leaf_values = shares.into_iter().zip(ts).map(|(q, t)| q * t).collect();
    let (nonce, payload) = seal(&params.params_id, y * s, plaintext, rng);
    Ok(AbeCiphertext {
        abe_type: AbeType::Cp,
        params_id: params.params_id,
        body: CiphertextBody::Cp { tree, leaf_values },
        nonce,
        payload,
    })
}

/// Recovers the blinding value `y * s`, choosing children per `selection`.
pub fn recover_blinding(key: &AbeKey, ct: &AbeCiphertext, selection: Selection) -> Result<Fe, AbeError> {
    if key.params_id != ct.params_id || key.abe_type != ct.abe_type {
        return Err(AbeError::ParamsMismatch);
    }
    let ys = match (&key.body, &ct.body) {
        (KeyBody::Kp { tree, leaf_values }, CiphertextBody::Kp { attrs }) => {
            reconstruct(tree, &mut |i, a| attrs.get(a).map(|c| leaf_values[i] * *c), selection)
        }
        (KeyBody::Cp { attrs }, CiphertextBody::Cp { tree, leaf_values }) => {
            reconstruct(tree, &mut |i, a| attrs.get(a).map(|k| *k * leaf_values[i]), selection)
        }
        _ => return Err(AbeError::ParamsMismatch),
    };
    ys.ok_or(AbeError::PolicyNotSatisfied)
}

/// Whether `key` may open `ct` by policy alone.
pub fn policy_allows(key: &AbeKey, ct: &AbeCiphertext) -> bool {
    match (&key.body, &ct.body) {
        (KeyBody::Kp { tree, .. }, CiphertextBody::Kp { attrs }) => {
            satisfies(tree, &attrs.keys().cloned().collect())
        }
        (KeyBody::Cp { attrs }, CiphertextBody::Cp { tree, .. }) => {
            satisfies(tree, &attrs.keys().cloned().collect())
        }
        _ => false,
    }
}

pub fn decrypt(params: &PublicParams, key: &AbeKey, ct: &AbeCiphertext) -> Result<Vec<u8>, AbeError> {
    if params.params_id != ct.params_id || params.abe_type != ct.abe_type {
        return Err(AbeError::ParamsMismatch);
    }
    if key.params_id != ct.params_id || key.abe_type != ct.abe_type {
        return Err(AbeError::ParamsMismatch);
    }
    if !policy_allows(key, ct) {
        return Err(AbeError::PolicyNotSatisfied);
    }
    let ys = recover_blinding(key, ct, Selection::LowestIndex)?;
    open(&ct.params_id, ys, &ct.nonce, &ct.payload)
}
