use std::collections::HashMap;

use abe_core::{decrypt, deserialize_ciphertext, deserialize_key, deserialize_params, AbeKey, AbeType, PublicParams};
use log::debug;
use ndn_core::{Certificate, Interest, Name, NodeId, Sim};
use trust_schema::{TrustSchema, Validator};

use crate::embed::{extract_ck_name, open_payload};
use crate::endpoint::{Publisher, Session};
use crate::error::NacError;
use crate::fetch::{FetchOptions, Fetched};
use crate::hybrid::unwrap;
use crate::identity::Identity;
use crate::naming::{dkey_prefix, pubparams_prefix};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecryptorStats {
    pub consumed: u64,
    pub denied: u64,
    pub ck_fetches: u64,
    pub dkey_fetches: u64,
    pub params_fetches: u64,
}

/// A consumer application. Its decryption key lives only in memory.
pub struct Decryptor {
    identity: Identity,
    aa_prefix: Name,
    abe_type: AbeType,
    publisher: Publisher,
    session: Session,
    params: Option<PublicParams>,
    dkey: Option<(u64, AbeKey)>,
    cks: HashMap<Name, [u8; 32]>,
    stats: DecryptorStats,
}

impl std::fmt::Debug for Decryptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Decryptor")
            .field("identity", self.identity.name())
            .field("dkey_version", &self.dkey_version())
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

impl Decryptor {
    pub fn new(
        sim: &mut Sim,
        node: NodeId,
        identity: Identity,
        schema: TrustSchema,
        aa_prefix: Name,
        abe_type: AbeType,
        fetch: FetchOptions,
    ) -> Result<Decryptor, NacError> {
        let publisher = Publisher::attach(sim, node, &[identity.name()])?;
        publisher.publish(identity.cert().data().clone());
        let session = Session::new(publisher.face(), Validator::new(schema), fetch);
        Ok(Decryptor {
            identity,
            aa_prefix,
            abe_type,
            publisher,
            session,
            params: None,
            dkey: None,
            cks: HashMap::new(),
            stats: DecryptorStats::default(),
        })
    }

    pub fn certificate(&self) -> &Certificate {
        self.identity.cert()
    }

    pub fn key_name(&self) -> Name {
        self.identity.key_name()
    }

    pub fn stats(&self) -> DecryptorStats {
        self.stats
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn dkey_version(&self) -> Option<u64> {
        self.dkey.as_ref().map(|(v, _)| *v)
    }

    pub fn face(&self) -> ndn_core::FaceId {
        self.publisher.face()
    }

    fn install_dkey(&mut self, fetched: &Fetched) -> Result<(), NacError> {
        let version = fetched
            .name
            .version()
            .ok_or_else(|| NacError::malformed("DKEY name", &fetched.name))?;
        let key = deserialize_key(&unwrap(self.identity.encryption_keys(), &fetched.bytes())?)?;
        if key.abe_type != self.abe_type {
            return Err(NacError::malformed("DKEY", "wrong ABE type"));
        }
        debug!("installed DKEY v{version}");
        self.stats.dkey_fetches += 1;
        self.dkey = Some((version, key));
        Ok(())
    }

    fn ensure_dkey(&mut self, sim: &mut Sim) -> Result<(), NacError> {
        if self.dkey.is_none() {
            let fetched = self.session.discover(sim, &dkey_prefix(&self.aa_prefix, &self.key_name()))?;
            self.install_dkey(&fetched)?;
        }
        Ok(())
    }

    fn ensure_params(&mut self, sim: &mut Sim) -> Result<(), NacError> {
        if self.params.is_none() {
            let fetched = self.session.discover(sim, &pubparams_prefix(&self.aa_prefix, self.abe_type))?;
            let params = deserialize_params(&fetched.bytes())?;
            if params.abe_type != self.abe_type {
                return Err(NacError::malformed("public parameters", "wrong ABE type"));
            }
            self.stats.params_fetches += 1;
            self.params = Some(params);
        }
        Ok(())
    }

    /// Looks for a re-granted DKEY after the current one fell short.
    fn probe_dkey(&mut self, sim: &mut Sim) -> Result<bool, NacError> {
        let known = self.dkey_version().unwrap_or(0);
        match self.session.probe_newer(sim, &dkey_prefix(&self.aa_prefix, &self.key_name()), known) {
            Some(f) => self.install_dkey(&f).map(|_| true),
            None => Ok(false),
        }
    }

    fn content_key(&mut self, sim: &mut Sim, ck_name: &Name) -> Result<[u8; 32], NacError> {
        if let Some(ck) = self.cks.get(ck_name) {
            return Ok(*ck);
        }
        let first = Interest::new(ck_name.clone()).can_be_prefix(true);
        let fetched = self.session.fetch_object(sim, &first, self.session.options)?;
        if &fetched.name != ck_name {
            return Err(NacError::malformed("CK", format!("asked for {ck_name}, got {}", fetched.name)));
        }
        self.stats.ck_fetches += 1;
        let ct = deserialize_ciphertext(&fetched.bytes())?;
        self.ensure_params(sim)?;
        self.ensure_dkey(sim)?;
        let opened = loop {
            let params = self.params.as_ref().expect("ensured");
            let (_, key) = self.dkey.as_ref().expect("ensured");
            match decrypt(params, key, &ct) {
                Err(abe_core::AbeError::PolicyNotSatisfied) => {
                    if !self.probe_dkey(sim)? {
                        return Err(NacError::PolicyNotSatisfied);
                    }
                }
                other => break other?,
            }
        };
        let ck: [u8; 32] = opened
            .try_into()
            .map_err(|_| NacError::malformed("CK", "content key is not 32 bytes"))?;
        self.cks.insert(ck_name.clone(), ck);
        Ok(ck)
    }

    /// Fetches, validates and decrypts the application data named `data_name`.
    pub fn consume(&mut self, sim: &mut Sim, data_name: &Name) -> Result<Vec<u8>, NacError> {
        let result = self.consume_inner(sim, data_name);
        match &result {
            Ok(_) => self.stats.consumed += 1,
            Err(NacError::PolicyNotSatisfied) => self.stats.denied += 1,
            Err(_) => {}
        }
        result
    }

    fn consume_inner(&mut self, sim: &mut Sim, data_name: &Name) -> Result<Vec<u8>, NacError> {
        let data = self.session.fetch_data(sim, &Interest::new(data_name.clone()))?;
        let (ck_name, sealed) = extract_ck_name(&data.content)?;
        let ck = self.content_key(sim, &ck_name)?;
        open_payload(&ck, &data.name, &sealed)
    }

    /// Drops every cached key and parameter set.
    pub fn forget_keys(&mut self) {
        self.params = None;
        self.dkey = None;
        self.cks.clear();
    }
}
