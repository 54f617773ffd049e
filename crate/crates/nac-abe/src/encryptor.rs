use std::collections::BTreeMap;

use abe_core::{
    build_access_tree, cp_encrypt, deserialize_params, kp_encrypt, serialize_ciphertext, AbeType, Attribute, AttributeSet,
    PolicyExpr, PublicParams,
};
use log::{debug, info};
use ndn_core::{Certificate, ContentType, Data, Name, NodeId, Sim};
use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use trust_schema::{TrustSchema, Validator};

use crate::embed::{embed_ck_name, seal_payload};
use crate::endpoint::{Publisher, Session};
use crate::error::NacError;
use crate::fetch::FetchOptions;
use crate::identity::Identity;
use crate::naming::{ck_name, pubparams_prefix, CK, FRESHNESS_APP_DATA_MS, FRESHNESS_CK_MS};
use crate::segment::{publish_segments, SegmentSpec};

/// What data is encrypted to: attributes under KP, a policy under CP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tag {
    Attributes(AttributeSet),
    Policy(PolicyExpr),
}

impl Tag {
    pub fn kind(&self) -> &'static str {
        match self {
            Tag::Attributes(_) => "attributes",
            Tag::Policy(_) => "a policy",
        }
    }

    /// Cache key and ENC-BY text.
    pub fn canonical(&self) -> String {
        match self {
            Tag::Attributes(a) => a.canonical_text(),
            Tag::Policy(p) => p.to_string(),
        }
    }

    fn fits(&self, abe_type: AbeType) -> bool {
        matches!((self, abe_type), (Tag::Attributes(_), AbeType::Kp) | (Tag::Policy(_), AbeType::Cp))
    }

    /// Attributes the parameters must know to encrypt under this tag.
    pub fn required(&self) -> Result<Vec<Attribute>, NacError> {
        Ok(match self {
            Tag::Attributes(a) => a.iter().cloned().collect(),
            Tag::Policy(p) => build_access_tree(p)?.leaves().into_iter().cloned().collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CachePolicy {
    pub max_items: u64,
    pub max_age_ms: u64,
}

impl Default for CachePolicy {
    fn default() -> Self {
        CachePolicy {
            max_items: 100,
            max_age_ms: 3_600_000,
        }
    }
}

impl CachePolicy {
    pub fn new(max_items: u64, max_age_ms: u64) -> Self {
        CachePolicy { max_items, max_age_ms }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkCacheEntry {
    pub cache_key: String,
    pub ck: [u8; 32],
    pub ck_name: Name,
    pub items_encrypted: u64,
    pub created_at: u64,
    pub ck_version: u64,
}

/// One live content key per distinct tag, retired after `max_items` uses
/// or `max_age_ms`.
#[derive(Debug, Clone)]
pub struct CkCache {
    policy: CachePolicy,
    entries: BTreeMap<String, CkCacheEntry>,
    last_version: u64,
}

impl CkCache {
    pub fn new(policy: CachePolicy) -> Self {
        CkCache {
            policy,
            entries: BTreeMap::new(),
            last_version: 0,
        }
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    /// The live entry for `key` at time `now`, counting one more use.
    pub fn use_live(&mut self, key: &str, now: u64) -> Option<&CkCacheEntry> {
        let policy = self.policy;
        let live = self.entries.get(key).is_some_and(|e| {
            e.items_encrypted < policy.max_items && now.saturating_sub(e.created_at) < policy.max_age_ms
        });
        if !live {
            return None;
        }
        let e = self.entries.get_mut(key).expect("checked above");
        e.items_encrypted += 1;
        Some(e)
    }

    pub fn next_version(&self) -> u64 {
        self.last_version + 1
    }

    /// Replaces any entry for the key with a freshly minted one that has
    /// already been used once.
    pub fn insert(&mut self, key: String, ck: [u8; 32], ck_name: Name, now: u64) -> &CkCacheEntry {
        self.last_version += 1;
        let entry = CkCacheEntry {
            cache_key: key.clone(),
            ck,
            ck_name,
            items_encrypted: 1,
            created_at: now,
            ck_version: self.last_version,
        };
        self.entries.insert(key.clone(), entry);
        &self.entries[&key]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncryptorStats {
    pub items: u64,
    pub cks_minted: u64,
    pub abe_encryptions: u64,
    pub params_fetches: u64,
}

/// A producer application that encrypts under cached content keys.
pub struct Encryptor {
    identity: Identity,
    prefix: Name,
    aa_prefix: Name,
    abe_type: AbeType,
    publisher: Publisher,
    session: Session,
    params: Option<PublicParams>,
    cache: CkCache,
    mss: usize,
    stats: EncryptorStats,
    rng: ChaCha20Rng,
}

impl std::fmt::Debug for Encryptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Encryptor")
            .field("prefix", &self.prefix)
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

pub struct EncryptorConfig {
    pub prefix: Name,
    pub aa_prefix: Name,
    pub abe_type: AbeType,
    pub cache: CachePolicy,
    pub mss: usize,
    pub fetch: FetchOptions,
}

impl Encryptor {
    pub fn new(
        sim: &mut Sim,
        node: NodeId,
        identity: Identity,
        schema: TrustSchema,
        config: EncryptorConfig,
        rng: ChaCha20Rng,
    ) -> Result<Encryptor, NacError> {
        let publisher = Publisher::attach(sim, node, &[identity.name(), &config.prefix])?;
        publisher.publish(identity.cert().data().clone());
        let session = Session::new(publisher.face(), Validator::new(schema), config.fetch);
        Ok(Encryptor {
            identity,
            prefix: config.prefix,
            aa_prefix: config.aa_prefix,
            abe_type: config.abe_type,
            publisher,
            session,
            params: None,
            cache: CkCache::new(config.cache),
            mss: config.mss,
            stats: EncryptorStats::default(),
            rng,
        })
    }

    pub fn prefix(&self) -> &Name {
        &self.prefix
    }

    pub fn certificate(&self) -> &Certificate {
        self.identity.cert()
    }

    pub fn publisher(&self) -> &Publisher {
        &self.publisher
    }

    pub fn stats(&self) -> EncryptorStats {
        self.stats
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn params_version(&self) -> Option<u64> {
        self.params.as_ref().map(|p| p.version)
    }

    /// Distinct CK objects in the repository.
    pub fn ck_objects(&self) -> Vec<Name> {
        self.publisher.objects_with(CK)
    }

    fn install_params(&mut self, bytes: &[u8]) -> Result<(), NacError> {
        let params = deserialize_params(bytes)?;
        if params.abe_type != self.abe_type {
            return Err(NacError::malformed("public parameters", "wrong ABE type"));
        }
        self.stats.params_fetches += 1;
        self.params = Some(params);
        Ok(())
    }

    /// Fetches the latest public parameters.
    pub fn refresh_params(&mut self, sim: &mut Sim) -> Result<(), NacError> {
        let fetched = self.session.discover(sim, &pubparams_prefix(&self.aa_prefix, self.abe_type))?;
        self.install_params(&fetched.bytes())
    }

    fn probe_params(&mut self, sim: &mut Sim) -> Result<bool, NacError> {
        let known = self.params.as_ref().map_or(0, |p| p.version);
        match self.session.probe_newer(sim, &pubparams_prefix(&self.aa_prefix, self.abe_type), known) {
            Some(f) => self.install_params(&f.bytes()).map(|_| true),
            None => Ok(false),
        }
    }

    fn missing(&self, required: &[Attribute]) -> Vec<Attribute> {
        self.params.as_ref().map_or_else(|| required.to_vec(), |p| p.missing(required))
    }

    /// Encrypts `payload` under `tag` and publishes it as `data_name`.
    pub fn produce(&mut self, sim: &mut Sim, data_name: &Name, payload: &[u8], tag: &Tag) -> Result<Data, NacError> {
        if !tag.fits(self.abe_type) {
            return Err(NacError::TagTypeMismatch {
                abe_type: self.abe_type.as_str(),
                tag: tag.kind(),
            });
        }
        if self.params.is_none() {
            self.refresh_params(sim)?;
        }
        let required = tag.required()?;
        if !self.missing(&required).is_empty() {
            debug!("params v{:?} lack attributes; probing for newer", self.params_version());
            self.probe_params(sim)?;
            if let Some(a) = self.missing(&required).into_iter().next() {
                return Err(NacError::UnknownAttribute(a.to_string()));
            }
        }

        let key = tag.canonical();
        let now = sim.now();
        let (ck, ck_obj) = match self.cache.use_live(&key, now) {
            Some(e) => (e.ck, e.ck_name.clone()),
            None => self.mint(&key, tag, now)?,
        };
        let sealed = seal_payload(&ck, data_name, payload, &mut self.rng);
        let data = Data::new(data_name.clone(), embed_ck_name(&ck_obj, &sealed))
            .with_freshness(FRESHNESS_APP_DATA_MS)
            .with_content_type(ContentType::Blob);
        let data = self.identity.sign(data, &mut self.rng);
        self.publisher.publish(data.clone());
        self.stats.items += 1;
        Ok(data)
    }

    fn mint(&mut self, key: &str, tag: &Tag, now: u64) -> Result<([u8; 32], Name), NacError> {
        let params = self.params.as_ref().expect("params fetched before minting");
        let mut ck = [0u8; 32];
        self.rng.fill_bytes(&mut ck);
        let ct = match tag {
            Tag::Attributes(a) => kp_encrypt(params, a, &ck, &mut self.rng)?,
            Tag::Policy(p) => cp_encrypt(params, p, &ck, &mut self.rng)?,
        };
        self.stats.abe_encryptions += 1;
        let name = ck_name(&self.prefix, self.cache.next_version(), key);
        let spec = SegmentSpec {
            name: &name,
            mss: self.mss,
            freshness_ms: FRESHNESS_CK_MS,
            content_type: ContentType::Blob,
        };
        let object = publish_segments(spec, &serialize_ciphertext(&ct), &self.identity, &mut self.rng)?;
        self.publisher.publish_object(&object);
        self.cache.insert(key.to_owned(), ck, name.clone(), now);
        self.stats.cks_minted += 1;
        info!("minted {name} ({} segments)", object.segment_count());
        Ok((ck, name))
    }
}
