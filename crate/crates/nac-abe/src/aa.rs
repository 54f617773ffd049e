use std::collections::{BTreeMap, BTreeSet};

use abe_core::scheme::{cp_keygen_extending, kp_keygen_extending};
use abe_core::{serialize_key, serialize_params, setup, AbeType, Attribute, AttributeSet, MasterKey, PolicyExpr, PublicParams};
use log::info;
use ndn_core::{Certificate, ContentType, Name, NodeId, Sim};
use rand_chacha::ChaCha20Rng;

use crate::endpoint::Publisher;
use crate::error::NacError;
use crate::hybrid::wrap;
use crate::identity::Identity;
use crate::naming::{dkey_name, pubparams_name, DKEY, FRESHNESS_DKEY_MS, FRESHNESS_PUBPARAMS_MS};
use crate::segment::{publish_segments, SegmentSpec};

/// What a consumer is entitled to: a policy under KP, attributes under CP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grant {
    Policy(PolicyExpr),
    Attributes(AttributeSet),
}

impl Grant {
    pub fn kind(&self) -> &'static str {
        match self {
            Grant::Policy(_) => "a policy",
            Grant::Attributes(_) => "attributes",
        }
    }

    fn fits(&self, abe_type: AbeType) -> bool {
        matches!((self, abe_type), (Grant::Policy(_), AbeType::Kp) | (Grant::Attributes(_), AbeType::Cp))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrantRecord {
    pub grant: Grant,
    pub version: u64,
    /// DKEY object name, without segment.
    pub dkey: Name,
    /// DKEY content bytes across all segments.
    pub dkey_bytes: usize,
    pub segments: usize,
    /// Serialized ABE key bytes before wrapping.
    pub abe_key_bytes: usize,
}

/// Generates parameters and per-consumer decryption keys and publishes both.
pub struct AttributeAuthority {
    identity: Identity,
    anchor: Certificate,
    publisher: Publisher,
    params: PublicParams,
    master: MasterKey,
    grants: BTreeMap<Name, GrantRecord>,
    published: BTreeSet<u64>,
    mss: usize,
    rng: ChaCha20Rng,
}

impl std::fmt::Debug for AttributeAuthority {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AttributeAuthority")
            .field("prefix", self.identity.name())
            .field("abe_type", &self.params.abe_type)
            .field("params_version", &self.params.version)
            .field("grants", &self.grants.len())
            .finish_non_exhaustive()
    }
}

impl AttributeAuthority {
    /// Sets up a fresh parameter set on `node` and publishes version 1. The
    /// authority's identity name is its prefix.
    pub fn new(
        sim: &mut Sim,
        node: NodeId,
        identity: Identity,
        anchor: Certificate,
        abe_type: AbeType,
        mss: usize,
        mut rng: ChaCha20Rng,
    ) -> Result<AttributeAuthority, NacError> {
        let publisher = Publisher::attach(sim, node, &[identity.name()])?;
        publisher.publish(identity.cert().data().clone());
        let (params, master) = setup(abe_type, &mut rng);
        let mut aa = AttributeAuthority {
            identity,
            anchor,
            publisher,
            params,
            master,
            grants: BTreeMap::new(),
            published: BTreeSet::new(),
            mss,
            rng,
        };
        aa.publish_pubparams()?;
        Ok(aa)
    }

    pub fn prefix(&self) -> &Name {
        self.identity.name()
    }

    pub fn abe_type(&self) -> AbeType {
        self.params.abe_type
    }

    pub fn params(&self) -> &PublicParams {
        &self.params
    }

    pub fn publisher(&self) -> &Publisher {
        &self.publisher
    }

    pub fn grants(&self) -> &BTreeMap<Name, GrantRecord> {
        &self.grants
    }

    /// Distinct DKEY objects in the repository.
    pub fn dkey_objects(&self) -> Vec<Name> {
        self.publisher.objects_with(DKEY)
    }

    /// Publishes the current parameters if this version is not out yet.
    pub fn publish_pubparams(&mut self) -> Result<Name, NacError> {
        let name = pubparams_name(self.prefix(), self.params.abe_type, self.params.version);
        if self.published.insert(self.params.version) {
            let spec = SegmentSpec {
                name: &name,
                mss: self.mss,
                freshness_ms: FRESHNESS_PUBPARAMS_MS,
                content_type: ContentType::Blob,
            };
            let object = publish_segments(spec, &serialize_params(&self.params), &self.identity, &mut self.rng)?;
            self.publisher.publish_object(&object);
            info!("published {name} ({} segments)", object.segment_count());
        }
        Ok(name)
    }

    /// Adds attributes to the universe, publishing a new parameter version
    /// if any were unseen.
    pub fn register_attributes<'a>(&mut self, attrs: impl IntoIterator<Item = &'a Attribute>) -> Result<bool, NacError> {
        let grew = self.master.extend(&mut self.params, attrs, &mut self.rng);
        if grew {
            self.publish_pubparams()?;
        }
        Ok(grew)
    }

    /// Issues a DKEY for the holder of `consumer`. Re-granting the same
    /// consumer publishes the next DKEY version; earlier versions stay.
    pub fn grant(&mut self, consumer: &Certificate, grant: Grant) -> Result<&GrantRecord, NacError> {
        if !grant.fits(self.params.abe_type) {
            return Err(NacError::GrantTypeMismatch {
                abe_type: self.params.abe_type.as_str(),
                grant: grant.kind(),
            });
        }
        if !self.anchor.verify(consumer.data()) {
            return Err(NacError::UnknownConsumer(consumer.name().clone()));
        }
        let before = self.params.version;
        let key = match &grant {
            Grant::Policy(p) => kp_keygen_extending(&mut self.master, &mut self.params, p, &mut self.rng)?,
            Grant::Attributes(a) => cp_keygen_extending(&mut self.master, &mut self.params, a, &mut self.rng)?,
        };
        if self.params.version != before {
            self.publish_pubparams()?;
        }
        let key_bytes = serialize_key(&key);
        let content = wrap(consumer.encryption_key(), &key_bytes, &mut self.rng)?;
        let consumer_key = consumer.key_name();
        let version = self.grants.get(&consumer_key).map_or(1, |g| g.version + 1);
        let name = dkey_name(self.prefix(), &consumer_key, version);
        let spec = SegmentSpec {
            name: &name,
            mss: self.mss,
            freshness_ms: FRESHNESS_DKEY_MS,
            content_type: ContentType::Blob,
        };
        let object = publish_segments(spec, &content, &self.identity, &mut self.rng)?;
        self.publisher.publish_object(&object);
        info!("granted {consumer_key}: {name} ({} bytes, {} segments)", content.len(), object.segment_count());
        let record = GrantRecord {
            grant,
            version,
            dkey: name,
            dkey_bytes: content.len(),
            segments: object.segment_count(),
            abe_key_bytes: key_bytes.len(),
        };
        self.grants.insert(consumer_key.clone(), record);
        Ok(&self.grants[&consumer_key])
    }
}
