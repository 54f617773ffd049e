#![allow(dead_code)]

use abe_core::{parse_policy, AbeType, Attribute, AttributeSet};
use nac_abe::{
    AttributeAuthority, CachePolicy, Decryptor, Encryptor, EncryptorConfig, FetchOptions, Grant, Identity, Tag,
    DEFAULT_MSS,
};
use ndn_core::{LinkPolicy, Name, NodeId, Sim};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use trust_schema::{load_schema, mhealth_schema_text, TrustSchema};

pub const BG: &str = "/org/mhealth/diabetes/id123/cgm/blood-glucose";
pub const HR: &str = "/org/mhealth/diabetes/id123/watch/heart-rate";

pub fn n(s: &str) -> Name {
    s.parse().unwrap()
}

pub fn attrs(items: &[&str]) -> AttributeSet {
    AttributeSet::from_strs(items.iter().copied()).unwrap()
}

pub fn kp_tag(items: &[&str]) -> Tag {
    Tag::Attributes(attrs(items))
}

pub fn policy(text: &str) -> abe_core::PolicyExpr {
    parse_policy(text).unwrap()
}

/// aa -- router -- consumer hub, producer -- router.
pub struct Net {
    pub sim: Sim,
    pub rng: ChaCha20Rng,
    pub anchor: Identity,
    pub schema: TrustSchema,
    pub router: NodeId,
    pub aa_node: NodeId,
    pub producer_node: NodeId,
    pub consumer_node: NodeId,
    pub aa: AttributeAuthority,
    pub producer: Encryptor,
}

pub struct NetOptions {
    pub abe_type: AbeType,
    pub cache: CachePolicy,
    pub mss: usize,
    pub consumer_link: LinkPolicy,
    pub schema_override: Option<fn(&TrustSchema) -> TrustSchema>,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            abe_type: AbeType::Kp,
            cache: CachePolicy::default(),
            mss: DEFAULT_MSS,
            consumer_link: LinkPolicy::default(),
            schema_override: None,
        }
    }
}

impl Net {
    pub fn new(seed: u64, opts: NetOptions) -> Net {
        let mut sim = Sim::new(seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let anchor = Identity::anchor(n("/org/mhealth"), &mut rng);
        let schema = load_schema(&mhealth_schema_text(anchor.cert())).unwrap();
        let router = sim.add_node("router");
        let aa_node = sim.add_node("aa");
        let producer_node = sim.add_node("producer");
        let consumer_node = sim.add_node("consumer");
        sim.connect(router, aa_node, LinkPolicy::default());
        sim.connect(router, producer_node, LinkPolicy::default());
        sim.connect(router, consumer_node, opts.consumer_link);

        let aa_id = Identity::issued(n("/org/mhealth/aa/main"), &anchor, &mut rng);
        let aa = AttributeAuthority::new(
            &mut sim,
            aa_node,
            aa_id,
            anchor.cert().clone(),
            opts.abe_type,
            opts.mss,
            ChaCha20Rng::seed_from_u64(seed ^ 1),
        )
        .unwrap();
        let producer_schema = match opts.schema_override {
            Some(f) => f(&schema),
            None => schema.clone(),
        };
        let producer_id = Identity::issued(n("/org/mhealth/producer/alice"), &anchor, &mut rng);
        let producer = Encryptor::new(
            &mut sim,
            producer_node,
            producer_id,
            producer_schema,
            EncryptorConfig {
                prefix: n("/org/mhealth/diabetes/id123"),
                aa_prefix: n("/org/mhealth/aa/main"),
                abe_type: opts.abe_type,
                cache: opts.cache,
                mss: opts.mss,
                fetch: FetchOptions::default(),
            },
            ChaCha20Rng::seed_from_u64(seed ^ 2),
        )
        .unwrap();
        Net {
            sim,
            rng,
            anchor,
            schema,
            router,
            aa_node,
            producer_node,
            consumer_node,
            aa,
            producer,
        }
    }

    pub fn register(&mut self, items: &[&str]) {
        let set: Vec<Attribute> = items.iter().map(|s| Attribute::parse(s).unwrap()).collect();
        self.aa.register_attributes(set.iter()).unwrap();
    }

    pub fn consumer_identity(&mut self, who: &str) -> Identity {
        Identity::issued(n(&format!("/org/mhealth/consumer/{who}")), &self.anchor, &mut self.rng)
    }

    pub fn consumer_from(&mut self, identity: Identity) -> Decryptor {
        Decryptor::new(
            &mut self.sim,
            self.consumer_node,
            identity,
            self.schema.clone(),
            n("/org/mhealth/aa/main"),
            self.aa.abe_type(),
            FetchOptions::default(),
        )
        .unwrap()
    }

    pub fn consumer(&mut self, who: &str, grant: Grant) -> Decryptor {
        let id = self.consumer_identity(who);
        self.aa.grant(id.cert(), grant).unwrap();
        self.consumer_from(id)
    }

    pub fn produce(&mut self, name: &str, payload: &[u8], tag: &Tag) -> Name {
        let data = self.producer.produce(&mut self.sim, &n(name), payload, tag).unwrap();
        data.name
    }
}
