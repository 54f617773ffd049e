//! Builds the simulated network for a scenario and runs it.

use std::collections::BTreeMap;

use abe_core::{AbeType, Attribute};
use log::{debug, info};
use nac_abe::{
    AttributeAuthority, CachePolicy, Decryptor, Encryptor, EncryptorConfig, FetchOptions, Grant, Identity, NacError,
    Tag,
};
use ndn_core::{LinkPolicy, Name, NodeId, Sim};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;
use trust_schema::{load_schema, mhealth_schema_text, TrustSchema};

use crate::config::{Access, ConfigError, Role, ScenarioConfig};
use crate::report::{Event, Outcome, RunReport};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{step}: {source}")]
    Step { step: String, source: NacError },
}

fn step(what: impl Into<String>) -> impl FnOnce(NacError) -> RunError {
    let step = what.into();
    move |source| RunError::Step { step, source }
}

/// Seeds for every random source, drawn from the scenario seed in a fixed
/// order so adding a node changes only the seeds after it.
struct Seeds(ChaCha20Rng);

impl Seeds {
    fn next(&mut self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0.next_u64())
    }
}

fn to_grant(access: Access) -> Grant {
    match access {
        Access::Policy(p) => Grant::Policy(p),
        Access::Attributes(a) => Grant::Attributes(a),
    }
}

fn to_tag(access: Access) -> Tag {
    match access {
        Access::Policy(p) => Tag::Policy(p),
        Access::Attributes(a) => Tag::Attributes(a),
    }
}

struct Consumer {
    node: NodeId,
    identity: Identity,
    decryptor: Decryptor,
    /// Validation records already reported.
    reported: usize,
}

/// A running scenario: one simulator with every role attached.
pub struct World {
    pub sim: Sim,
    pub anchor: Identity,
    pub schema: TrustSchema,
    pub aa: AttributeAuthority,
    pub producers: BTreeMap<String, Encryptor>,
    consumers: BTreeMap<String, Consumer>,
    producer_reported: BTreeMap<String, usize>,
    payload_rng: ChaCha20Rng,
    aa_detached: bool,
}

impl World {
    pub fn build(config: &ScenarioConfig, seed: u64) -> Result<World, RunError> {
        config.validate()?;
        let abe_type = config.abe()?;
        let mut seeds = Seeds(ChaCha20Rng::seed_from_u64(seed));
        let mut sim = Sim::new(seeds.0.next_u64());
        let mut id_rng = seeds.next();
        let aa_rng = seeds.next();
        let payload_rng = seeds.next();

        let anchor_name: Name = config.anchor.parse().expect("validated");
        let anchor = Identity::anchor(anchor_name, &mut id_rng);
        let schema = load_schema(&mhealth_schema_text(anchor.cert())).expect("bundled schema is valid");

        let mut node_ids = BTreeMap::new();
        for n in &config.nodes {
            node_ids.insert(n.id.clone(), sim.add_node(&n.id));
        }
        for l in &config.links {
            sim.connect(node_ids[&l.a], node_ids[&l.b], LinkPolicy::new(l.delay_ms, l.loss));
        }

        let aa_cfg = config.aa_node();
        let aa_identity = Identity::issued(config.identity_of(aa_cfg), &anchor, &mut id_rng);
        let aa_prefix = aa_identity.name().clone();
        let mut aa = AttributeAuthority::new(
            &mut sim,
            node_ids[&aa_cfg.id],
            aa_identity,
            anchor.cert().clone(),
            abe_type,
            config.mss,
            aa_rng,
        )
        .map_err(step("authority setup"))?;

        let mut universe: Vec<Attribute> = Vec::new();
        for a in &config.attributes {
            universe.push(Attribute::parse(a).expect("validated"));
        }
        for p in &config.productions {
            let tag = to_tag(config.production_access(p)?);
            universe.extend(tag.required().map_err(step(format!("production {}", p.name)))?);
        }
        aa.register_attributes(universe.iter()).map_err(step("attribute registration"))?;

        let cache = CachePolicy::new(config.cache.max_items, config.cache.max_age_ms);
        let mut producers = BTreeMap::new();
        let mut consumers = BTreeMap::new();
        for n in &config.nodes {
            let node = node_ids[&n.id];
            match n.role {
                Role::Producer => {
                    let identity = Identity::issued(config.identity_of(n), &anchor, &mut id_rng);
                    let enc = Encryptor::new(
                        &mut sim,
                        node,
                        identity,
                        schema.clone(),
                        EncryptorConfig {
                            prefix: config.prefix_of(n),
                            aa_prefix: aa_prefix.clone(),
                            abe_type,
                            cache,
                            mss: config.mss,
                            fetch: FetchOptions::default(),
                        },
                        seeds.next(),
                    )
                    .map_err(step(format!("producer {}", n.id)))?;
                    producers.insert(n.id.clone(), enc);
                }
                Role::Consumer => {
                    let identity = Identity::issued(config.identity_of(n), &anchor, &mut id_rng);
                    let decryptor = new_decryptor(&mut sim, node, &identity, &schema, &aa_prefix, abe_type)
                        .map_err(step(format!("consumer {}", n.id)))?;
                    consumers.insert(
                        n.id.clone(),
                        Consumer {
                            node,
                            identity,
                            decryptor,
                            reported: 0,
                        },
                    );
                }
                Role::Router | Role::Aa => {}
            }
        }
        let producer_reported = producers.keys().map(|k| (k.clone(), 0)).collect();
        Ok(World {
            sim,
            anchor,
            schema,
            aa,
            producers,
            consumers,
            producer_reported,
            payload_rng,
            aa_detached: false,
        })
    }

    pub fn consumer_certificate(&self, id: &str) -> Option<&ndn_core::Certificate> {
        self.consumers.get(id).map(|c| c.identity.cert())
    }

    pub fn decryptor(&self, id: &str) -> Option<&Decryptor> {
        self.consumers.get(id).map(|c| &c.decryptor)
    }

    /// Consumes `name` with the consumer's current decryptor.
    pub fn consume(&mut self, consumer: &str, name: &Name) -> Result<Vec<u8>, NacError> {
        let c = self.consumers.get_mut(consumer).expect("known consumer");
        c.decryptor.consume(&mut self.sim, name)
    }

    pub fn aa_detached(&self) -> bool {
        self.aa_detached
    }

    /// Takes the authority's application face down. Cached copies of its
    /// packets stay in the forwarders' content stores.
    pub fn detach_aa(&mut self) {
        if !self.aa_detached {
            info!("detaching authority at {} ms", self.sim.now());
            self.sim.detach_face(self.aa.publisher().face());
            self.aa_detached = true;
        }
    }

    /// Replaces a consumer's decryptor with one holding no keys.
    pub fn refresh_consumer(&mut self, id: &str) -> Result<(), RunError> {
        let abe_type = self.aa.abe_type();
        let aa_prefix = self.aa.prefix().clone();
        let c = self.consumers.get_mut(id).expect("validated");
        c.decryptor = new_decryptor(&mut self.sim, c.node, &c.identity, &self.schema, &aa_prefix, abe_type)
            .map_err(step(format!("consumer {id}")))?;
        c.reported = 0;
        Ok(())
    }

    fn anchor_name(&self) -> &Name {
        self.anchor.cert().name()
    }

    fn validation_events(&self, role: &str, records: &[nac_abe::ValidationRecord]) -> Vec<Event> {
        records
            .iter()
            .map(|r| Event::Validation {
                role: role.to_owned(),
                name: r.name.to_string(),
                outcome: r.outcome.as_str().to_owned(),
                chain_length: r.chain.len(),
                anchor_terminated: r.chain.last() == Some(self.anchor_name()),
            })
            .collect()
    }

    fn drain_producer_validations(&mut self, id: &str) -> Vec<Event> {
        let records = &self.producers[id].session().validations;
        let seen = self.producer_reported[id];
        let events = self.validation_events(id, &records[seen..]);
        self.producer_reported.insert(id.to_owned(), records.len());
        events
    }

    fn drain_consumer_validations(&mut self, id: &str) -> Vec<Event> {
        let c = &self.consumers[id];
        let records = &c.decryptor.session().validations;
        let events = self.validation_events(id, &records[c.reported..]);
        let len = records.len();
        self.consumers.get_mut(id).expect("known consumer").reported = len;
        events
    }
}

fn new_decryptor(
    sim: &mut Sim,
    node: NodeId,
    identity: &Identity,
    schema: &TrustSchema,
    aa_prefix: &Name,
    abe_type: AbeType,
) -> Result<Decryptor, NacError> {
    Decryptor::new(
        sim,
        node,
        identity.clone(),
        schema.clone(),
        aa_prefix.clone(),
        abe_type,
        FetchOptions::default(),
    )
}

/// Runs every grant, production and consumption of `config` in order.
/// `seed` overrides the configured seed when given.
pub fn run_scenario(config: &ScenarioConfig, seed: Option<u64>) -> Result<RunReport, RunError> {
    run_scenario_world(config, seed).map(|(_, report)| report)
}

/// [`run_scenario`], also returning the network in its final state.
pub fn run_scenario_world(config: &ScenarioConfig, seed: Option<u64>) -> Result<(World, RunReport), RunError> {
    let seed = seed.unwrap_or(config.seed);
    let mut world = World::build(config, seed)?;
    let mut report = RunReport::default();
    report.push(Event::Scenario {
        name: config.name.clone(),
        abe_type: config.abe()?.as_str().to_owned(),
        seed,
        nodes: config.nodes.len(),
        links: config.links.len(),
        mss: config.mss,
    });

    for g in &config.grants {
        let cert = world.consumer_certificate(&g.consumer).expect("validated").clone();
        let record = world
            .aa
            .grant(&cert, to_grant(config.grant_access(g)?))
            .map_err(step(format!("grant for {}", g.consumer)))?;
        report.push(Event::Dkey {
            consumer: g.consumer.clone(),
            dkey: record.dkey.to_string(),
            version: record.version,
            dkey_bytes: record.dkey_bytes,
            abe_key_bytes: record.abe_key_bytes,
            segments: record.segments,
        });
    }

    let mut payloads: BTreeMap<Name, Vec<u8>> = BTreeMap::new();
    for p in &config.productions {
        if let Some(at) = p.at_ms {
            if at > world.sim.now() {
                world.sim.advance_to(at);
            }
        }
        let name: Name = p.name.parse().expect("validated");
        let payload = match (&p.payload, p.payload_bytes) {
            (Some(text), _) => text.as_bytes().to_vec(),
            (None, Some(n)) => {
                let mut bytes = vec![0u8; n];
                world.payload_rng.fill_bytes(&mut bytes);
                bytes
            }
            (None, None) => unreachable!("validated"),
        };
        let tag = to_tag(config.production_access(p)?);
        let enc = world.producers.get_mut(&p.producer).expect("validated");
        let minted_before = enc.stats().cks_minted;
        let data = enc
            .produce(&mut world.sim, &name, &payload, &tag)
            .map_err(step(format!("production {}", p.name)))?;
        let ck_minted = enc.stats().cks_minted > minted_before;
        let (ck, _) = nac_abe::extract_ck_name(&data.content).map_err(step(format!("production {}", p.name)))?;
        let (ck_bytes, ck_segments) = enc.publisher().object_size(&ck);
        debug!("produced {} under {}", name, ck);
        for e in world.drain_producer_validations(&p.producer) {
            report.push(e);
        }
        report.push(Event::Production {
            producer: p.producer.clone(),
            name: p.name.clone(),
            tag: tag.canonical(),
            ck: ck.to_string(),
            ck_minted,
            ck_bytes,
            ck_segments,
            payload_bytes: payload.len(),
            virtual_ms: world.sim.now(),
        });
        payloads.insert(name, payload);
    }

    for c in &config.consumptions {
        if c.after_aa_detached {
            world.detach_aa();
        }
        if c.fresh {
            world.refresh_consumer(&c.consumer)?;
        }
        let name: Name = c.name.parse().expect("validated");
        let served_before = world.aa.publisher().served(&world.sim);
        let result = world.consume(&c.consumer, &name);
        let (outcome, error) = match result {
            Ok(bytes) if bytes == payloads[&name] => (Outcome::Success, None),
            Ok(_) => (Outcome::Error, Some("decrypted payload differs from the produced one".to_owned())),
            Err(NacError::PolicyNotSatisfied) => (Outcome::Denied, None),
            Err(e) => (Outcome::Error, Some(e.to_string())),
        };
        let aa_served = world.aa.publisher().served(&world.sim) - served_before;
        for e in world.drain_consumer_validations(&c.consumer) {
            report.push(e);
        }
        let matched = outcome.meets(c.expected);
        if !matched {
            info!("{} on {}: {:?}, expected {:?}", c.consumer, c.name, outcome, c.expected);
        }
        report.push(Event::Consumption {
            consumer: c.consumer.clone(),
            name: c.name.clone(),
            expected: c.expected,
            outcome,
            error,
            matched,
            aa_detached: world.aa_detached,
            fresh: c.fresh,
            aa_served,
            virtual_ms: world.sim.now(),
        });
    }

    let k = world.sim.counters();
    report.push(Event::Counters {
        interests_expressed: k.interests_expressed,
        interests_forwarded: k.interests_forwarded,
        interests_to_producers: k.interests_to_producers,
        data_from_producers: k.data_from_producers,
        data_delivered: k.data_delivered,
        cache_hits: k.cache_hits,
        timeouts: k.timeouts,
        retransmissions: k.retransmissions,
        lost_on_link: k.lost_on_link,
    });
    let consumptions = report.consumptions().count();
    let mismatched = report.mismatches();
    let (validations, validations_failed) = report.validations().fold((0, 0), |(n, f), e| match e {
        Event::Validation { outcome, .. } => (n + 1, f + usize::from(outcome != "VALID")),
        _ => (n, f),
    });
    report.push(Event::Summary {
        consumptions,
        matched: consumptions - mismatched.len(),
        mismatched,
        ck_objects: world.producers.values().map(|p| p.ck_objects().len()).sum(),
        dkey_objects: world.aa.dkey_objects().len(),
        validations,
        validations_failed,
        virtual_ms: world.sim.now(),
    });
    Ok((world, report))
}
