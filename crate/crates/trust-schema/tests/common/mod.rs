#![allow(dead_code)]

use std::collections::BTreeMap;

use ndn_core::{sign_data, Certificate, CertificateRequest, Data, KeyPair, Name, Validity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trust_schema::{load_schema, mhealth_schema_text, TrustSchema};

pub fn n(s: &str) -> Name {
    s.parse().unwrap()
}

pub struct Entity {
    pub key: KeyPair,
    pub cert: Certificate,
}

pub struct World {
    pub rng: ChaCha8Rng,
    pub anchor: Entity,
    pub aa: Entity,
    pub producer: Entity,
    pub consumer: Entity,
    pub schema: TrustSchema,
    pub certs: BTreeMap<Name, Data>,
}

fn issue(rng: &mut ChaCha8Rng, identity: &str, issuer: Option<&Entity>) -> Entity {
    let key = KeyPair::generate(rng);
    let id = n(identity);
    let req = CertificateRequest {
        identity: &id,
        subject: &key,
        encryption_key: &[7; 32],
        validity: Validity::FOREVER,
        version: 1,
    };
    let cert = Certificate::issue(req, issuer.map(|e| (&e.key, e.cert.name())), rng);
    Entity { key, cert }
}

impl World {
    pub fn new(seed: u64) -> World {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let anchor = issue(&mut rng, "/org/mhealth", None);
        let aa = issue(&mut rng, "/org/mhealth/aa/main", Some(&anchor));
        let producer = issue(&mut rng, "/org/mhealth/producer/alice", Some(&anchor));
        let consumer = issue(&mut rng, "/org/mhealth/consumer/bob", Some(&anchor));
        let schema = load_schema(&mhealth_schema_text(&anchor.cert)).unwrap();
        let mut certs = BTreeMap::new();
        for e in [&anchor, &aa, &producer, &consumer] {
            certs.insert(e.cert.name().clone(), e.cert.data().clone());
        }
        World {
            rng,
            anchor,
            aa,
            producer,
            consumer,
            schema,
            certs,
        }
    }

    pub fn issue(&mut self, identity: &str, by_anchor: bool) -> Entity {
        let e = issue(&mut self.rng, identity, by_anchor.then_some(&self.anchor));
        self.certs.insert(e.cert.name().clone(), e.cert.data().clone());
        e
    }

    /// Certificate lookup by prefix, like a can-be-prefix Interest.
    pub fn fetcher(&self) -> impl FnMut(&Name) -> Option<Data> + '_ {
        |locator: &Name| {
            self.certs
                .iter()
                .find(|(name, _)| locator.is_prefix_of(name))
                .map(|(_, d)| d.clone())
        }
    }
}

pub fn sign(rng: &mut ChaCha8Rng, name: &str, by: &Entity) -> Data {
    sign_data(Data::new(n(name), b"payload".to_vec()), &by.key, by.cert.name(), rng)
}
