//! Scenario configuration.
//!
//! ```json
//! {
//!   "name": "example",
//!   "seed": 1,
//!   "abeType": "KP",
//!   "anchor": "/org/mhealth",
//!   "mss": 1500,
//!   "cache": { "maxItems": 100, "maxAgeMs": 3600000 },
//!   "nodes": [
//!     { "id": "router", "role": "router" },
//!     { "id": "aa", "role": "aa", "identity": "/org/mhealth/aa/main" },
//!     { "id": "alice", "role": "producer", "identity": "/org/mhealth/producer/alice",
//!       "prefix": "/org/mhealth/diabetes/id123" },
//!     { "id": "doctor", "role": "consumer", "identity": "/org/mhealth/consumer/doctor" }
//!   ],
//!   "links": [ { "a": "router", "b": "aa", "delayMs": 5, "loss": 0.0 } ],
//!   "attributes": [ "home" ],
//!   "grants": [ { "consumer": "doctor", "policy": "\"home\"" } ],
//!   "productions": [ { "producer": "alice", "name": "/org/mhealth/diabetes/id123/x/v=1",
//!                      "payload": "hello", "attributes": [ "home" ] } ],
//!   "consumptions": [ { "consumer": "doctor", "name": "/org/mhealth/diabetes/id123/x/v=1",
//!                       "expected": "SUCCESS" } ]
//! }
//! ```
//!
//! KP scenarios grant policies and tag data with attributes; CP scenarios
//! do the reverse. A production may add a `timestamp` (attribute name and
//! UNIX seconds), which tags the data with that value's bit-prefix
//! attributes under KP.

use std::collections::BTreeSet;
use std::path::Path;

use abe_core::{parse_policy, AbeType, Attribute, AttributeSet, PolicyExpr};
use ndn_core::Name;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Router,
    Aa,
    Producer,
    Consumer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NodeConfig {
    pub id: String,
    pub role: Role,
    #[serde(default)]
    pub identity: Option<String>,
    #[serde(default)]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LinkConfig {
    pub a: String,
    pub b: String,
    #[serde(default = "default_delay")]
    pub delay_ms: u64,
    #[serde(default)]
    pub loss: f64,
}

fn default_delay() -> u64 {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CacheConfig {
    pub max_items: u64,
    pub max_age_ms: u64,
}

impl Default for CacheConfig {
    fn default() -> Self {
        let d = nac_abe::CachePolicy::default();
        CacheConfig {
            max_items: d.max_items,
            max_age_ms: d.max_age_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GrantConfig {
    pub consumer: String,
    #[serde(default)]
    pub policy: Option<String>,
    #[serde(default)]
    pub attributes: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TimestampConfig {
    pub attribute: String,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProductionConfig {
    pub producer: String,
    pub name: String,
    #[serde(default)]
    pub payload: Option<String>,
    /// Random payload of this many bytes, drawn from the scenario seed.
    #[serde(default)]
    pub payload_bytes: Option<usize>,
    #[serde(default)]
    pub attributes: Option<Vec<String>>,
    #[serde(default)]
    pub policy: Option<String>,
    #[serde(default)]
    pub timestamp: Option<TimestampConfig>,
    /// Virtual time of production; defaults to "now".
    #[serde(default)]
    pub at_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Expected {
    Success,
    Denied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConsumptionConfig {
    pub consumer: String,
    pub name: String,
    pub expected: Expected,
    /// Take the authority's face down before this consumption.
    #[serde(default)]
    pub after_aa_detached: bool,
    /// Consume with a new decryptor instance holding no cached keys.
    #[serde(default)]
    pub fresh: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub abe_type: String,
    pub anchor: String,
    #[serde(default = "default_mss")]
    pub mss: usize,
    #[serde(default)]
    pub cache: CacheConfig,
    pub nodes: Vec<NodeConfig>,
    #[serde(default)]
    pub links: Vec<LinkConfig>,
    #[serde(default)]
    pub attributes: Vec<String>,
    #[serde(default)]
    pub grants: Vec<GrantConfig>,
    #[serde(default)]
    pub productions: Vec<ProductionConfig>,
    #[serde(default)]
    pub consumptions: Vec<ConsumptionConfig>,
}

fn default_mss() -> usize {
    nac_abe::DEFAULT_MSS
}

/// A grant or tag after parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Access {
    Policy(PolicyExpr),
    Attributes(AttributeSet),
}

pub const BUNDLED: &[(&str, &str)] = &[
    ("mhealth-kp", include_str!("../scenarios/mhealth-kp.json")),
    ("cp-flaw", include_str!("../scenarios/cp-flaw.json")),
];

pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioConfig::from_json(text).expect("bundled scenarios are valid"))
}

fn parse_name(what: &str, s: &str) -> Result<Name, ConfigError> {
    let name: Name = s.parse().map_err(|e| invalid(format!("{what}: bad name {s:?}: {e}")))?;
    if name.is_empty() {
        return Err(invalid(format!("{what}: empty name")));
    }
    Ok(name)
}

fn parse_attrs(what: &str, items: &[String]) -> Result<AttributeSet, ConfigError> {
    let mut set = AttributeSet::new();
    for s in items {
        set.insert(Attribute::parse(s).map_err(|e| invalid(format!("{what}: {e}")))?);
    }
    if set.is_empty() {
        return Err(invalid(format!("{what}: empty attribute list")));
    }
    Ok(set)
}

fn parse_access(what: &str, policy: &Option<String>, attrs: &Option<Vec<String>>) -> Result<Access, ConfigError> {
    match (policy, attrs) {
        (Some(p), None) => parse_policy(p)
            .map(Access::Policy)
            .map_err(|e| invalid(format!("{what}: policy {p:?}: {e}"))),
        (None, Some(a)) => parse_attrs(what, a).map(Access::Attributes),
        _ => Err(invalid(format!("{what}: give exactly one of policy or attributes"))),
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a file, falling back to a bundled scenario of that name.
    pub fn load(path: &str) -> Result<ScenarioConfig, ConfigError> {
        if !Path::new(path).exists() {
            if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == path) {
                return Self::from_json(text);
            }
        }
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn abe(&self) -> Result<AbeType, ConfigError> {
        AbeType::parse(&self.abe_type).ok_or_else(|| invalid(format!("abeType must be KP or CP, not {:?}", self.abe_type)))
    }

    pub fn node(&self, id: &str) -> Option<&NodeConfig> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn node_with(&self, what: &str, id: &str, role: Role) -> Result<&NodeConfig, ConfigError> {
        match self.node(id) {
            Some(n) if n.role == role => Ok(n),
            Some(n) => Err(invalid(format!("{what}: node {id} is a {:?}, not a {role:?}", n.role))),
            None => Err(invalid(format!("{what}: unknown node {id}"))),
        }
    }

    pub fn aa_node(&self) -> &NodeConfig {
        self.nodes.iter().find(|n| n.role == Role::Aa).expect("validated")
    }

    pub fn identity_of(&self, node: &NodeConfig) -> Name {
        node.identity.as_deref().expect("validated").parse().expect("validated")
    }

    pub fn prefix_of(&self, node: &NodeConfig) -> Name {
        node.prefix.as_deref().expect("validated").parse().expect("validated")
    }

    pub fn grant_access(&self, g: &GrantConfig) -> Result<Access, ConfigError> {
        parse_access(&format!("grant for {}", g.consumer), &g.policy, &g.attributes)
    }

    /// The production's tag, timestamp attributes included.
    pub fn production_access(&self, p: &ProductionConfig) -> Result<Access, ConfigError> {
        let what = format!("production {}", p.name);
        let mut access = parse_access(&what, &p.policy, &p.attributes)?;
        if let Some(ts) = &p.timestamp {
            match &mut access {
                Access::Attributes(set) => {
                    let extra = abe_core::data_attributes_for(&ts.attribute, u64::from(ts.value), abe_core::TIMESTAMP_BITS)
                        .map_err(|e| invalid(format!("{what}: timestamp: {e}")))?;
                    for a in extra.iter() {
                        set.insert(a.clone());
                    }
                }
                Access::Policy(_) => return Err(invalid(format!("{what}: timestamps apply to attribute tags only"))),
            }
        }
        Ok(access)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let abe = self.abe()?;
        parse_name("anchor", &self.anchor)?;
        if self.mss < nac_abe::segment::MIN_MSS {
            return Err(invalid(format!("mss must be at least {}", nac_abe::segment::MIN_MSS)));
        }
        if self.cache.max_items == 0 {
            return Err(invalid("cache.maxItems must be positive"));
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(invalid(format!("duplicate node id {}", n.id)));
            }
            let needs_identity = n.role != Role::Router;
            match (&n.identity, needs_identity) {
                (Some(i), true) => {
                    parse_name(&format!("node {}", n.id), i)?;
                }
                (None, true) => return Err(invalid(format!("node {} needs an identity", n.id))),
                (Some(_), false) => return Err(invalid(format!("router {} takes no identity", n.id))),
                (None, false) => {}
            }
            match (&n.prefix, n.role == Role::Producer) {
                (Some(p), true) => {
                    parse_name(&format!("node {}", n.id), p)?;
                }
                (None, true) => return Err(invalid(format!("producer {} needs a prefix", n.id))),
                (Some(_), false) => return Err(invalid(format!("only producers take a prefix ({})", n.id))),
                (None, false) => {}
            }
        }
        if self.nodes.iter().filter(|n| n.role == Role::Aa).count() != 1 {
            return Err(invalid("exactly one aa node is required"));
        }
        for l in &self.links {
            for end in [&l.a, &l.b] {
                if self.node(end).is_none() {
                    return Err(invalid(format!("link refers to unknown node {end}")));
                }
            }
            if l.a == l.b {
                return Err(invalid(format!("link from {} to itself", l.a)));
            }
            if !(0.0..=1.0).contains(&l.loss) {
                return Err(invalid(format!("link {}-{}: loss must be in [0, 1]", l.a, l.b)));
            }
        }
        for a in &self.attributes {
            Attribute::parse(a).map_err(|e| invalid(format!("attributes: {e}")))?;
        }
        for g in &self.grants {
            self.node_with("grant", &g.consumer, Role::Consumer)?;
            match (self.grant_access(g)?, abe) {
                (Access::Policy(_), AbeType::Kp) | (Access::Attributes(_), AbeType::Cp) => {}
                _ => return Err(invalid(format!("grant for {}: wrong kind for {abe}", g.consumer))),
            }
        }
        let mut produced = BTreeSet::new();
        for p in &self.productions {
            let node = self.node_with("production", &p.producer, Role::Producer)?;
            let name = parse_name("production", &p.name)?;
            if !self.prefix_of(node).is_prefix_of(&name) {
                return Err(invalid(format!("production {} is outside producer {}'s prefix", p.name, p.producer)));
            }
            if p.payload.is_some() == p.payload_bytes.is_some() {
                return Err(invalid(format!("production {}: give exactly one of payload or payloadBytes", p.name)));
            }
            match (self.production_access(p)?, abe) {
                (Access::Attributes(_), AbeType::Kp) | (Access::Policy(_), AbeType::Cp) => {}
                _ => return Err(invalid(format!("production {}: wrong tag kind for {abe}", p.name))),
            }
            if !produced.insert(name) {
                return Err(invalid(format!("production {} appears twice", p.name)));
            }
        }
        for c in &self.consumptions {
            self.node_with("consumption", &c.consumer, Role::Consumer)?;
            let name = parse_name("consumption", &c.name)?;
            if !produced.contains(&name) {
                return Err(invalid(format!("consumption of {} which no production publishes", c.name)));
            }
        }
        Ok(())
    }
}
