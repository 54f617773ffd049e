//! Size and caching benchmarks, run through the full protocol stack.

use abe_core::{build_access_tree, data_attributes_for, expand_comparison, parse_policy, AbeType, AttributeSet, CompareOp};
use nac_abe::{Grant, Tag};
use ndn_core::Name;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::config::{
    CacheConfig, LinkConfig, NodeConfig, Role, ScenarioConfig,
};
use crate::runner::{RunError, World};

pub const BG: &str = "/org/mhealth/diabetes/id123/cgm/blood-glucose";
const PRODUCER: &str = "alice";
const CONSUMER: &str = "doctor";
const DATA_PREFIX: &str = "/org/mhealth/diabetes/id123";

/// Attribute compared against the i-th timestamp bound.
pub fn timestamp_attribute(i: usize) -> String {
    format!("{BG}/timestamp/{i}")
}

/// Router hub with one authority, one producer and one consumer.
pub fn bench_config(abe_type: AbeType, cache: CacheConfig) -> ScenarioConfig {
    let node = |id: &str, role, identity: Option<&str>, prefix: Option<&str>| NodeConfig {
        id: id.to_owned(),
        role,
        identity: identity.map(str::to_owned),
        prefix: prefix.map(str::to_owned),
    };
    let link = |b: &str| LinkConfig {
        a: "router".to_owned(),
        b: b.to_owned(),
        delay_ms: 5,
        loss: 0.0,
    };
    ScenarioConfig {
        name: "bench".to_owned(),
        description: None,
        seed: 0,
        abe_type: abe_type.as_str().to_owned(),
        anchor: "/org/mhealth".to_owned(),
        mss: nac_abe::DEFAULT_MSS,
        cache,
        nodes: vec![
            node("router", Role::Router, None, None),
            node("aa", Role::Aa, Some("/org/mhealth/aa/main"), None),
            node(PRODUCER, Role::Producer, Some("/org/mhealth/producer/alice"), Some(DATA_PREFIX)),
            node(CONSUMER, Role::Consumer, Some("/org/mhealth/consumer/doctor"), None),
        ],
        links: vec![link("aa"), link(PRODUCER), link(CONSUMER)],
        attributes: Vec::new(),
        grants: Vec::new(),
        productions: Vec::new(),
        consumptions: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KeySizeRow {
    pub comparisons: usize,
    /// Leaves of the compiled access tree.
    pub leaves: usize,
    /// One for the data-type leaf plus each comparison's expansion size.
    pub expected_leaves: usize,
    pub dkey_bytes: usize,
    pub dkey_segments: usize,
    pub ck_bytes: usize,
    pub ck_segments: usize,
    pub decrypts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - (slope * x + intercept)).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KeySizeReport {
    pub abe_type: String,
    /// Column the fit is computed on: DKEY bytes under KP, CK bytes under CP.
    pub measured: String,
    pub rows: Vec<KeySizeRow>,
    pub fit: LinearFit,
}

impl KeySizeReport {
    pub fn measured_sizes(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| if self.measured == "dkeyBytes" { r.dkey_bytes } else { r.ck_bytes })
            .collect()
    }

    pub fn strictly_increasing(&self) -> bool {
        self.measured_sizes().windows(2).all(|w| w[0] < w[1])
    }
}

fn keysize_row(abe_type: AbeType, bounds: &[u32], values: &[u32], seed: u64) -> Result<KeySizeRow, RunError> {
    let c = bounds.len();
    let mut text = format!("\"{BG}\"");
    let mut expected_leaves = 1;
    let mut attrs = AttributeSet::from_strs([BG]).expect("valid attribute");
    for (i, (x, v)) in bounds.iter().zip(values).enumerate() {
        let name = timestamp_attribute(i + 1);
        text.push_str(&format!(" AND \"{name}\" > {x}"));
        expected_leaves += expand_comparison(&name, CompareOp::Gt, u64::from(*x), abe_core::TIMESTAMP_BITS)
            .expect("32-bit bound")
            .leaf_count();
        for a in data_attributes_for(&name, u64::from(*v), abe_core::TIMESTAMP_BITS).expect("32-bit value").iter() {
            attrs.insert(a.clone());
        }
    }
    let policy = parse_policy(&text).expect("generated policy parses");
    let leaves = build_access_tree(&policy).expect("policy compiles").leaf_count();
    let (grant, tag) = match abe_type {
        AbeType::Kp => (Grant::Policy(policy.clone()), Tag::Attributes(attrs.clone())),
        AbeType::Cp => (Grant::Attributes(attrs.clone()), Tag::Policy(policy.clone())),
    };

    let config = bench_config(abe_type, CacheConfig::default());
    let mut world = World::build(&config, seed)?;
    let step = |what: &str| {
        let what = format!("keysize c={c}: {what}");
        move |source| RunError::Step { step: what, source }
    };
    let mut universe: Vec<_> = attrs.iter().cloned().collect();
    universe.extend(Tag::Policy(policy).required().map_err(step("policy"))?);
    world.aa.register_attributes(universe.iter()).map_err(step("register"))?;
    let cert = world.consumer_certificate(CONSUMER).expect("bench consumer").clone();
    let record = world.aa.grant(&cert, grant).map_err(step("grant"))?.clone();

    let name: Name = format!("{BG}/v=1").parse().expect("valid name");
    let producer = world.producers.get_mut(PRODUCER).expect("bench producer");
    let data = producer.produce(&mut world.sim, &name, b"reading", &tag).map_err(step("produce"))?;
    let (ck, _) = nac_abe::extract_ck_name(&data.content).map_err(step("produce"))?;
    let (ck_bytes, ck_segments) = producer.publisher().object_size(&ck);
    let decrypts = world.consume(CONSUMER, &name).is_ok_and(|p| p == b"reading");
    Ok(KeySizeRow {
        comparisons: c,
        leaves,
        expected_leaves,
        dkey_bytes: record.dkey_bytes,
        dkey_segments: record.segments,
        ck_bytes,
        ck_segments,
        decrypts,
    })
}

/// DKEY and CK sizes for policies of one data-type leaf ANDed with
/// `1..=max_comparisons` "timestamp > X" comparisons on fresh random bounds.
/// The consumer's data satisfies every bound.
pub fn bench_keysize(abe_type: AbeType, max_comparisons: usize, seed: u64) -> Result<KeySizeReport, RunError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut bounds = Vec::new();
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for c in 1..=max_comparisons {
        let x = rng.gen_range(0..u32::MAX);
        bounds.push(x);
        values.push(rng.gen_range(x + 1..=u32::MAX));
        rows.push(keysize_row(abe_type, &bounds, &values, seed.wrapping_add(c as u64))?);
    }
    let measured = match abe_type {
        AbeType::Kp => "dkeyBytes",
        AbeType::Cp => "ckBytes",
    };
    let mut report = KeySizeReport {
        abe_type: abe_type.as_str().to_owned(),
        measured: measured.to_owned(),
        rows,
        fit: LinearFit {
            slope: 0.0,
            intercept: 0.0,
            r_squared: 0.0,
        },
    };
    let xs: Vec<f64> = report.rows.iter().map(|r| r.comparisons as f64).collect();
    let ys: Vec<f64> = report.measured_sizes().iter().map(|&s| s as f64).collect();
    report.fit = linear_fit(&xs, &ys);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CkCacheRow {
    pub max_items: u64,
    pub max_age_ms: u64,
    pub items: u64,
    pub cks_generated: u64,
    pub abe_encryptions: u64,
    pub ck_objects: usize,
    pub total_virtual_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CkCacheSchedule {
    pub items: u64,
    /// Item i carries tag i mod tags.
    pub tags: usize,
    /// Virtual time between productions; item i is produced at i * interval.
    pub interval_ms: u64,
}

/// Produces the schedule once with `cache` and reports CK activity.
pub fn ckcache_run(abe_type: AbeType, cache: CacheConfig, schedule: CkCacheSchedule, seed: u64) -> Result<CkCacheRow, RunError> {
    let config = bench_config(abe_type, cache);
    config.validate()?;
    let mut world = World::build(&config, seed)?;
    let step = |what: String| move |source| RunError::Step { step: what, source };
    let tags: Vec<Tag> = (0..schedule.tags.max(1))
        .map(|k| {
            let label = format!("tag{k}");
            match abe_type {
                AbeType::Kp => Tag::Attributes(AttributeSet::from_strs([BG, label.as_str()]).expect("valid attributes")),
                AbeType::Cp => Tag::Policy(parse_policy(&format!("\"{BG}\" AND \"{label}\"")).expect("valid policy")),
            }
        })
        .collect();
    let mut universe = Vec::new();
    for t in &tags {
        universe.extend(t.required().map_err(step("tags".to_owned()))?);
    }
    world.aa.register_attributes(universe.iter()).map_err(step("register".to_owned()))?;
    let start = world.sim.now();
    for i in 0..schedule.items {
        let at = start + i * schedule.interval_ms;
        if at > world.sim.now() {
            world.sim.advance_to(at);
        }
        let name: Name = format!("{BG}/seq={i}").parse().expect("valid name");
        let tag = &tags[(i % tags.len() as u64) as usize];
        let producer = world.producers.get_mut(PRODUCER).expect("bench producer");
        producer
            .produce(&mut world.sim, &name, &i.to_be_bytes(), tag)
            .map_err(step(format!("item {i}")))?;
    }
    let producer = &world.producers[PRODUCER];
    let stats = producer.stats();
    Ok(CkCacheRow {
        max_items: cache.max_items,
        max_age_ms: cache.max_age_ms,
        items: stats.items,
        cks_generated: stats.cks_minted,
        abe_encryptions: stats.abe_encryptions,
        ck_objects: producer.ck_objects().len(),
        total_virtual_ms: world.sim.now(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CkCacheReport {
    pub schedule: CkCacheSchedule,
    pub cached: CkCacheRow,
    /// Same schedule with a fresh CK for every item.
    pub baseline: CkCacheRow,
}

pub fn bench_ckcache(abe_type: AbeType, cache: CacheConfig, schedule: CkCacheSchedule, seed: u64) -> Result<CkCacheReport, RunError> {
    let baseline_cache = CacheConfig {
        max_items: 1,
        max_age_ms: cache.max_age_ms,
    };
    Ok(CkCacheReport {
        schedule,
        cached: ckcache_run(abe_type, cache, schedule, seed)?,
        baseline: ckcache_run(abe_type, baseline_cache, schedule, seed)?,
    })
}
