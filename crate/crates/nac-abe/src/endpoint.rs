use std::cell::{Ref, RefCell};
use std::rc::Rc;

use log::debug;
use ndn_core::{repo_handler, Data, FaceId, Interest, Name, NodeId, RegistrationId, Repo, Sim};
use trust_schema::{Outcome, Validator};

use crate::error::NacError;
use crate::fetch::{fetch_one, fetch_segments, FetchOptions, FetchStats, Fetched};
use crate::naming::split_segment;
use crate::segment::SegmentedObject;

/// An application face serving a repository of published packets.
#[derive(Debug, Clone)]
pub struct Publisher {
    face: FaceId,
    repo: Rc<RefCell<Repo>>,
    registrations: Vec<RegistrationId>,
}

impl Publisher {
    pub fn attach(sim: &mut Sim, node: NodeId, prefixes: &[&Name]) -> Result<Publisher, NacError> {
        let face = sim.add_app_face(node);
        let repo = Rc::new(RefCell::new(Repo::new()));
        let mut registrations = Vec::new();
        for p in prefixes {
            registrations.push(sim.register_prefix(face, (*p).clone(), repo_handler(repo.clone()))?);
        }
        Ok(Publisher {
            face,
            repo,
            registrations,
        })
    }

    pub fn face(&self) -> FaceId {
        self.face
    }

    pub fn publish(&self, data: Data) {
        self.repo.borrow_mut().insert(data);
    }

    pub fn publish_object(&self, object: &SegmentedObject) {
        let mut repo = self.repo.borrow_mut();
        for d in &object.segments {
            repo.insert(d.clone());
        }
    }

    pub fn repo(&self) -> Ref<'_, Repo> {
        self.repo.borrow()
    }

    /// Interests answered from this publisher's repository.
    pub fn served(&self, sim: &Sim) -> u64 {
        self.registrations.iter().map(|r| sim.handler_invocations(*r)).sum()
    }

    /// Distinct segmented objects published under names containing `marker`.
    pub fn objects_with(&self, marker: &str) -> Vec<Name> {
        let names: std::collections::BTreeSet<Name> = self
            .repo
            .borrow()
            .names()
            .filter(|n| n.components().iter().any(|c| c.is(marker)))
            .filter_map(|n| split_segment(n).map(|(obj, _)| obj))
            .collect();
        names.into_iter().collect()
    }

    /// Content bytes and segment count of the published object `object`.
    pub fn object_size(&self, object: &Name) -> (usize, usize) {
        self.repo
            .borrow()
            .packets()
            .filter(|d| split_segment(&d.name).is_some_and(|(obj, _)| obj == *object))
            .fold((0, 0), |(bytes, segs), d| (bytes + d.content.len(), segs + 1))
    }
}

/// Outcome of validating one received packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationRecord {
    pub name: Name,
    pub outcome: Outcome,
    pub chain: Vec<Name>,
}

/// Lifetime of Interests probing for a version that may not exist.
pub const PROBE_LIFETIME_MS: u64 = 1000;

/// Fetching side of a role: Interests go out on `face` and every packet
/// received is checked against the trust schema.
#[derive(Debug, Clone)]
pub struct Session {
    pub face: FaceId,
    pub validator: Validator,
    pub options: FetchOptions,
    pub stats: FetchStats,
    pub validations: Vec<ValidationRecord>,
}

impl Session {
    pub fn new(face: FaceId, validator: Validator, options: FetchOptions) -> Self {
        Session {
            face,
            validator,
            options,
            stats: FetchStats::default(),
            validations: Vec::new(),
        }
    }

    pub fn validate(&mut self, sim: &mut Sim, data: &Data) -> Result<(), NacError> {
        validate_on(sim, self.face, &self.options, &mut self.validator, &mut self.validations, data)
    }

    /// One validated packet.
    pub fn fetch_data(&mut self, sim: &mut Sim, interest: &Interest) -> Result<Data, NacError> {
        let data = fetch_one(sim, self.face, interest, &self.options)?;
        self.validate(sim, &data)?;
        Ok(data)
    }

    /// A validated segmented object.
    pub fn fetch_object(&mut self, sim: &mut Sim, first: &Interest, options: FetchOptions) -> Result<Fetched, NacError> {
        let face = self.face;
        let validator = &mut self.validator;
        let log = &mut self.validations;
        let check_opts = self.options;
        let fetched = fetch_segments(sim, face, first, &options, &mut |sim: &mut Sim, d: &Data| {
            validate_on(sim, face, &check_opts, validator, log, d)
        })?;
        self.stats.absorb(&fetched.stats);
        Ok(fetched)
    }

    /// Latest version under `prefix`, as answered by a fresh packet.
    pub fn discover(&mut self, sim: &mut Sim, prefix: &Name) -> Result<Fetched, NacError> {
        let first = Interest::new(prefix.clone()).can_be_prefix(true).must_be_fresh(true);
        self.fetch_object(sim, &first, self.options)
    }

    /// Looks for versions after `known` by asking for `v=known+1`, then the
    /// next, until one is missing. A cached answer to a discovery Interest
    /// can still be fresh after a newer version is published, so callers
    /// probe when the cached version turns out to be insufficient.
    pub fn probe_newer(&mut self, sim: &mut Sim, prefix: &Name, known: u64) -> Option<Fetched> {
        let mut newest = None;
        let mut v = known;
        let probe = FetchOptions {
            max_retries: 1,
            lifetime_ms: self.options.lifetime_ms.min(PROBE_LIFETIME_MS),
            ..self.options
        };
        loop {
            let first = Interest::new(prefix.child(ndn_core::Component::version(v + 1))).can_be_prefix(true);
            match self.fetch_object(sim, &first, probe) {
                Ok(f) => {
                    debug!("found newer version {}", f.name);
                    newest = Some(f);
                    v += 1;
                }
                Err(_) => return newest,
            }
        }
    }
}

fn validate_on(
    sim: &mut Sim,
    face: FaceId,
    options: &FetchOptions,
    validator: &mut Validator,
    log: &mut Vec<ValidationRecord>,
    data: &Data,
) -> Result<(), NacError> {
    let result = validator.validate(data, &mut |cert: &Name| {
        fetch_one(sim, face, &Interest::new(cert.clone()).can_be_prefix(true), options).ok()
    });
    log.push(ValidationRecord {
        name: data.name.clone(),
        outcome: result.outcome,
        chain: result.chain.clone(),
    });
    if result.outcome.is_valid() {
        Ok(())
    } else {
        Err(NacError::Validation {
            name: data.name.clone(),
            outcome: result.outcome,
        })
    }
}
