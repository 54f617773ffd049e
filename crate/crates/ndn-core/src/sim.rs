//! Deterministic single-loop network simulator.
//!
//! A [`Sim`] owns every forwarder, face and link, a virtual millisecond clock
//! and one event queue. Events at the same instant run in scheduling order,
//! and all randomness (nonces, link loss) comes from one seeded generator, so
//! a given seed always produces the same packet trace.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use log::trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::forwarder::{ContentStore, FaceId, Fib, Pit, PitEntry, PitKey, DEFAULT_CS_CAPACITY};
use crate::name::Name;
use crate::packet::{decode_packet, Data, Interest, Packet};

pub type NodeId = usize;
pub type PendingId = u64;

pub type InterestHandler = Box<dyn FnMut(&Interest) -> Option<Data>>;
type DataCallback = Box<dyn FnOnce(Data)>;
type TimeoutCallback = Box<dyn FnOnce(Interest)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPolicy {
    pub delay_ms: u64,
    pub loss: f64,
}

impl LinkPolicy {
    pub fn new(delay_ms: u64, loss: f64) -> Self {
        LinkPolicy { delay_ms, loss }
    }
}

impl Default for LinkPolicy {
    fn default() -> Self {
        LinkPolicy {
            delay_ms: 5,
            loss: 0.0,
        }
    }
}

/// Packet counters for a whole simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub interests_expressed: u64,
    pub interests_forwarded: u64,
    pub interests_to_producers: u64,
    pub data_from_producers: u64,
    pub data_delivered: u64,
    pub cache_hits: u64,
    pub timeouts: u64,
    pub lost_on_link: u64,
    pub duplicate_nonces: u64,
    pub unsolicited_data: u64,
    pub retransmissions: u64,
}

/// What an application face observes for its own Interests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceEvent {
    Data { pending: PendingId, data: Data },
    Timeout { pending: PendingId, interest: Interest },
}

impl FaceEvent {
    pub fn pending(&self) -> PendingId {
        match self {
            FaceEvent::Data { pending, .. } | FaceEvent::Timeout { pending, .. } => *pending,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistrationId {
    pub face: FaceId,
    pub index: usize,
}

struct Registration {
    prefix: Name,
    handler: InterestHandler,
    invocations: u64,
}

struct Pending {
    interest: Interest,
    callbacks: Option<(DataCallback, TimeoutCallback)>,
}

#[derive(Default)]
struct AppFace {
    registrations: Vec<Registration>,
    pending: BTreeMap<PendingId, Pending>,
    inbox: VecDeque<FaceEvent>,
}

enum FaceKind {
    App(AppFace),
    Link { peer: FaceId, policy: LinkPolicy },
}

struct Face {
    node: NodeId,
    up: bool,
    kind: FaceKind,
}

/// One forwarder: FIB, PIT and content store.
#[derive(Debug, Clone)]
pub struct Forwarder {
    pub label: String,
    pub fib: Fib,
    pub pit: Pit,
    pub cs: ContentStore,
}

enum Event {
    /// The forwarder owning `face` receives `bytes` through it.
    ForwarderReceive { face: FaceId, bytes: Vec<u8> },
    /// The application behind app face `face` receives `bytes`.
    AppReceive { face: FaceId, bytes: Vec<u8> },
    Timeout { face: FaceId, pending: PendingId },
}

struct Scheduled {
    at: u64,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert for earliest-first.
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

pub struct Sim {
    now: u64,
    seq: u64,
    next_pending: PendingId,
    queue: BinaryHeap<Scheduled>,
    nodes: Vec<Forwarder>,
    faces: Vec<Face>,
    rng: ChaCha8Rng,
    counters: Counters,
}

impl Sim {
    pub fn new(seed: u64) -> Self {
        Sim {
            now: 0,
            seq: 0,
            next_pending: 1,
            queue: BinaryHeap::new(),
            nodes: Vec::new(),
            faces: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: Counters::default(),
        }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn counters_mut(&mut self) -> &mut Counters {
        &mut self.counters
    }

    pub fn add_node(&mut self, label: &str) -> NodeId {
        self.add_node_with_cs(label, DEFAULT_CS_CAPACITY)
    }

    pub fn add_node_with_cs(&mut self, label: &str, cs_capacity: usize) -> NodeId {
        self.nodes.push(Forwarder {
            label: label.to_owned(),
            fib: Fib::default(),
            pit: Pit::default(),
            cs: ContentStore::with_capacity(cs_capacity),
        });
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &Forwarder {
        &self.nodes[id]
    }

    pub fn node_of(&self, face: FaceId) -> NodeId {
        self.faces[face].node
    }

    /// Connects two forwarders with a symmetric link; returns the face on
    /// each side.
    pub fn connect(&mut self, a: NodeId, b: NodeId, policy: LinkPolicy) -> (FaceId, FaceId) {
        let fa = self.faces.len();
        let fb = fa + 1;
        self.faces.push(Face {
            node: a,
            up: true,
            kind: FaceKind::Link { peer: fb, policy },
        });
        self.faces.push(Face {
            node: b,
            up: true,
            kind: FaceKind::Link { peer: fa, policy },
        });
        self.rebuild_routes();
        (fa, fb)
    }

    pub fn set_link_policy(&mut self, face: FaceId, policy: LinkPolicy) {
        let peer = match &mut self.faces[face].kind {
            FaceKind::Link { peer, policy: p } => {
                *p = policy;
                *peer
            }
            FaceKind::App(_) => return,
        };
        if let FaceKind::Link { policy: p, .. } = &mut self.faces[peer].kind {
            *p = policy;
        }
    }

    /// Attaches an application to `node`.
    pub fn add_app_face(&mut self, node: NodeId) -> FaceId {
        self.faces.push(Face {
            node,
            up: true,
            kind: FaceKind::App(AppFace::default()),
        });
        self.faces.len() - 1
    }

    fn app(&mut self, face: FaceId) -> Result<&mut AppFace, SimError> {
        match self.faces.get_mut(face).map(|f| &mut f.kind) {
            Some(FaceKind::App(app)) => Ok(app),
            _ => Err(SimError::NotAppFace(face)),
        }
    }

    /// Routes Interests under `prefix` to this application face.
    pub fn register_prefix(
        &mut self,
        face: FaceId,
        prefix: Name,
        handler: InterestHandler,
    ) -> Result<RegistrationId, SimError> {
        if prefix.is_empty() {
            return Err(SimError::EmptyPrefix);
        }
        if !self.faces.get(face).is_some_and(|f| f.up) {
            return Err(SimError::Detached(face));
        }
        let app = self.app(face)?;
        if app.registrations.iter().any(|r| r.prefix == prefix) {
            return Err(SimError::DuplicateRegistration(prefix.to_string()));
        }
        app.registrations.push(Registration {
            prefix,
            handler,
            invocations: 0,
        });
        let index = app.registrations.len() - 1;
        self.rebuild_routes();
        Ok(RegistrationId { face, index })
    }

    /// How many Interests the handler behind `reg` has been asked to answer.
    pub fn handler_invocations(&self, reg: RegistrationId) -> u64 {
        match &self.faces[reg.face].kind {
            FaceKind::App(app) => app.registrations[reg.index].invocations,
            FaceKind::Link { .. } => 0,
        }
    }

    /// Total handler invocations on an application face.
    pub fn face_invocations(&self, face: FaceId) -> u64 {
        match &self.faces[face].kind {
            FaceKind::App(app) => app.registrations.iter().map(|r| r.invocations).sum(),
            FaceKind::Link { .. } => 0,
        }
    }

    /// Takes a face down: it stops sending and receiving, its prefixes are
    /// withdrawn and its pending Interests are discarded.
    pub fn detach_face(&mut self, face: FaceId) {
        self.faces[face].up = false;
        if let FaceKind::App(app) = &mut self.faces[face].kind {
            app.pending.clear();
            app.inbox.clear();
        }
        if let FaceKind::Link { peer, .. } = self.faces[face].kind {
            self.faces[peer].up = false;
        }
        self.rebuild_routes();
    }

    pub fn is_up(&self, face: FaceId) -> bool {
        self.faces[face].up
    }

    /// Recomputes every FIB: each registered prefix is routed along a
    /// fewest-hops path towards its registering node.
    fn rebuild_routes(&mut self) {
        for n in &mut self.nodes {
            n.fib.clear();
        }
        // adjacency: node -> [(link face on node, neighbour)]
        let mut adj: Vec<Vec<(FaceId, NodeId)>> = vec![Vec::new(); self.nodes.len()];
        for (id, f) in self.faces.iter().enumerate() {
            if let FaceKind::Link { peer, .. } = f.kind {
                if f.up {
                    adj[f.node].push((id, self.faces[peer].node));
                }
            }
        }
        let mut routes = Vec::new();
        for (id, f) in self.faces.iter().enumerate() {
            let FaceKind::App(app) = &f.kind else { continue };
            if !f.up {
                continue;
            }
            for r in &app.registrations {
                routes.push((r.prefix.clone(), id, f.node));
            }
        }
        for (prefix, app_face, origin) in routes {
            self.nodes[origin].fib.insert(prefix.clone(), app_face);
            // BFS outward from the origin; each newly reached node routes
            // back through the face it was reached by.
            let mut seen = vec![false; self.nodes.len()];
            seen[origin] = true;
            let mut frontier = VecDeque::from([origin]);
            while let Some(n) = frontier.pop_front() {
                for &(face, neighbour) in &adj[n] {
                    if seen[neighbour] {
                        continue;
                    }
                    seen[neighbour] = true;
                    let FaceKind::Link { peer, .. } = self.faces[face].kind else {
                        unreachable!()
                    };
                    self.nodes[neighbour].fib.insert(prefix.clone(), peer);
                    frontier.push_back(neighbour);
                }
            }
        }
    }

    fn schedule(&mut self, at: u64, event: Event) {
        self.seq += 1;
        self.queue.push(Scheduled {
            at,
            seq: self.seq,
            event,
        });
    }

    /// Sends an Interest from an application face. The nonce is replaced by
    /// a fresh random value. The outcome is reported through
    /// [`Sim::next_event`] or [`Sim::fetch`].
    pub fn express_interest(
        &mut self,
        face: FaceId,
        interest: Interest,
    ) -> Result<PendingId, SimError> {
        self.express(face, interest, None)
    }

    /// Callback flavour of [`Sim::express_interest`]: exactly one of
    /// `on_data` or `on_timeout` runs.
    pub fn express_interest_with(
        &mut self,
        face: FaceId,
        interest: Interest,
        on_data: impl FnOnce(Data) + 'static,
        on_timeout: impl FnOnce(Interest) + 'static,
    ) -> Result<PendingId, SimError> {
        self.express(face, interest, Some((Box::new(on_data), Box::new(on_timeout))))
    }

    fn express(
        &mut self,
        face: FaceId,
        mut interest: Interest,
        callbacks: Option<(DataCallback, TimeoutCallback)>,
    ) -> Result<PendingId, SimError> {
        if !self.faces.get(face).is_some_and(|f| f.up) {
            return Err(SimError::Detached(face));
        }
        self.rng.fill(&mut interest.nonce);
        let bytes = interest.encode()?;
        let id = self.next_pending;
        self.next_pending += 1;
        let lifetime = interest.lifetime_ms;
        trace!("t={} face={} express {}", self.now, face, interest.name);
        self.app(face)?.pending.insert(
            id,
            Pending {
                interest,
                callbacks,
            },
        );
        self.counters.interests_expressed += 1;
        self.schedule(self.now + lifetime, Event::Timeout { face, pending: id });
        self.schedule(self.now, Event::ForwarderReceive { face, bytes });
        Ok(id)
    }

    /// Sends Data from an application face into its forwarder, for producers
    /// that answer after their handler has returned.
    pub fn put_data(&mut self, face: FaceId, data: Data) -> Result<(), SimError> {
        if !self.faces.get(face).is_some_and(|f| f.up) {
            return Err(SimError::Detached(face));
        }
        self.app(face)?;
        let bytes = data.encode()?;
        self.counters.data_from_producers += 1;
        self.schedule(self.now, Event::ForwarderReceive { face, bytes });
        Ok(())
    }

    /// Processes one event. Returns false when the queue is empty.
    pub fn step(&mut self) -> bool {
        let Some(s) = self.queue.pop() else {
            return false;
        };
        self.now = self.now.max(s.at);
        match s.event {
            Event::ForwarderReceive { face, bytes } => self.forwarder_receive(face, &bytes),
            Event::AppReceive { face, bytes } => self.app_receive(face, &bytes),
            Event::Timeout { face, pending } => self.timeout(face, pending),
        }
        true
    }

    pub fn run_until_idle(&mut self) {
        while self.step() {}
    }

    /// Runs every event due up to `now + ms`, then sets the clock there.
    pub fn advance(&mut self, ms: u64) {
        let target = self.now + ms;
        self.advance_to(target);
    }

    pub fn advance_to(&mut self, t: u64) {
        while self.queue.peek().is_some_and(|s| s.at <= t) {
            self.step();
        }
        self.now = self.now.max(t);
    }

    /// Next event for `face`, running the loop until one is available.
    pub fn next_event(&mut self, face: FaceId) -> Option<FaceEvent> {
        loop {
            if let Ok(app) = self.app(face) {
                if let Some(ev) = app.inbox.pop_front() {
                    return Some(ev);
                }
            } else {
                return None;
            }
            if !self.step() {
                return None;
            }
        }
    }

    /// Runs the loop until `pending` resolves. Other events for the face stay
    /// queued in its inbox.
    pub fn wait_for(&mut self, face: FaceId, pending: PendingId) -> Option<FaceEvent> {
        loop {
            let app = self.app(face).ok()?;
            if let Some(pos) = app.inbox.iter().position(|e| e.pending() == pending) {
                return app.inbox.remove(pos);
            }
            if !app.pending.contains_key(&pending) {
                return None;
            }
            if !self.step() {
                return None;
            }
        }
    }

    /// Expresses `interest` and blocks (in virtual time) for the outcome.
    pub fn fetch(&mut self, face: FaceId, interest: Interest) -> Result<Data, Interest> {
        let original = interest.clone();
        let Ok(id) = self.express_interest(face, interest) else {
            return Err(original);
        };
        match self.wait_for(face, id) {
            Some(FaceEvent::Data { data, .. }) => Ok(data),
            Some(FaceEvent::Timeout { interest, .. }) => Err(interest),
            None => Err(original),
        }
    }

    fn send_from_forwarder(&mut self, face: FaceId, bytes: Vec<u8>) {
        let f = &self.faces[face];
        if !f.up {
            return;
        }
        match f.kind {
            FaceKind::App(_) => self.schedule(self.now, Event::AppReceive { face, bytes }),
            FaceKind::Link { peer, policy } => {
                if policy.loss > 0.0 && self.rng.gen_bool(policy.loss.min(1.0)) {
                    self.counters.lost_on_link += 1;
                    trace!("t={} face={} lost packet", self.now, face);
                    return;
                }
                self.schedule(
                    self.now + policy.delay_ms,
                    Event::ForwarderReceive { face: peer, bytes },
                );
            }
        }
    }

    fn forwarder_receive(&mut self, face: FaceId, bytes: &[u8]) {
        if !self.faces[face].up {
            return;
        }
        match decode_packet(bytes) {
            Ok(Packet::Interest(i)) => self.on_interest(face, i, bytes),
            Ok(Packet::Data(d)) => self.on_data(face, d, bytes),
            Err(e) => trace!("face={face} undecodable packet: {e}"),
        }
    }

    fn on_interest(&mut self, in_face: FaceId, interest: Interest, bytes: &[u8]) {
        let now = self.now;
        let node_id = self.faces[in_face].node;
        let node = &mut self.nodes[node_id];
        let key = PitKey::of(&interest);

        if let Some(entry) = node.pit.get_mut(&key, now) {
            if entry.nonces.contains(&interest.nonce) {
                self.counters.duplicate_nonces += 1;
                trace!("t={now} node={node_id} duplicate nonce {}", interest.name);
                return;
            }
        }
        if let Some(data) = node.cs.lookup(&interest, now) {
            self.counters.cache_hits += 1;
            trace!("t={now} node={node_id} cs hit {} -> {}", interest.name, data.name);
            let out = data.encode().expect("cached data was decoded from valid bytes");
            self.send_from_forwarder(in_face, out);
            return;
        }
        if let Some(entry) = node.pit.get_mut(&key, now) {
            if !entry.in_faces.contains(&in_face) {
                entry.in_faces.push(in_face);
            }
            entry.nonces.push(interest.nonce);
            entry.expiry = entry.expiry.max(now + interest.lifetime_ms);
            return;
        }
        node.pit.insert(
            key,
            PitEntry {
                in_faces: vec![in_face],
                nonces: vec![interest.nonce],
                expiry: now + interest.lifetime_ms,
            },
        );
        match node.fib.lookup(&interest.name, in_face) {
            Some(out) => {
                self.counters.interests_forwarded += 1;
                trace!("t={now} node={node_id} forward {} -> face {out}", interest.name);
                self.send_from_forwarder(out, bytes.to_vec());
            }
            None => trace!("t={now} node={node_id} no route for {}", interest.name),
        }
    }

    fn on_data(&mut self, in_face: FaceId, data: Data, bytes: &[u8]) {
        let now = self.now;
        let node_id = self.faces[in_face].node;
        let node = &mut self.nodes[node_id];
        let entries = node.pit.take_matching(&data.name, now);
        if entries.is_empty() {
            self.counters.unsolicited_data += 1;
            trace!("t={now} node={node_id} unsolicited {}", data.name);
            return;
        }
        node.cs.insert(data, now);
        let mut out_faces: Vec<FaceId> = entries
            .into_iter()
            .flat_map(|e| e.in_faces)
            .filter(|f| *f != in_face)
            .collect();
        out_faces.sort_unstable();
        out_faces.dedup();
        for f in out_faces {
            self.send_from_forwarder(f, bytes.to_vec());
        }
    }

    fn app_receive(&mut self, face: FaceId, bytes: &[u8]) {
        if !self.faces[face].up {
            return;
        }
        match decode_packet(bytes) {
            Ok(Packet::Interest(i)) => self.app_interest(face, i),
            Ok(Packet::Data(d)) => self.app_data(face, d),
            Err(e) => trace!("face={face} undecodable packet: {e}"),
        }
    }

    fn app_interest(&mut self, face: FaceId, interest: Interest) {
        let Ok(app) = self.app(face) else { return };
        let Some(reg) = app
            .registrations
            .iter_mut()
            .filter(|r| r.prefix.is_prefix_of(&interest.name))
            .max_by_key(|r| r.prefix.len())
        else {
            return;
        };
        reg.invocations += 1;
        let reply = (reg.handler)(&interest);
        self.counters.interests_to_producers += 1;
        if let Some(data) = reply {
            if !interest.matches_name(&data.name) {
                trace!("face={face} handler answered {} with {}", interest.name, data.name);
                return;
            }
            match data.encode() {
                Ok(bytes) => {
                    self.counters.data_from_producers += 1;
                    self.schedule(self.now, Event::ForwarderReceive { face, bytes });
                }
                Err(e) => trace!("face={face} unencodable reply: {e}"),
            }
        }
    }

    fn app_data(&mut self, face: FaceId, data: Data) {
        let Ok(app) = self.app(face) else { return };
        let matched: Vec<PendingId> = app
            .pending
            .iter()
            .filter(|(_, p)| p.interest.matches_name(&data.name))
            .map(|(id, _)| *id)
            .collect();
        let mut callbacks = Vec::new();
        let delivered = matched.len() as u64;
        for id in matched {
            let p = app.pending.remove(&id).expect("just listed");
            match p.callbacks {
                Some((on_data, _)) => callbacks.push(on_data),
                None => app.inbox.push_back(FaceEvent::Data {
                    pending: id,
                    data: data.clone(),
                }),
            }
        }
        self.counters.data_delivered += delivered;
        for cb in callbacks {
            cb(data.clone());
        }
    }

    fn timeout(&mut self, face: FaceId, pending: PendingId) {
        let Ok(app) = self.app(face) else { return };
        let Some(p) = app.pending.remove(&pending) else {
            return;
        };
        trace!("face={face} timeout {}", p.interest.name);
        match p.callbacks {
            Some((_, on_timeout)) => {
                self.counters.timeouts += 1;
                on_timeout(p.interest);
            }
            None => {
                app.inbox.push_back(FaceEvent::Timeout {
                    pending,
                    interest: p.interest,
                });
                self.counters.timeouts += 1;
            }
        }
    }
}

/// Handler answering Interests from a shared repository.
pub fn repo_handler(repo: std::rc::Rc<std::cell::RefCell<crate::repo::Repo>>) -> InterestHandler {
    Box::new(move |i: &Interest| repo.borrow().find(i))
}
