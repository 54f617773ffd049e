//! Segment fetching with an AIMD congestion window.
//!
//! The first Interest discovers the object (version and FinalBlockId); the
//! rest are pipelined under the window. The window grows by one per ack in
//! slow start and by `1/cwnd` per ack above `ssthresh`. A timeout halves
//! `ssthresh` and resets the window to one, at most once per window of
//! Interests: losses among Interests sent before the last decrease do not
//! decrease again.

use std::collections::{BTreeMap, HashMap, VecDeque};

use log::{debug, trace};
use ndn_core::{Component, Data, FaceEvent, FaceId, Interest, Name, PendingId, Sim};

use crate::error::NacError;
use crate::naming::split_segment;

pub const DEFAULT_MAX_RETRIES: u32 = 15;
pub const DEFAULT_LIFETIME_MS: u64 = 4000;
pub const INITIAL_SSTHRESH: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetchOptions {
    /// Consecutive timeouts tolerated on one Interest before aborting.
    pub max_retries: u32,
    pub lifetime_ms: u64,
    pub initial_ssthresh: f64,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            max_retries: DEFAULT_MAX_RETRIES,
            lifetime_ms: DEFAULT_LIFETIME_MS,
            initial_ssthresh: INITIAL_SSTHRESH,
        }
    }
}

impl FetchOptions {
    pub fn with_max_retries(mut self, n: u32) -> Self {
        self.max_retries = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aimd {
    cwnd: f64,
    ssthresh: f64,
    /// Send sequence number at the last decrease.
    decreased_at: Option<u64>,
    pub decreases: u64,
    /// Window after every change, starting with the initial window.
    pub trace: Vec<f64>,
}

impl Aimd {
    pub fn new(ssthresh: f64) -> Self {
        Aimd {
            cwnd: 1.0,
            ssthresh,
            decreased_at: None,
            decreases: 0,
            trace: vec![1.0],
        }
    }

    pub fn cwnd(&self) -> f64 {
        self.cwnd
    }

    pub fn ssthresh(&self) -> f64 {
        self.ssthresh
    }

    /// Interests allowed in flight.
    pub fn window(&self) -> usize {
        (self.cwnd.floor() as usize).max(1)
    }

    pub fn on_ack(&mut self) {
        if self.cwnd < self.ssthresh {
            self.cwnd += 1.0;
        } else {
            self.cwnd += 1.0 / self.cwnd;
        }
        self.trace.push(self.cwnd);
    }

    /// Timeout of the Interest sent as number `sent`, observed when `latest`
    /// Interests have been sent. Returns whether the window was cut.
    pub fn on_timeout(&mut self, sent: u64, latest: u64) -> bool {
        if self.decreased_at.is_some_and(|d| sent <= d) {
            return false;
        }
        self.ssthresh = (self.cwnd / 2.0).max(1.0);
        self.cwnd = 1.0;
        self.decreased_at = Some(latest);
        self.decreases += 1;
        self.trace.push(self.cwnd);
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FetchStats {
    pub interests: u64,
    pub timeouts: u64,
    pub retransmissions: u64,
    pub decreases: u64,
    pub window_trace: Vec<f64>,
}

impl FetchStats {
    pub fn max_window(&self) -> f64 {
        self.window_trace.iter().copied().fold(0.0, f64::max)
    }

    pub fn absorb(&mut self, other: &FetchStats) {
        self.interests += other.interests;
        self.timeouts += other.timeouts;
        self.retransmissions += other.retransmissions;
        self.decreases += other.decreases;
        self.window_trace.extend_from_slice(&other.window_trace);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fetched {
    /// Object name without the segment component.
    pub name: Name,
    pub segments: Vec<Data>,
    pub stats: FetchStats,
}

impl Fetched {
    pub fn bytes(&self) -> Vec<u8> {
        self.segments.iter().flat_map(|d| d.content.iter().copied()).collect()
    }
}

/// Per-segment acceptance check, typically trust-schema validation. It may
/// use the simulator to fetch certificates.
pub type SegmentCheck<'a> = dyn FnMut(&mut Sim, &Data) -> Result<(), NacError> + 'a;

/// Expresses `interest` until Data arrives or `max_retries` retransmissions
/// have timed out.
pub fn fetch_one(sim: &mut Sim, face: FaceId, interest: &Interest, opts: &FetchOptions) -> Result<Data, NacError> {
    let mut stats = FetchStats::default();
    fetch_one_counted(sim, face, interest, opts, &mut stats, None)
}

fn fetch_one_counted(
    sim: &mut Sim,
    face: FaceId,
    interest: &Interest,
    opts: &FetchOptions,
    stats: &mut FetchStats,
    mut aimd: Option<(&mut Aimd, &mut u64)>,
) -> Result<Data, NacError> {
    let mut failures = 0;
    loop {
        let id = sim.express_interest(face, interest.clone().lifetime(opts.lifetime_ms))?;
        stats.interests += 1;
        let sent = match aimd.as_mut() {
            Some((_, seq)) => {
                **seq += 1;
                **seq
            }
            None => 0,
        };
        match sim.wait_for(face, id) {
            Some(FaceEvent::Data { data, .. }) => return Ok(data),
            _ => {
                stats.timeouts += 1;
                if let Some((a, seq)) = aimd.as_mut() {
                    a.on_timeout(sent, **seq);
                }
                failures += 1;
                if failures > opts.max_retries {
                    return Err(NacError::Timeout(interest.name.clone()));
                }
                stats.retransmissions += 1;
            }
        }
    }
}

/// Fetches every segment of the object answering `first`, validating each
/// one with `check`.
pub fn fetch_segments(
    sim: &mut Sim,
    face: FaceId,
    first: &Interest,
    opts: &FetchOptions,
    check: &mut SegmentCheck<'_>,
) -> Result<Fetched, NacError> {
    let mut aimd = Aimd::new(opts.initial_ssthresh);
    let mut stats = FetchStats::default();
    let mut seq = 0u64;

    let data = fetch_one_counted(sim, face, first, opts, &mut stats, Some((&mut aimd, &mut seq)))?;
    let (object, first_index) =
        split_segment(&data.name).ok_or_else(|| NacError::malformed("segment name", &data.name))?;
    let last = data
        .final_block_id
        .as_ref()
        .and_then(Component::as_segment)
        .ok_or_else(|| NacError::malformed("segment", format!("{} lacks FinalBlockId", data.name)))?;
    if first_index > last {
        return Err(NacError::malformed("segment", format!("{} is past FinalBlockId", data.name)));
    }
    check(sim, &data)?;
    aimd.on_ack();
    debug!("fetching {object}: {} segments", last + 1);

    let mut slots: Vec<Option<Data>> = vec![None; last as usize + 1];
    slots[first_index as usize] = Some(data);
    let mut queue: VecDeque<u64> = (0..=last).filter(|&i| i != first_index).collect();
    let mut in_flight: BTreeMap<PendingId, (u64, u64)> = BTreeMap::new();
    let mut failures: HashMap<u64, u32> = HashMap::new();

    loop {
        while in_flight.len() < aimd.window() {
            let Some(seg) = queue.pop_front() else { break };
            let interest = Interest::new(object.child(Component::segment(seg))).lifetime(opts.lifetime_ms);
            let id = sim.express_interest(face, interest)?;
            seq += 1;
            stats.interests += 1;
            in_flight.insert(id, (seg, seq));
        }
        if in_flight.is_empty() {
            break;
        }
        let Some(event) = sim.next_event(face) else {
            return Err(NacError::Timeout(object));
        };
        let Some((seg, sent)) = in_flight.remove(&event.pending()) else {
            continue;
        };
        match event {
            FaceEvent::Data { data, .. } => {
                if split_segment(&data.name) != Some((object.clone(), seg)) {
                    return Err(NacError::malformed("segment", format!("unexpected {}", data.name)));
                }
                check(sim, &data)?;
                failures.remove(&seg);
                aimd.on_ack();
                trace!("segment {seg} of {object}, cwnd {:.2}", aimd.cwnd());
                slots[seg as usize] = Some(data);
            }
            FaceEvent::Timeout { .. } => {
                stats.timeouts += 1;
                let n = failures.entry(seg).or_insert(0);
                *n += 1;
                if *n > opts.max_retries {
                    return Err(NacError::Timeout(object.child(Component::segment(seg))));
                }
                if aimd.on_timeout(sent, seq) {
                    debug!("timeout on segment {seg} of {object}: window cut to 1");
                }
                stats.retransmissions += 1;
                queue.push_front(seg);
            }
        }
    }

    stats.decreases = aimd.decreases;
    stats.window_trace = aimd.trace;
    Ok(Fetched {
        name: object,
        segments: slots.into_iter().map(|s| s.expect("every segment arrived")).collect(),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slow_start_then_congestion_avoidance() {
        let mut a = Aimd::new(4.0);
        for _ in 0..3 {
            a.on_ack();
        }
        assert_eq!(a.cwnd(), 4.0);
        a.on_ack();
        assert_eq!(a.cwnd(), 4.25);
        assert_eq!(a.window(), 4);
    }

    #[test]
    fn one_decrease_per_window() {
        let mut a = Aimd::new(16.0);
        for _ in 0..7 {
            a.on_ack();
        }
        assert_eq!(a.cwnd(), 8.0);
        // Interests 10..=17 in flight; all of them time out.
        assert!(a.on_timeout(10, 17));
        assert_eq!((a.cwnd(), a.ssthresh()), (1.0, 4.0));
        for sent in 11..=17 {
            assert!(!a.on_timeout(sent, 17));
        }
        assert!(a.on_timeout(18, 18));
        assert_eq!((a.cwnd(), a.ssthresh()), (1.0, 1.0));
        assert_eq!(a.decreases, 2);
    }
}
