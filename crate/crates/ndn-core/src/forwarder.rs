//! Forwarding tables: FIB, PIT and content store.

use std::collections::BTreeMap;

use crate::name::Name;
use crate::packet::{Data, Interest};
use crate::repo::{prefix_range, select_latest};

pub type FaceId = usize;

pub const DEFAULT_CS_CAPACITY: usize = 4096;

/// Longest-prefix-match table.
#[derive(Debug, Default, Clone)]
pub struct Fib {
    entries: Vec<(Name, FaceId)>,
}

impl Fib {
    pub fn insert(&mut self, prefix: Name, face: FaceId) {
        if !self.entries.iter().any(|(p, f)| *p == prefix && *f == face) {
            self.entries.push((prefix, face));
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Next hop for `name`, never returning `exclude`. Ties between faces on
    /// the same prefix go to the lowest face id.
    pub fn lookup(&self, name: &Name, exclude: FaceId) -> Option<FaceId> {
        self.entries
            .iter()
            .filter(|(p, f)| *f != exclude && p.is_prefix_of(name))
            .max_by(|(pa, fa), (pb, fb)| pa.len().cmp(&pb.len()).then(fb.cmp(fa)))
            .map(|(_, f)| *f)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PitKey {
    pub name: Name,
    pub can_be_prefix: bool,
    pub must_be_fresh: bool,
}

impl PitKey {
    pub fn of(interest: &Interest) -> Self {
        PitKey {
            name: interest.name.clone(),
            can_be_prefix: interest.can_be_prefix,
            must_be_fresh: interest.must_be_fresh,
        }
    }

    fn matches(&self, data: &Name) -> bool {
        if self.can_be_prefix {
            self.name.is_prefix_of(data)
        } else {
            self.name == *data
        }
    }
}

#[derive(Debug, Clone)]
pub struct PitEntry {
    pub in_faces: Vec<FaceId>,
    pub nonces: Vec<[u8; 4]>,
    pub expiry: u64,
}

#[derive(Debug, Default, Clone)]
pub struct Pit {
    entries: BTreeMap<PitKey, PitEntry>,
}

impl Pit {
    /// Live entry for `key`; expired entries are purged on access.
    pub fn get_mut(&mut self, key: &PitKey, now: u64) -> Option<&mut PitEntry> {
        if self.entries.get(key).is_some_and(|e| e.expiry <= now) {
            self.entries.remove(key);
        }
        self.entries.get_mut(key)
    }

    pub fn insert(&mut self, key: PitKey, entry: PitEntry) {
        self.entries.insert(key, entry);
    }

    /// Removes and returns every live entry satisfied by `data`.
    pub fn take_matching(&mut self, data: &Name, now: u64) -> Vec<PitEntry> {
        self.entries.retain(|_, e| e.expiry > now);
        let keys: Vec<PitKey> = self
            .entries
            .keys()
            .filter(|k| k.matches(data))
            .cloned()
            .collect();
        keys.iter().filter_map(|k| self.entries.remove(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
struct CsEntry {
    data: Data,
    arrived: u64,
    tick: u64,
}

impl CsEntry {
    fn is_fresh(&self, now: u64) -> bool {
        now < self.arrived.saturating_add(self.data.freshness_period_ms)
    }
}

/// Bounded LRU cache of Data packets with freshness tracking.
#[derive(Debug, Clone)]
pub struct ContentStore {
    capacity: usize,
    entries: BTreeMap<Name, CsEntry>,
    recency: BTreeMap<u64, Name>,
    tick: u64,
}

impl Default for ContentStore {
    fn default() -> Self {
        Self::with_capacity(DEFAULT_CS_CAPACITY)
    }
}

impl ContentStore {
    pub fn with_capacity(capacity: usize) -> Self {
        ContentStore {
            capacity,
            entries: BTreeMap::new(),
            recency: BTreeMap::new(),
            tick: 0,
        }
    }

    fn touch(&mut self, name: &Name) {
        self.tick += 1;
        if let Some(e) = self.entries.get_mut(name) {
            self.recency.remove(&e.tick);
            e.tick = self.tick;
            self.recency.insert(self.tick, name.clone());
        }
    }

    pub fn insert(&mut self, data: Data, now: u64) {
        if self.capacity == 0 {
            return;
        }
        let name = data.name.clone();
        if let Some(old) = self.entries.remove(&name) {
            self.recency.remove(&old.tick);
        }
        self.tick += 1;
        self.recency.insert(self.tick, name.clone());
        self.entries.insert(
            name,
            CsEntry {
                data,
                arrived: now,
                tick: self.tick,
            },
        );
        while self.entries.len() > self.capacity {
            let (_, victim) = self.recency.pop_first().expect("recency tracks entries");
            self.entries.remove(&victim);
        }
    }

    /// Finds a cached packet satisfying `interest` at time `now`.
    pub fn lookup(&mut self, interest: &Interest, now: u64) -> Option<Data> {
        let usable = |e: &CsEntry| !interest.must_be_fresh || e.is_fresh(now);
        let hit = if interest.can_be_prefix {
            select_latest(
                prefix_range(&self.entries, &interest.name)
                    .map(|(_, e)| e)
                    .filter(|e| usable(e))
                    .map(|e| &e.data),
            )
            .cloned()
        } else {
            self.entries
                .get(&interest.name)
                .filter(|e| usable(e))
                .map(|e| e.data.clone())
        };
        if let Some(d) = &hit {
            self.touch(&d.name);
        }
        hit
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn longest_prefix_match_against_brute_force() {
        let prefixes = ["/a", "/a/b", "/a/b/c/d", "/x", "/a/c"];
        let mut fib = Fib::default();
        for (i, p) in prefixes.iter().enumerate() {
            fib.insert(n(p), i + 10);
        }
        for probe in ["/a/b/c", "/a/b/c/d/e", "/a/z", "/x/y", "/q", "/a/c/b"] {
            let name = n(probe);
            let expected = prefixes
                .iter()
                .enumerate()
                .filter(|(_, p)| n(p).is_prefix_of(&name))
                .max_by_key(|(_, p)| n(p).len())
                .map(|(i, _)| i + 10);
            assert_eq!(fib.lookup(&name, usize::MAX), expected, "{probe}");
        }
    }

    #[test]
    fn cs_is_lru_bounded() {
        let mut cs = ContentStore::with_capacity(2);
        cs.insert(Data::new(n("/1"), vec![]), 0);
        cs.insert(Data::new(n("/2"), vec![]), 0);
        assert!(cs.lookup(&Interest::new(n("/1")), 0).is_some());
        cs.insert(Data::new(n("/3"), vec![]), 0);
        assert!(cs.contains(&n("/1")));
        assert!(!cs.contains(&n("/2")));
        assert!(cs.contains(&n("/3")));
    }

    #[test]
    fn cs_respects_must_be_fresh() {
        let mut cs = ContentStore::default();
        cs.insert(Data::new(n("/a"), vec![]).with_freshness(100), 1000);
        let fresh = Interest::new(n("/a")).must_be_fresh(true);
        assert!(cs.lookup(&fresh, 1099).is_some());
        assert!(cs.lookup(&fresh, 1100).is_none());
        assert!(cs.lookup(&Interest::new(n("/a")), 5000).is_some());
    }

    #[test]
    fn pit_entries_expire() {
        let mut pit = Pit::default();
        let i = Interest::new(n("/a"));
        pit.insert(
            PitKey::of(&i),
            PitEntry {
                in_faces: vec![1],
                nonces: vec![[0; 4]],
                expiry: 10,
            },
        );
        assert!(pit.get_mut(&PitKey::of(&i), 9).is_some());
        assert!(pit.get_mut(&PitKey::of(&i), 10).is_none());
        assert!(pit.is_empty());
    }
}
