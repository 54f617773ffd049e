use std::collections::BTreeMap;
use std::ops::Bound;

use crate::name::Name;
use crate::packet::{Data, Interest};

/// Ranking used when a prefix Interest matches several packets: highest
/// version first, then lowest segment, then name order.
fn rank(d: &Data) -> (std::cmp::Reverse<u64>, u64) {
    let version = d.name.version().unwrap_or(0);
    let segment = d.name.segment().unwrap_or(0);
    (std::cmp::Reverse(version), segment)
}

/// Picks the preferred packet among prefix matches.
pub fn select_latest<'a>(candidates: impl IntoIterator<Item = &'a Data>) -> Option<&'a Data> {
    candidates.into_iter().min_by_key(|d| rank(d))
}

/// Iterates over the values of `map` whose key has `prefix` as a prefix.
pub fn prefix_range<'a, V>(
    map: &'a BTreeMap<Name, V>,
    prefix: &'a Name,
) -> impl Iterator<Item = (&'a Name, &'a V)> + 'a {
    map.range((Bound::Included(prefix.clone()), Bound::Unbounded))
        .take_while(move |(k, _)| prefix.is_prefix_of(k))
}

/// Immutable published packets served by a producer.
#[derive(Debug, Default, Clone)]
pub struct Repo {
    packets: BTreeMap<Name, Data>,
}

impl Repo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a packet. Published data is immutable, so re-inserting an
    /// existing name keeps the first copy and returns false.
    pub fn insert(&mut self, data: Data) -> bool {
        if self.packets.contains_key(&data.name) {
            return false;
        }
        self.packets.insert(data.name.clone(), data);
        true
    }

    pub fn get(&self, name: &Name) -> Option<&Data> {
        self.packets.get(name)
    }

    pub fn find(&self, interest: &Interest) -> Option<Data> {
        if interest.can_be_prefix {
            select_latest(prefix_range(&self.packets, &interest.name).map(|(_, d)| d)).cloned()
        } else {
            self.packets.get(&interest.name).cloned()
        }
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.packets.keys()
    }

    pub fn packets(&self) -> impl Iterator<Item = &Data> {
        self.packets.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Component;

    #[test]
    fn prefix_lookup_prefers_latest_version_first_segment() {
        let mut repo = Repo::new();
        let base: Name = "/aa/PUBPARAMS/KP".parse().unwrap();
        for v in [1u64, 2, 10] {
            for s in [1u64, 0] {
                let n = base.child(Component::version(v)).child(Component::segment(s));
                repo.insert(Data::new(n, vec![v as u8, s as u8]));
            }
        }
        let hit = repo.find(&Interest::new(base.clone()).can_be_prefix(true)).unwrap();
        assert_eq!(hit.content, vec![10, 0]);
        let pinned = repo
            .find(&Interest::new(base.child(Component::version(2))).can_be_prefix(true))
            .unwrap();
        assert_eq!(pinned.content, vec![2, 0]);
        assert!(repo.find(&Interest::new(base)).is_none());
    }

    #[test]
    fn published_data_is_immutable() {
        let mut repo = Repo::new();
        let n: Name = "/a/b".parse().unwrap();
        assert!(repo.insert(Data::new(n.clone(), b"1".to_vec())));
        assert!(!repo.insert(Data::new(n.clone(), b"2".to_vec())));
        assert_eq!(repo.get(&n).unwrap().content, b"1");
    }
}
