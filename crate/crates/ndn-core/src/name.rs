use std::fmt;
use std::str::FromStr;

use crate::error::{NameError, TlvError};
use crate::tlv::{self, types, Reader};

pub const MAX_COMPONENT_LEN: usize = 255;

/// One name component: a TLV type plus raw bytes.
///
/// Generic components use type 0x08. Version (`v=<n>`) and segment
/// (`seg=<n>`) components are typed and carry a non-negative integer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    typ: u64,
    value: Vec<u8>,
}

impl Component {
    pub fn new(typ: u64, value: impl Into<Vec<u8>>) -> Self {
        Component {
            typ,
            value: value.into(),
        }
    }

    pub fn generic(value: impl Into<Vec<u8>>) -> Self {
        Self::new(types::NAME_COMPONENT, value)
    }

    pub fn version(v: u64) -> Self {
        Self::new(types::VERSION_COMPONENT, tlv::encode_nonneg_int(v))
    }

    pub fn segment(s: u64) -> Self {
        Self::new(types::SEGMENT_COMPONENT, tlv::encode_nonneg_int(s))
    }

    pub fn typ(&self) -> u64 {
        self.typ
    }

    pub fn value(&self) -> &[u8] {
        &self.value
    }

    pub fn is_generic(&self) -> bool {
        self.typ == types::NAME_COMPONENT
    }

    /// True for a generic component whose bytes equal `s`.
    pub fn is(&self, s: &str) -> bool {
        self.is_generic() && self.value == s.as_bytes()
    }

    pub fn as_version(&self) -> Option<u64> {
        (self.typ == types::VERSION_COMPONENT)
            .then(|| tlv::decode_nonneg_int(&self.value).ok())
            .flatten()
    }

    pub fn as_segment(&self) -> Option<u64> {
        (self.typ == types::SEGMENT_COMPONENT)
            .then(|| tlv::decode_nonneg_int(&self.value).ok())
            .flatten()
    }

    pub fn encode_to(&self, out: &mut Vec<u8>) {
        tlv::write_tlv(out, self.typ, &self.value);
    }

    pub fn encoded_len(&self) -> usize {
        tlv::tlv_len(self.typ, self.value.len())
    }
}

fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~' | b':')
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.as_version() {
            return write!(f, "v={v}");
        }
        if let Some(s) = self.as_segment() {
            return write!(f, "seg={s}");
        }
        if !self.is_generic() {
            write!(f, "{}=", self.typ)?;
        }
        for &b in &self.value {
            if is_unreserved(b) {
                write!(f, "{}", b as char)?;
            } else {
                write!(f, "%{b:02X}")?;
            }
        }
        Ok(())
    }
}

fn percent_decode(s: &str) -> Result<Vec<u8>, NameError> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s
                .get(i + 1..i + 3)
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| NameError::BadEscape(s.to_owned()))?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    Ok(out)
}

impl FromStr for Component {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let typed = |rest: &str| {
            rest.parse::<u64>()
                .map_err(|_| NameError::BadTypedComponent(s.to_owned()))
        };
        let comp = if let Some(rest) = s.strip_prefix("v=") {
            Component::version(typed(rest)?)
        } else if let Some(rest) = s.strip_prefix("seg=") {
            Component::segment(typed(rest)?)
        } else {
            Component::generic(percent_decode(s)?)
        };
        if comp.value.len() > MAX_COMPONENT_LEN {
            return Err(NameError::ComponentTooLong(comp.value.len()));
        }
        Ok(comp)
    }
}

/// A hierarchical NDN name.
///
/// Ordering is component-wise, so all names sharing a prefix sort
/// contiguously after that prefix.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    components: Vec<Component>,
}

impl Name {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_components(components: Vec<Component>) -> Self {
        Name { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Component> {
        self.components.get(i)
    }

    pub fn last(&self) -> Option<&Component> {
        self.components.last()
    }

    pub fn push(&mut self, c: Component) -> &mut Self {
        self.components.push(c);
        self
    }

    /// Returns a new name with `c` appended.
    pub fn child(&self, c: Component) -> Name {
        let mut n = self.clone();
        n.components.push(c);
        n
    }

    /// Returns a new name with a generic component appended.
    pub fn child_str(&self, s: &str) -> Name {
        self.child(Component::generic(s.as_bytes()))
    }

    pub fn join(&self, other: &Name) -> Name {
        let mut n = self.clone();
        n.components.extend(other.components.iter().cloned());
        n
    }

    /// First `n` components (all of them if `n` exceeds the length).
    pub fn prefix(&self, n: usize) -> Name {
        Name {
            components: self.components[..n.min(self.len())].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &Name) -> bool {
        self.len() <= other.len() && self.components[..] == other.components[..self.len()]
    }

    /// Index of the first version-typed component.
    pub fn version_index(&self) -> Option<usize> {
        self.components.iter().position(|c| c.as_version().is_some())
    }

    pub fn version(&self) -> Option<u64> {
        self.version_index().and_then(|i| self.components[i].as_version())
    }

    pub fn segment(&self) -> Option<u64> {
        self.last().and_then(Component::as_segment)
    }

    pub fn encode_to(&self, out: &mut Vec<u8>) {
        let mut inner = Vec::with_capacity(self.encoded_inner_len());
        for c in &self.components {
            c.encode_to(&mut inner);
        }
        tlv::write_tlv(out, types::NAME, &inner);
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_to(&mut out);
        out
    }

    fn encoded_inner_len(&self) -> usize {
        self.components.iter().map(Component::encoded_len).sum()
    }

    /// Decodes the value part of a Name TLV.
    pub fn decode_value(value: &[u8]) -> Result<Name, TlvError> {
        let mut r = Reader::new(value);
        let mut components = Vec::new();
        while !r.is_empty() {
            let el = r.read()?;
            if el.typ == types::NAME {
                return Err(TlvError::Invalid("nested name"));
            }
            if el.value.len() > MAX_COMPONENT_LEN {
                return Err(TlvError::Invalid("name component longer than 255"));
            }
            components.push(Component::new(el.typ, el.value));
        }
        Ok(Name { components })
    }

    /// Decodes a complete Name TLV, rejecting trailing bytes.
    pub fn decode(bytes: &[u8]) -> Result<Name, TlvError> {
        let mut r = Reader::new(bytes);
        let el = r.expect(types::NAME)?;
        r.finish()?;
        Name::decode_value(el.value)
    }

    pub fn longest_component(&self) -> usize {
        self.components.iter().map(|c| c.value.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "/");
        }
        for c in &self.components {
            write!(f, "/{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let components = s
            .split('/')
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Name { components })
    }
}

impl From<Vec<Component>> for Name {
    fn from(components: Vec<Component>) -> Self {
        Name { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn uri_round_trip() {
        let name = n("/org/mhealth/aa/PUBPARAMS/KP/v=1/seg=0");
        assert_eq!(name.len(), 7);
        assert_eq!(name.get(5).unwrap().as_version(), Some(1));
        assert_eq!(name.segment(), Some(0));
        assert_eq!(name.to_string(), "/org/mhealth/aa/PUBPARAMS/KP/v=1/seg=0");
        assert_eq!(n(&name.to_string()), name);
    }

    #[test]
    fn raw_bytes_are_escaped() {
        let name = Name::new().child(Component::generic(b"/a b=\"c\"".to_vec()));
        assert_eq!(name.to_string(), "/%2Fa%20b%3D%22c%22");
        assert_eq!(n(&name.to_string()), name);
    }

    #[test]
    fn prefix_relation() {
        assert!(n("/a/b").is_prefix_of(&n("/a/b/c")));
        assert!(n("/a/b").is_prefix_of(&n("/a/b")));
        assert!(!n("/a/b/c").is_prefix_of(&n("/a/b")));
        assert!(!n("/a/c").is_prefix_of(&n("/a/b/c")));
        assert!(Name::new().is_prefix_of(&n("/x")));
    }

    #[test]
    fn ordering_keeps_prefix_ranges_contiguous() {
        let mut names = [n("/a/c"), n("/a/b/z"), n("/a"), n("/a/b"), n("/b"), n("/a/b/a")];
        names.sort();
        let p = n("/a/b");
        let idx: Vec<_> = names
            .iter()
            .enumerate()
            .filter(|(_, x)| p.is_prefix_of(x))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(idx, vec![1, 2, 3]);
    }

    #[test]
    fn overlong_component_rejected() {
        let long = "x".repeat(256);
        assert_eq!(
            format!("/{long}").parse::<Name>(),
            Err(NameError::ComponentTooLong(256))
        );
    }

    #[test]
    fn tlv_round_trip() {
        let name = n("/a/v=300/seg=70000/%00%FF");
        assert_eq!(Name::decode(&name.encode()).unwrap(), name);
        let mut bytes = name.encode();
        bytes.push(0);
        assert_eq!(Name::decode(&bytes), Err(TlvError::TrailingBytes(1)));
    }
}
