//! Attributes and attribute sets, including the bit-prefix attributes that
//! integer comparisons expand into.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::AbeError;

pub const PFX_MARKER: &str = ":pfx:";
pub const RESERVED_PREFIX: &str = "__";
pub const MAX_BIT_WIDTH: u32 = 32;

const ALWAYS: &str = "__always__";
const MASTER: &str = "__master__";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Plain,
    BitPrefix,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute(String);

impl Attribute {
    /// A descriptive attribute. Must be non-empty, must not carry the
    /// bit-prefix marker and must not use the reserved `__` prefix.
    pub fn plain(s: impl Into<String>) -> Result<Attribute, AbeError> {
        let s = s.into();
        check_plain(&s)?;
        Ok(Attribute(s))
    }

    /// `<name>:pfx:<bits>` with 1 to 32 bits.
    pub fn bit_prefix(name: &str, bits: &str) -> Result<Attribute, AbeError> {
        check_plain(name)?;
        check_bits(bits).map_err(|why| AbeError::InvalidAttribute(bits.to_owned(), why))?;
        Ok(Attribute(format!("{name}{PFX_MARKER}{bits}")))
    }

    /// Accepts either attribute form; rejects reserved names.
    pub fn parse(s: &str) -> Result<Attribute, AbeError> {
        match s.split_once(PFX_MARKER) {
            Some((name, bits)) => Attribute::bit_prefix(name, bits),
            None => Attribute::plain(s),
        }
    }

    /// Like [`Attribute::parse`], but also admits the reserved attributes.
    /// Used when decoding serialized key material.
    pub fn parse_any(s: &str) -> Result<Attribute, AbeError> {
        if s == ALWAYS || s == MASTER {
            return Ok(Attribute(s.to_owned()));
        }
        Attribute::parse(s)
    }

    /// Reserved attribute present in every encryption (KP) and every key
    /// (CP); the compiled form of an always-true policy.
    pub fn always() -> Attribute {
        Attribute(ALWAYS.to_owned())
    }

    /// Reserved slot in the public parameters that carries the master value.
    pub fn master() -> Attribute {
        Attribute(MASTER.to_owned())
    }

    pub fn is_always(&self) -> bool {
        self.0 == ALWAYS
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> AttributeKind {
        if self.0.contains(PFX_MARKER) {
            AttributeKind::BitPrefix
        } else {
            AttributeKind::Plain
        }
    }

    /// `(name, bits)` for a bit-prefix attribute.
    pub fn split_bit_prefix(&self) -> Option<(&str, &str)> {
        self.0.split_once(PFX_MARKER)
    }
}

fn check_plain(s: &str) -> Result<(), AbeError> {
    let bad = |why| Err(AbeError::InvalidAttribute(s.to_owned(), why));
    if s.is_empty() {
        return bad("empty");
    }
    if s.contains(PFX_MARKER) {
        return bad("contains the bit-prefix marker");
    }
    if s.starts_with(RESERVED_PREFIX) {
        return bad("uses the reserved prefix");
    }
    Ok(())
}

fn check_bits(bits: &str) -> Result<(), &'static str> {
    if bits.is_empty() || bits.len() > MAX_BIT_WIDTH as usize {
        return Err("bit string length must be 1..=32");
    }
    if !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err("bit string must contain only 0 and 1");
    }
    Ok(())
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Big-endian bit string of `value` over `width` bits.
pub fn bits_of(value: u64, width: u32) -> String {
    (0..width)
        .rev()
        .map(|i| if value >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AttributeSet(BTreeSet<Attribute>);

impl AttributeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses plain attribute strings.
    pub fn from_strs<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Self, AbeError> {
        items.into_iter().map(Attribute::parse).collect()
    }

    pub fn insert(&mut self, a: Attribute) -> bool {
        self.0.insert(a)
    }

    pub fn contains(&self, a: &Attribute) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Attribute> {
        self.0.iter()
    }

    pub fn union(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet(self.0.union(&other.0).cloned().collect())
    }

    /// Deterministic text form used in names and as a cache key: quoted
    /// attributes, sorted, comma-separated. A complete bit-prefix chain for
    /// one name is condensed to `"name" = value` (32 bits) or
    /// `"name" = value/width`.
    pub fn canonical_text(&self) -> String {
        let mut chains: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut items = Vec::new();
        for a in &self.0 {
            match a.split_bit_prefix() {
                Some((name, bits)) => chains.entry(name).or_default().push(bits),
                None => items.push(quote(a.as_str())),
            }
        }
        for (name, mut prefixes) in chains {
            prefixes.sort_by_key(|b| b.len());
            let longest = prefixes[prefixes.len() - 1];
            let complete = prefixes.len() == longest.len()
                && prefixes
                    .iter()
                    .enumerate()
                    .all(|(i, b)| b.len() == i + 1 && longest.starts_with(b));
            if complete {
                let value = u64::from_str_radix(longest, 2).expect("validated bit string");
                let width = longest.len();
                if width == MAX_BIT_WIDTH as usize {
                    items.push(format!("{} = {value}", quote(name)));
                } else {
                    items.push(format!("{} = {value}/{width}", quote(name)));
                }
            } else {
                items.extend(prefixes.iter().map(|b| quote(&format!("{name}{PFX_MARKER}{b}"))));
            }
        }
        items.sort();
        items.join(", ")
    }
}

impl FromIterator<Attribute> for AttributeSet {
    fn from_iter<I: IntoIterator<Item = Attribute>>(iter: I) -> Self {
        AttributeSet(iter.into_iter().collect())
    }
}

impl Extend<Attribute> for AttributeSet {
    fn extend<I: IntoIterator<Item = Attribute>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = &'a Attribute;
    type IntoIter = std::collections::btree_set::Iter<'a, Attribute>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The data-side attributes describing `value`: one bit-prefix attribute per
/// prefix length `1..=width` of its big-endian bit string.
pub fn data_attributes_for(name: &str, value: u64, width: u32) -> Result<AttributeSet, AbeError> {
    check_width(value, width)?;
    let bits = bits_of(value, width);
    (1..=width as usize)
        .map(|i| Attribute::bit_prefix(name, &bits[..i]))
        .collect()
}

pub(crate) fn check_width(value: u64, width: u32) -> Result<(), AbeError> {
    if width == 0 || width > MAX_BIT_WIDTH || value >> width != 0 {
        return Err(AbeError::ValueOutOfRange { value, width });
    }
    Ok(())
}
