//! TLV encodings of keys, ciphertexts and public parameters.
//!
//! Fields appear in a fixed order. Trees are flattened in preorder: a gate
//! is followed by its children, a leaf carries its attribute and value.

use std::collections::BTreeMap;

use ndn_core::tlv::{self, Element, Reader};

use crate::attribute::Attribute;
use crate::error::AbeError;
use crate::field::Fe;
use crate::scheme::{AbeCiphertext, AbeKey, AbeType, CiphertextBody, KeyBody, ParamsId, PublicParams};
use crate::tree::AccessTree;

pub mod types {
    pub const ABE_KEY: u64 = 0x80;
    pub const ABE_CIPHERTEXT: u64 = 0x81;
    pub const PUBLIC_PARAMS: u64 = 0x82;
    pub const GATE: u64 = 0x83;
    pub const LEAF: u64 = 0x84;
    pub const ABE_TYPE: u64 = 0x85;
    pub const THRESHOLD: u64 = 0x86;
    pub const CHILD_COUNT: u64 = 0x87;
    pub const ATTRIBUTE: u64 = 0x88;
    pub const FIELD: u64 = 0x89;
    pub const PARAMS_ID: u64 = 0x8A;
    pub const TREE: u64 = 0x8B;
    pub const ATTRIBUTE_VALUES: u64 = 0x8C;
    pub const AEAD_NONCE: u64 = 0x8D;
    pub const AEAD_PAYLOAD: u64 = 0x8E;
    pub const VERSION: u64 = 0x8F;
}

fn abe_type_code(t: AbeType) -> u64 {
    match t {
        AbeType::Cp => 0,
        AbeType::Kp => 1,
    }
}

fn read_abe_type(r: &mut Reader<'_>) -> Result<AbeType, AbeError> {
    match r.expect(types::ABE_TYPE)?.as_nonneg()? {
        0 => Ok(AbeType::Cp),
        1 => Ok(AbeType::Kp),
        _ => Err(AbeError::Malformed("abe type".into())),
    }
}

fn read_params_id(r: &mut Reader<'_>) -> Result<ParamsId, AbeError> {
    r.expect(types::PARAMS_ID)?
        .value
        .try_into()
        .map_err(|_| AbeError::Malformed("params id length".into()))
}

fn write_leaf(out: &mut Vec<u8>, a: &Attribute, v: Fe) {
    let mut inner = Vec::new();
    tlv::write_tlv(&mut inner, types::ATTRIBUTE, a.as_str().as_bytes());
    tlv::write_tlv(&mut inner, types::FIELD, &v.to_be_bytes());
    tlv::write_tlv(out, types::LEAF, &inner);
}

fn read_leaf(el: &Element<'_>) -> Result<(Attribute, Fe), AbeError> {
    let mut r = el.reader();
    let name = std::str::from_utf8(r.expect(types::ATTRIBUTE)?.value)
        .map_err(|_| AbeError::Malformed("attribute is not UTF-8".into()))?;
    let a = Attribute::parse_any(name).map_err(|e| AbeError::Malformed(e.to_string()))?;
    let bytes: [u8; 8] = r
        .expect(types::FIELD)?
        .value
        .try_into()
        .map_err(|_| AbeError::Malformed("field element length".into()))?;
    let v = Fe::from_canonical(u64::from_be_bytes(bytes)).ok_or_else(|| AbeError::Malformed("field element range".into()))?;
    r.finish()?;
    Ok((a, v))
}

fn write_attr_values(out: &mut Vec<u8>, values: &BTreeMap<Attribute, Fe>) {
    let mut inner = Vec::new();
    for (a, v) in values {
        write_leaf(&mut inner, a, *v);
    }
    tlv::write_tlv(out, types::ATTRIBUTE_VALUES, &inner);
}

fn read_attr_values(el: Element<'_>) -> Result<BTreeMap<Attribute, Fe>, AbeError> {
    let mut r = el.reader();
    let mut out = BTreeMap::new();
    while !r.is_empty() {
        let (a, v) = read_leaf(&r.expect(types::LEAF)?)?;
        if out.insert(a, v).is_some() {
            return Err(AbeError::Malformed("duplicate attribute".into()));
        }
    }
    Ok(out)
}

fn write_tree(out: &mut Vec<u8>, tree: &AccessTree, values: &[Fe]) {
    let mut inner = Vec::new();
    let mut next = 0;
    write_node(&mut inner, tree, values, &mut next);
    tlv::write_tlv(out, types::TREE, &inner);
}

fn write_node(out: &mut Vec<u8>, node: &AccessTree, values: &[Fe], next: &mut usize) {
    match node {
        AccessTree::Leaf(a) => {
            write_leaf(out, a, values[*next]);
            *next += 1;
        }
        AccessTree::Gate { threshold, children } => {
            let mut inner = Vec::new();
            tlv::write_nonneg_tlv(&mut inner, types::THRESHOLD, *threshold as u64);
            tlv::write_nonneg_tlv(&mut inner, types::CHILD_COUNT, children.len() as u64);
            tlv::write_tlv(out, types::GATE, &inner);
            for c in children {
                write_node(out, c, values, next);
            }
        }
    }
}

fn read_tree(el: Element<'_>) -> Result<(AccessTree, Vec<Fe>), AbeError> {
    let mut r = el.reader();
    let mut values = Vec::new();
    let tree = read_node(&mut r, &mut values, 0)?;
    r.finish()?;
    Ok((tree, values))
}

const MAX_TREE_DEPTH: usize = 64;

fn read_node(r: &mut Reader<'_>, values: &mut Vec<Fe>, depth: usize) -> Result<AccessTree, AbeError> {
    if depth > MAX_TREE_DEPTH {
        return Err(AbeError::Malformed("tree too deep".into()));
    }
    let el = r.read()?;
    match el.typ {
        types::LEAF => {
            let (a, v) = read_leaf(&el)?;
            values.push(v);
            Ok(AccessTree::Leaf(a))
        }
        types::GATE => {
            let mut g = el.reader();
            let threshold = g.expect(types::THRESHOLD)?.as_nonneg()?;
            let count = g.expect(types::CHILD_COUNT)?.as_nonneg()?;
            g.finish()?;
            if count > r.remaining().len() as u64 {
                return Err(AbeError::Malformed("child count exceeds input".into()));
            }
            let children = (0..count)
                .map(|_| read_node(r, values, depth + 1))
                .collect::<Result<Vec<_>, _>>()?;
            AccessTree::gate(threshold as usize, children)
        }
        other => Err(AbeError::Malformed(format!("unexpected tree element {other:#x}"))),
    }
}

fn outer(bytes: &[u8], typ: u64) -> Result<Reader<'_>, AbeError> {
    let mut r = Reader::new(bytes);
    let el = r.expect(typ)?;
    r.finish()?;
    Ok(el.reader())
}

pub fn serialize_key(key: &AbeKey) -> Vec<u8> {
    let mut inner = Vec::new();
    tlv::write_nonneg_tlv(&mut inner, types::ABE_TYPE, abe_type_code(key.abe_type));
    tlv::write_tlv(&mut inner, types::PARAMS_ID, &key.params_id);
    match &key.body {
        KeyBody::Kp { tree, leaf_values } => write_tree(&mut inner, tree, leaf_values),
        KeyBody::Cp { attrs } => write_attr_values(&mut inner, attrs),
    }
    let mut out = Vec::with_capacity(inner.len() + 4);
    tlv::write_tlv(&mut out, types::ABE_KEY, &inner);
    out
}

pub fn deserialize_key(bytes: &[u8]) -> Result<AbeKey, AbeError> {
    let mut r = outer(bytes, types::ABE_KEY)?;
    let abe_type = read_abe_type(&mut r)?;
    let params_id = read_params_id(&mut r)?;
    let body = match abe_type {
        AbeType::Kp => {
            let (tree, leaf_values) = read_tree(r.expect(types::TREE)?)?;
            KeyBody::Kp { tree, leaf_values }
        }
        AbeType::Cp => KeyBody::Cp {
            attrs: read_attr_values(r.expect(types::ATTRIBUTE_VALUES)?)?,
        },
    };
    r.finish()?;
    Ok(AbeKey { abe_type, params_id, body })
}

pub fn serialize_ciphertext(ct: &AbeCiphertext) -> Vec<u8> {
    let mut inner = Vec::new();
    tlv::write_nonneg_tlv(&mut inner, types::ABE_TYPE, abe_type_code(ct.abe_type));
    tlv::write_tlv(&mut inner, types::PARAMS_ID, &ct.params_id);
    match &ct.body {
        CiphertextBody::Kp { attrs } => write_attr_values(&mut inner, attrs),
        CiphertextBody::Cp { tree, leaf_values } => write_tree(&mut inner, tree, leaf_values),
    }
    tlv::write_tlv(&mut inner, types::AEAD_NONCE, &ct.nonce);
    tlv::write_tlv(&mut inner, types::AEAD_PAYLOAD, &ct.payload);
    let mut out = Vec::with_capacity(inner.len() + 4);
    tlv::write_tlv(&mut out, types::ABE_CIPHERTEXT, &inner);
    out
}

pub fn deserialize_ciphertext(bytes: &[u8]) -> Result<AbeCiphertext, AbeError> {
    let mut r = outer(bytes, types::ABE_CIPHERTEXT)?;
    let abe_type = read_abe_type(&mut r)?;
    let params_id = read_params_id(&mut r)?;
    let body = match abe_type {
        AbeType::Kp => CiphertextBody::Kp {
            attrs: read_attr_values(r.expect(types::ATTRIBUTE_VALUES)?)?,
        },
        AbeType::Cp => {
            let (tree, leaf_values) = read_tree(r.expect(types::TREE)?)?;
            CiphertextBody::Cp { tree, leaf_values }
        }
    };
    let nonce = r
        .expect(types::AEAD_NONCE)?
        .value
        .try_into()
        .map_err(|_| AbeError::Malformed("nonce length".into()))?;
    let payload = r.expect(types::AEAD_PAYLOAD)?.value.to_vec();
    r.finish()?;
    Ok(AbeCiphertext { abe_type, params_id, body, nonce, payload })
}

pub fn serialize_params(params: &PublicParams) -> Vec<u8> {
    let mut inner = Vec::new();
    tlv::write_nonneg_tlv(&mut inner, types::ABE_TYPE, abe_type_code(params.abe_type));
    tlv::write_tlv(&mut inner, types::PARAMS_ID, &params.params_id);
    tlv::write_nonneg_tlv(&mut inner, types::VERSION, params.version);
    write_attr_values(&mut inner, &params.attr_public);
    let mut out = Vec::with_capacity(inner.len() + 4);
    tlv::write_tlv(&mut out, types::PUBLIC_PARAMS, &inner);
    out
}

pub fn deserialize_params(bytes: &[u8]) -> Result<PublicParams, AbeError> {
    let mut r = outer(bytes, types::PUBLIC_PARAMS)?;
    let abe_type = read_abe_type(&mut r)?;
    let params_id = read_params_id(&mut r)?;
    let version = r.expect(types::VERSION)?.as_nonneg()?;
    let attr_public = read_attr_values(r.expect(types::ATTRIBUTE_VALUES)?)?;
    r.finish()?;
    Ok(PublicParams { abe_type, params_id, attr_public, version })
}
