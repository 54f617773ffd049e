//! Naming convention for access-control packets.
//!
//! ```text
//! /<aa>/PUBPARAMS/<KP|CP>/v=<n>[/seg=<i>]
//! /<aa>/DKEY/<identity>/KEY/<key-id>/v=<n>/seg=<i>
//! /<producer>/CK/v=<n>/ENC-BY/<attributes or policy>/seg=<i>
//! ```
//!
//! Names without any of the three markers are not subject to the check.

use ndn_core::{Data, Name};
use thiserror::Error;

pub const PUBPARAMS: &str = "PUBPARAMS";
pub const DKEY: &str = "DKEY";
pub const CK: &str = "CK";
pub const ENC_BY: &str = "ENC-BY";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("naming violation at component {index}: {reason}")]
pub struct NamingViolation {
    /// Offending component; `name.len()` when a component is missing.
    pub index: usize,
    pub reason: &'static str,
}

fn violation(index: usize, reason: &'static str) -> Result<(), NamingViolation> {
    Err(NamingViolation { index, reason })
}

pub fn check_naming_convention(data: &Data) -> Result<(), NamingViolation> {
    check_name(&data.name)
}

pub fn check_name(name: &Name) -> Result<(), NamingViolation> {
    let comps = name.components();
    let Some(m) = comps.iter().position(|c| c.is(PUBPARAMS) || c.is(DKEY) || c.is(CK)) else {
        return Ok(());
    };
    if m == 0 {
        return violation(0, "missing authority or producer prefix");
    }
    let at = |i: usize| comps.get(i);
    if comps[m].is(PUBPARAMS) {
        match at(m + 1) {
            Some(c) if c.is("KP") || c.is("CP") => {}
            _ => return violation(m + 1, "expected abe type KP or CP"),
        }
        if at(m + 2).and_then(|c| c.as_version()).is_none() {
            return violation(m + 2, "expected version");
        }
        let mut end = m + 3;
        if at(end).and_then(|c| c.as_segment()).is_some() {
            end += 1;
        }
        if end < comps.len() {
            return violation(end, "unexpected trailing component");
        }
        Ok(())
    } else if comps[m].is(DKEY) {
        let Some(v) = comps.iter().skip(m + 1).position(|c| c.as_version().is_some()).map(|p| p + m + 1) else {
            return violation(comps.len(), "expected version");
        };
        // <identity>/KEY/<key-id> with a non-empty identity
        if v < m + 4 || !comps[v - 2].is(ndn_core::security::KEY_COMPONENT) {
            return violation(v, "expected consumer key name before version");
        }
        if at(v + 1).and_then(|c| c.as_segment()).is_none() {
            return violation(v + 1, "expected segment");
        }
        if v + 2 < comps.len() {
            return violation(v + 2, "unexpected trailing component");
        }
        Ok(())
    } else {
        if at(m + 1).and_then(|c| c.as_version()).is_none() {
            return violation(m + 1, "expected version");
        }
        if !at(m + 2).is_some_and(|c| c.is(ENC_BY)) {
            return violation(m + 2, "expected ENC-BY");
        }
        if !at(m + 3).is_some_and(|c| c.is_generic() && !c.value().is_empty()) {
            return violation(m + 3, "expected encryption attributes or policy");
        }
        if at(m + 4).and_then(|c| c.as_segment()).is_none() {
            return violation(m + 4, "expected segment");
        }
        if m + 5 < comps.len() {
            return violation(m + 5, "unexpected trailing component");
        }
        Ok(())
    }
}
