//! Names published by the three roles.
//!
//! ```text
//! /<aa>/PUBPARAMS/<KP|CP>/v=<n>/seg=<i>
//! /<aa>/DKEY/<consumer key name>/v=<n>/seg=<i>
//! /<producer>/CK/v=<n>/ENC-BY/<canonical attributes or policy>/seg=<i>
//! ```

use abe_core::AbeType;
use ndn_core::name::MAX_COMPONENT_LEN;
use ndn_core::security::hex;
use ndn_core::{Component, Name};
use sha2::{Digest, Sha256};

pub use trust_schema::naming::{CK, DKEY, ENC_BY, PUBPARAMS};

pub const FRESHNESS_PUBPARAMS_MS: u64 = 10_000;
pub const FRESHNESS_DKEY_MS: u64 = 10_000;
pub const FRESHNESS_CK_MS: u64 = 3_600_000;
pub const FRESHNESS_APP_DATA_MS: u64 = 3_600_000;

/// Prefix used for latest-version discovery of public parameters.
pub fn pubparams_prefix(aa: &Name, abe_type: AbeType) -> Name {
    aa.child_str(PUBPARAMS).child_str(abe_type.as_str())
}

pub fn pubparams_name(aa: &Name, abe_type: AbeType, version: u64) -> Name {
    pubparams_prefix(aa, abe_type).child(Component::version(version))
}

pub fn dkey_prefix(aa: &Name, consumer_key: &Name) -> Name {
    aa.child_str(DKEY).join(consumer_key)
}

pub fn dkey_name(aa: &Name, consumer_key: &Name, version: u64) -> Name {
    dkey_prefix(aa, consumer_key).child(Component::version(version))
}

/// The ENC-BY component. Text longer than a component can hold is replaced
/// by its SHA-256 digest.
pub fn enc_by_component(canonical: &str) -> Component {
    if canonical.len() <= MAX_COMPONENT_LEN {
        Component::generic(canonical.as_bytes())
    } else {
        Component::generic(format!("sha256={}", hex(&Sha256::digest(canonical.as_bytes()))).into_bytes())
    }
}

/// CK object name without the segment component.
pub fn ck_name(producer: &Name, version: u64, canonical: &str) -> Name {
    producer
        .child_str(CK)
        .child(Component::version(version))
        .child_str(ENC_BY)
        .child(enc_by_component(canonical))
}

/// Splits a segmented packet name into the object name and segment number.
pub fn split_segment(name: &Name) -> Option<(Name, u64)> {
    let seg = name.last()?.as_segment()?;
    Some((name.prefix(name.len() - 1), seg))
}

/// The object name through its version component, if there is one.
pub fn through_version(name: &Name) -> Option<Name> {
    name.version_index().map(|i| name.prefix(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use trust_schema::check_name;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn names_follow_the_convention() {
        let aa = n("/org/mhealth/aa/main");
        let key = n("/org/mhealth/consumer/bob/KEY/0a1b");
        let pp = pubparams_name(&aa, AbeType::Kp, 1).child(Component::segment(0));
        assert_eq!(pp.to_string(), "/org/mhealth/aa/main/PUBPARAMS/KP/v=1/seg=0");
        let dk = dkey_name(&aa, &key, 2).child(Component::segment(0));
        assert_eq!(dk.to_string(), "/org/mhealth/aa/main/DKEY/org/mhealth/consumer/bob/KEY/0a1b/v=2/seg=0");
        let ck = ck_name(&n("/org/mhealth/diabetes/id123"), 3, "\"home\"").child(Component::segment(0));
        for name in [pp, dk, ck] {
            assert_eq!(check_name(&name), Ok(()), "{name}");
        }
    }

    #[test]
    fn long_enc_by_is_digested() {
        let long = "x".repeat(300);
        let c = enc_by_component(&long);
        assert!(c.value().len() <= MAX_COMPONENT_LEN);
        assert!(c.value().starts_with(b"sha256="));
        assert_ne!(c, enc_by_component(&"x".repeat(301)));
    }

    #[test]
    fn version_split() {
        let name = n("/a/CK/v=3/ENC-BY/x/seg=4");
        let (obj, seg) = split_segment(&name).unwrap();
        assert_eq!(seg, 4);
        assert_eq!(obj, n("/a/CK/v=3/ENC-BY/x"));
        assert_eq!(through_version(&name), Some(n("/a/CK/v=3")));
    }
}
