use ndn_core::{Component, ContentType, Data, Name};
use rand::{CryptoRng, RngCore};

use crate::error::NacError;
use crate::identity::Identity;

pub const DEFAULT_MSS: usize = 1500;
pub const MIN_MSS: usize = 64;

/// A published object: independently signed segments named
/// `<name>/seg=<i>`, each carrying FinalBlockId `seg=<n-1>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedObject {
    pub name: Name,
    pub segments: Vec<Data>,
}

impl SegmentedObject {
    pub fn bytes(&self) -> Vec<u8> {
        self.segments.iter().flat_map(|d| d.content.iter().copied()).collect()
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(|d| d.content.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

pub fn segment_count(len: usize, mss: usize) -> usize {
    len.div_ceil(mss)
}

pub struct SegmentSpec<'a> {
    pub name: &'a Name,
    pub mss: usize,
    pub freshness_ms: u64,
    pub content_type: ContentType,
}

pub fn publish_segments<R: RngCore + CryptoRng>(
    spec: SegmentSpec<'_>,
    bytes: &[u8],
    signer: &Identity,
    rng: &mut R,
) -> Result<SegmentedObject, NacError> {
    if spec.mss < MIN_MSS {
        return Err(NacError::malformed("segment size", format!("{} is below {MIN_MSS}", spec.mss)));
    }
    if bytes.is_empty() {
        return Err(NacError::malformed("segmented object", "no bytes"));
    }
    let chunks: Vec<&[u8]> = bytes.chunks(spec.mss).collect();
    let last = Component::segment(chunks.len() as u64 - 1);
    let segments = chunks
        .into_iter()
        .enumerate()
        .map(|(i, chunk)| {
            let data = Data::new(spec.name.child(Component::segment(i as u64)), chunk.to_vec())
                .with_freshness(spec.freshness_ms)
                .with_content_type(spec.content_type)
                .with_final_block_id(last.clone());
            signer.sign(data, rng)
        })
        .collect();
    Ok(SegmentedObject {
        name: spec.name.clone(),
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_and_final_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = Identity::anchor("/p".parse().unwrap(), &mut rng);
        let name: Name = "/p/obj/v=1".parse().unwrap();
        let bytes: Vec<u8> = (0..4000u32).map(|i| i as u8).collect();
        let spec = SegmentSpec {
            name: &name,
            mss: 1500,
            freshness_ms: 1000,
            content_type: ContentType::Blob,
        };
        let obj = publish_segments(spec, &bytes, &id, &mut rng).unwrap();
        let sizes: Vec<usize> = obj.segments.iter().map(|d| d.content.len()).collect();
        assert_eq!(sizes, [1500, 1500, 1000]);
        assert!(obj.segments.iter().all(|d| d.final_block_id == Some(Component::segment(2))));
        assert!(obj.segments.iter().all(|d| id.cert().verify(d)));
        assert_eq!(obj.bytes(), bytes);
        assert_eq!(obj.segments[1].name.to_string(), "/p/obj/v=1/seg=1");
    }

    #[test]
    fn rejects_tiny_mss_and_empty_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let id = Identity::anchor("/p".parse().unwrap(), &mut rng);
        let name: Name = "/p/v=1".parse().unwrap();
        let spec = |mss| SegmentSpec {
            name: &name,
            mss,
            freshness_ms: 0,
            content_type: ContentType::Blob,
        };
        assert!(publish_segments(spec(63), b"x", &id, &mut rng).is_err());
        assert!(publish_segments(spec(64), b"", &id, &mut rng).is_err());
        assert_eq!(publish_segments(spec(64), &[1; 64], &id, &mut rng).unwrap().segment_count(), 1);
    }
}
