use abe_core::batch::{attribute_universe, random_policy};
use abe_core::scheme::{cp_keygen_extending, kp_keygen_extending};
use abe_core::{
    deserialize_ciphertext, deserialize_key, kp_encrypt, serialize_ciphertext, serialize_key, setup, AbeType,
    Attribute, AttributeSet, CompareOp, PolicyExpr,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_keys_round_trip() {
    let u = attribute_universe(12);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut kp, mut kmk) = setup(AbeType::Kp, &mut rng);
    let (mut cp, mut cmk) = setup(AbeType::Cp, &mut rng);
    for i in 0..200 {
        let key = if i % 2 == 0 {
            let p = random_policy(&mut rng, &u, 1 + i % 10);
            kp_keygen_extending(&mut kmk, &mut kp, &p, &mut rng).unwrap()
        } else {
            let attrs: AttributeSet = u.iter().filter(|_| rng.gen_bool(0.5)).cloned().chain([u[0].clone()]).collect();
            cp_keygen_extending(&mut cmk, &mut cp, &attrs, &mut rng).unwrap()
        };
        let bytes = serialize_key(&key);
        assert_eq!(deserialize_key(&bytes).unwrap(), key);
        assert_eq!(serialize_key(&deserialize_key(&bytes).unwrap()), bytes);
    }
}

/// `k` distinct equal-length leaves under one AND gate.
fn and_of(k: usize) -> PolicyExpr {
    let leaves = (0..k).map(|i| PolicyExpr::Leaf(Attribute::plain(format!("attr{i:04}")).unwrap())).collect();
    PolicyExpr::and(leaves)
}

#[test]
fn kp_key_size_is_affine_in_leaf_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let (mut pp, mut mk) = setup(AbeType::Kp, &mut rng);
    let sizes: Vec<usize> = (1..=64)
        .map(|k| serialize_key(&kp_keygen_extending(&mut mk, &mut pp, &and_of(k), &mut rng).unwrap()).len())
        .collect();
    // A leaf is a fixed-size element. Going from one leaf to a gate adds the
    // gate header once; beyond that every leaf adds the same bytes, except
    // where an enclosing length field crosses a var-number width boundary.
    let per_leaf = sizes[2] - sizes[1];
    for k in 2..64 {
        let d = sizes[k] - sizes[k - 1];
        assert!(d == per_leaf || d == per_leaf + 2, "k={} step {d} vs {per_leaf}", k + 1);
    }
    let boundary_steps = (2..64).filter(|&k| sizes[k] - sizes[k - 1] != per_leaf).count();
    assert!(boundary_steps <= 2);
}

#[test]
fn timestamp_comparisons_grow_key_size_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (mut pp, mut mk) = setup(AbeType::Kp, &mut rng);
    let mut prev = (0usize, 0usize);
    for c in 1..=5 {
        let xs: Vec<u32> = (0..c).map(|_| rng.gen()).collect();
        let leaves: usize = xs.iter().map(|x| x.count_zeros() as usize).sum();
        let policy = PolicyExpr::And(
            xs.iter()
                .enumerate()
                .map(|(i, x)| PolicyExpr::Compare { attr: format!("ts{i}"), op: CompareOp::Gt, value: *x })
                .collect(),
        );
        let key = kp_keygen_extending(&mut mk, &mut pp, &policy, &mut rng).unwrap();
        assert_eq!(key.size_hint(), leaves);
        let size = serialize_key(&key).len();
        assert!(size > prev.0 && leaves > prev.1);
        prev = (size, leaves);
    }
}

proptest! {
    #[test]
    fn ciphertexts_round_trip(mask in 1u32..(1 << 8), msg in prop::collection::vec(any::<u8>(), 0..200)) {
        let u = attribute_universe(8);
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from(mask));
        let (mut pp, mut mk) = setup(AbeType::Kp, &mut rng);
        mk.extend(&mut pp, u.iter(), &mut rng);
        let attrs: AttributeSet = u.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
        let ct = kp_encrypt(&pp, &attrs, &msg, &mut rng).unwrap();
        let bytes = serialize_ciphertext(&ct);
        prop_assert_eq!(deserialize_ciphertext(&bytes).unwrap(), ct);
    }

    #[test]
    fn garbage_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let _ = deserialize_key(&bytes);
        let _ = deserialize_ciphertext(&bytes);
        let _ = abe_core::deserialize_params(&bytes);
    }
}
