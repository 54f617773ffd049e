mod common;

use abe_core::batch::{attribute_universe, random_attrs, random_policy};
use abe_core::{build_access_tree, satisfies, AbeType};
use common::*;
use nac_abe::{Grant, NacError, Tag};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Consumption succeeds exactly when the grant and the tag satisfy each other.
    #[test]
    fn consume_iff_satisfied(seed in any::<u64>(), leaves in 1usize..5, cp in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let universe = attribute_universe(4);
        let policy = random_policy(&mut rng, &universe, leaves);
        let mut attrs = random_attrs(&mut rng, &universe, 0.5);
        if attrs.is_empty() {
            attrs.insert(universe[0].clone());
        }
        let abe_type = if cp { AbeType::Cp } else { AbeType::Kp };
        let mut net = Net::new(seed, NetOptions { abe_type, ..NetOptions::default() });
        net.aa.register_attributes(universe.iter()).unwrap();
        let (grant, tag) = match abe_type {
            AbeType::Kp => (Grant::Policy(policy.clone()), Tag::Attributes(attrs.clone())),
            AbeType::Cp => (Grant::Attributes(attrs.clone()), Tag::Policy(policy.clone())),
        };
        let mut consumer = net.consumer("c", grant);
        let name = net.produce(&format!("{BG}/v=1"), b"payload", &tag);
        let expected = satisfies(&build_access_tree(&policy).unwrap(), &attrs);
        match consumer.consume(&mut net.sim, &name) {
            Ok(p) => { prop_assert!(expected); prop_assert_eq!(p, b"payload".to_vec()); }
            Err(NacError::PolicyNotSatisfied) => prop_assert!(!expected),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
