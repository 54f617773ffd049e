use abe_core::batch::{comparison_sweep, SweepReport};
use abe_core::{build_access_tree, data_attributes_for, expand_comparison, satisfies, AbeType, CompareOp, PolicyExpr};
use proptest::prelude::*;

fn sat(p: &PolicyExpr, v: u64, w: u32) -> bool {
    match build_access_tree(p) {
        Ok(t) => satisfies(&t, &data_attributes_for("a", v, w).unwrap()),
        Err(_) => false,
    }
}

#[test]
fn exhaustive_width_six_satisfaction() {
    let w = 6;
    for op in CompareOp::ALL {
        for x in 0..64 {
            let p = expand_comparison("a", op, x, w).unwrap();
            for v in 0..64 {
                assert_eq!(sat(&p, v, w), op.holds(v, x), "{v} {} {x}", op.symbol());
            }
        }
    }
}

#[test]
fn exhaustive_decryptability_up_to_width_five() {
    for w in 1..=5 {
        for t in [AbeType::Kp, AbeType::Cp] {
            let n = 1u64 << w;
            assert_eq!(
                comparison_sweep(t, w, u64::from(w)).unwrap(),
                SweepReport { checks: 5 * n * n, mismatches: 0 }
            );
        }
    }
}

proptest! {
    #[test]
    fn gt_leaf_count_is_zero_bit_count(x: u32) {
        let p = expand_comparison("ts", CompareOp::Gt, u64::from(x), 32).unwrap();
        let zeros = x.count_zeros() as usize;
        match p {
            PolicyExpr::False => prop_assert_eq!(zeros, 0),
            other => prop_assert_eq!(other.leaf_count(), zeros),
        }
    }

    #[test]
    fn comparison_semantics_at_full_width(x: u32, v: u32, op_i in 0usize..5) {
        let op = CompareOp::ALL[op_i];
        let p = expand_comparison("ts", op, u64::from(x), 32).unwrap();
        let got = match build_access_tree(&p) {
            Ok(t) => satisfies(&t, &data_attributes_for("ts", u64::from(v), 32).unwrap()),
            Err(_) => false,
        };
        prop_assert_eq!(got, op.holds(u64::from(v), u64::from(x)));
    }
}
