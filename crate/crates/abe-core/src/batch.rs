//! Bulk decryptability checks against the satisfaction oracle.
//!
//! Each case draws its randomness from a generator seeded by
//! `(seed, index)`, so sequential and parallel evaluation give identical
//! results.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attribute::{data_attributes_for, Attribute, AttributeSet};
use crate::error::AbeError;
use crate::policy::{expand_comparison, CompareOp, PolicyExpr};
use crate::scheme::{self, AbeType, MasterKey, PublicParams};
use crate::tree::{build_access_tree, satisfies};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub abe_type: AbeType,
    pub policy: PolicyExpr,
    pub attrs: AttributeSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub satisfied: bool,
    pub decrypted: bool,
}

impl Outcome {
    pub fn agrees(self) -> bool {
        self.satisfied == self.decrypted
    }
}

/// Parameters for both modes with a fixed attribute universe registered.
pub struct Universe {
    kp: (PublicParams, MasterKey),
    cp: (PublicParams, MasterKey),
}

impl Universe {
    pub fn new<'a>(attrs: impl IntoIterator<Item = &'a Attribute> + Clone, seed: u64) -> Universe {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut kp_pp, mut kp_mk) = scheme::setup(AbeType::Kp, &mut rng);
        let (mut cp_pp, mut cp_mk) = scheme::setup(AbeType::Cp, &mut rng);
        kp_mk.extend(&mut kp_pp, attrs.clone(), &mut rng);
        cp_mk.extend(&mut cp_pp, attrs, &mut rng);
        Universe {
            kp: (kp_pp, kp_mk),
            cp: (cp_pp, cp_mk),
        }
    }

    pub fn params(&self, t: AbeType) -> &PublicParams {
        match t {
            AbeType::Kp => &self.kp.0,
            AbeType::Cp => &self.cp.0,
        }
    }

    pub fn master(&self, t: AbeType) -> &MasterKey {
        match t {
            AbeType::Kp => &self.kp.1,
            AbeType::Cp => &self.cp.1,
        }
    }
}

fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs key generation, encryption and decryption for one case and
/// compares the result with the tree-satisfaction oracle.
pub fn evaluate_one(u: &Universe, case: &Case, seed: u64, index: u64) -> Result<Outcome, AbeError> {
    let mut rng = item_rng(seed, index);
    let satisfied = match build_access_tree(&case.policy) {
        Ok(tree) => satisfies(&tree, &case.attrs),
        Err(AbeError::AlwaysFalse) => false,
        Err(e) => return Err(e),
    };
    let plaintext = index.to_be_bytes();
    let params = u.params(case.abe_type);
    let master = u.master(case.abe_type);
    let material = match case.abe_type {
        AbeType::Kp => scheme::kp_keygen(master, &case.policy, &mut rng)
            .and_then(|k| Ok((k, scheme::kp_encrypt(params, &case.attrs, &plaintext, &mut rng)?))),
        AbeType::Cp => scheme::cp_keygen(master, &case.attrs)
            .and_then(|k| Ok((k, scheme::cp_encrypt(params, &case.policy, &plaintext, &mut rng)?))),
    };
    let (key, ct) = match material {
        Ok(m) => m,
        // No key or ciphertext can exist, so nothing decrypts.
        Err(AbeError::AlwaysFalse | AbeError::EmptyAttributes) => return Ok(Outcome { satisfied, decrypted: false }),
        Err(e) => return Err(e),
    };
    let decrypted = match scheme::decrypt(params, &key, &ct) {
        Ok(m) => m == plaintext,
        Err(AbeError::PolicyNotSatisfied) => false,
        Err(e) => return Err(e),
    };
    Ok(Outcome { satisfied, decrypted })
}

pub fn evaluate_seq(u: &Universe, cases: &[Case], seed: u64) -> Vec<Result<Outcome, AbeError>> {
    cases
        .iter()
        .enumerate()
        .map(|(i, c)| evaluate_one(u, c, seed, i as u64))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn evaluate_par(u: &Universe, cases: &[Case], seed: u64) -> Vec<Result<Outcome, AbeError>> {
    use rayon::prelude::*;
    cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| evaluate_one(u, c, seed, i as u64))
        .collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn evaluate(u: &Universe, cases: &[Case], seed: u64) -> Vec<Result<Outcome, AbeError>> {
    #[cfg(feature = "parallel")]
    {
        evaluate_par(u, cases, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        evaluate_seq(u, cases, seed)
    }
}

/// Tally of a comparison sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub checks: u64,
    pub mismatches: u64,
}

/// Checks `(v op x) <=> decryptable` for every operator and every `v`, `x`
/// below `2^width`, with real key generation, encryption and decryption.
pub fn comparison_sweep(abe_type: AbeType, width: u32, seed: u64) -> Result<SweepReport, AbeError> {
    let name = "x";
    let n = 1u64 << width;
    let data: Vec<AttributeSet> = (0..n)
        .map(|v| data_attributes_for(name, v, width))
        .collect::<Result<_, _>>()?;
    let universe: Vec<Attribute> = data.iter().flat_map(|s| s.iter().cloned()).collect::<HashSet<_>>().into_iter().collect();
    let u = Universe::new(universe.iter(), seed);
    let params = u.params(abe_type);
    let master = u.master(abe_type);
    let mut rng = item_rng(seed, u64::MAX);

    // Material that depends on the data value alone.
    let per_value: Vec<_> = match abe_type {
        AbeType::Kp => data
            .iter()
            .map(|a| scheme::kp_encrypt(params, a, b"m", &mut rng).map(Side::Ct))
            .collect::<Result<_, _>>()?,
        AbeType::Cp => data
            .iter()
            .map(|a| scheme::cp_keygen(master, a).map(Side::Key))
            .collect::<Result<_, _>>()?,
    };

    let tally_x = |op: CompareOp, x: u64| -> Result<SweepReport, AbeError> {
        let mut rng = item_rng(seed, (x << 3) | op as u64);
        let policy = expand_comparison(name, op, x, width)?;
        let other = match abe_type {
            AbeType::Kp => scheme::kp_keygen(master, &policy, &mut rng).map(Side::Key),
            AbeType::Cp => scheme::cp_encrypt(params, &policy, b"m", &mut rng).map(Side::Ct),
        };
        let other = match other {
            Ok(o) => Some(o),
            Err(AbeError::AlwaysFalse) => None,
            Err(e) => return Err(e),
        };
        let mut r = SweepReport::default();
        for (v, side) in per_value.iter().enumerate() {
            let ok = match (&other, side) {
                (None, _) => false,
                (Some(Side::Key(k)), Side::Ct(c)) | (Some(Side::Ct(c)), Side::Key(k)) => {
                    scheme::decrypt(params, k, c).is_ok_and(|m| m == b"m")
                }
                _ => unreachable!("sides are complementary"),
            };
            r.checks += 1;
            if ok != op.holds(v as u64, x) {
                r.mismatches += 1;
            }
        }
        Ok(r)
    };

    let jobs: Vec<(CompareOp, u64)> = CompareOp::ALL.iter().flat_map(|&op| (0..n).map(move |x| (op, x))).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<_> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|&(op, x)| tally_x(op, x)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<_> = jobs.iter().map(|&(op, x)| tally_x(op, x)).collect();

    let mut total = SweepReport::default();
    for p in parts {
        let p = p?;
        total.checks += p.checks;
        total.mismatches += p.mismatches;
    }
    Ok(total)
}

enum Side {
    Key(scheme::AbeKey),
    Ct(scheme::AbeCiphertext),
}

/// Plain attributes `a0`, `a1`, ...
pub fn attribute_universe(n: usize) -> Vec<Attribute> {
    (0..n).map(|i| Attribute::plain(format!("a{i}")).expect("valid")).collect()
}

/// Every distinct simplified AND/OR policy with at most `max_leaves` leaves
/// drawn from `universe`.
pub fn enumerate_policies(universe: &[Attribute], max_leaves: usize) -> Vec<PolicyExpr> {
    let mut by_size: Vec<Vec<PolicyExpr>> = vec![Vec::new(); max_leaves + 1];
    if max_leaves >= 1 {
        by_size[1] = universe.iter().cloned().map(PolicyExpr::Leaf).collect();
    }
    for n in 2..=max_leaves {
        let mut built = Vec::new();
        for k in 1..n {
            for l in &by_size[k] {
                for r in &by_size[n - k] {
                    built.push(PolicyExpr::And(vec![l.clone(), r.clone()]));
                    built.push(PolicyExpr::Or(vec![l.clone(), r.clone()]));
                }
            }
        }
        by_size[n] = built;
    }
    let mut seen = HashSet::new();
    by_size
        .into_iter()
        .flatten()
        .map(PolicyExpr::simplify)
        .filter(|p| seen.insert(p.clone()))
        .collect()
}

/// Every subset of `universe`.
pub fn all_subsets(universe: &[Attribute]) -> Vec<AttributeSet> {
    (0u32..1 << universe.len())
        .map(|mask| {
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

/// Random AND/OR policy with exactly `leaves` leaf slots (before
/// simplification), drawn from `universe`.
pub fn random_policy<R: Rng + ?Sized>(rng: &mut R, universe: &[Attribute], leaves: usize) -> PolicyExpr {
    fn build<R: Rng + ?Sized>(rng: &mut R, universe: &[Attribute], leaves: usize) -> PolicyExpr {
        if leaves == 1 {
            return PolicyExpr::Leaf(universe.choose(rng).expect("non-empty universe").clone());
        }
        let parts = rng.gen_range(2..=leaves.min(4));
        let mut sizes = vec![1; parts];
        for _ in parts..leaves {
            sizes[rng.gen_range(0..parts)] += 1;
        }
        let children = sizes.into_iter().map(|s| build(rng, universe, s)).collect();
        if rng.gen_bool(0.5) {
            PolicyExpr::And(children)
        } else {
            PolicyExpr::Or(children)
        }
    }
    build(rng, universe, leaves).simplify()
}

/// Random subset where each attribute is kept with probability `p`.
pub fn random_attrs<R: Rng + ?Sized>(rng: &mut R, universe: &[Attribute], p: f64) -> AttributeSet {
    universe.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        let u = attribute_universe(2);
        let ps = enumerate_policies(&u, 2);
        // a0, a1, a0 AND a1, a0 OR a1, and the reversed-order gates.
        assert_eq!(ps.len(), 6);
    }

    #[test]
    fn small_sweep_is_exact() {
        for t in [AbeType::Kp, AbeType::Cp] {
            let r = comparison_sweep(t, 3, 1).unwrap();
            assert_eq!(r, SweepReport { checks: 5 * 8 * 8, mismatches: 0 });
        }
    }

    #[test]
    fn seq_matches_par_shape() {
        let u_attrs = attribute_universe(5);
        let u = Universe::new(u_attrs.iter(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cases: Vec<Case> = (0..40)
            .map(|i| Case {
                abe_type: if i % 2 == 0 { AbeType::Kp } else { AbeType::Cp },
                policy: random_policy(&mut rng, &u_attrs, 4),
                attrs: {
                    let mut a = random_attrs(&mut rng, &u_attrs, 0.5);
                    a.insert(u_attrs[0].clone());
                    a
                },
            })
            .collect();
        let seq = evaluate_seq(&u, &cases, 7);
        assert!(seq.iter().all(|o| o.as_ref().unwrap().agrees()));
        assert_eq!(evaluate(&u, &cases, 7), seq);
    }
}
