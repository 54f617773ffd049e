use abe_core::batch::{attribute_universe, evaluate_par, evaluate_seq, random_attrs, random_policy, Case, Universe};
use abe_core::AbeType;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cases(n: usize) -> (Universe, Vec<Case>) {
    let attrs = attribute_universe(12);
    let u = Universe::new(attrs.iter(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases = (0..n)
        .map(|i| {
            let mut a = random_attrs(&mut rng, &attrs, 0.5);
            a.insert(attrs[i % attrs.len()].clone());
            Case {
                abe_type: if i % 2 == 0 { AbeType::Kp } else { AbeType::Cp },
                policy: random_policy(&mut rng, &attrs, 5 + i % 6),
                attrs: a,
            }
        })
        .collect();
    (u, cases)
}

fn oracle_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_batch");
    for n in [256usize, 2048] {
        let (u, cs) = cases(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &cs, |b, cs| b.iter(|| evaluate_seq(&u, cs, 9)));
        group.bench_with_input(BenchmarkId::new("rayon", n), &cs, |b, cs| b.iter(|| evaluate_par(&u, cs, 9)));
    }
    group.finish();
}

criterion_group!(benches, oracle_batch);
criterion_main!(benches);
