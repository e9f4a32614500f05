use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use entropy_axioms::engine::{check_with, Execution};
use entropy_axioms::{AxiomId, CheckConfig, EntropySpec, Family};

fn trial_throughput(c: &mut Criterion) {
    let cfg = CheckConfig {
        trials: 10_000,
        seed: 1,
        ..CheckConfig::default()
    };
    let cases = [
        (
            "tsallis_maximum",
            EntropySpec::of(Family::Tsallis, 2.0),
            AxiomId::Maximum,
        ),
        (
            "renyi_upper_increasing",
            EntropySpec::of(Family::Renyi, 2.0),
            AxiomId::UpperIncreasing,
        ),
        (
            "abe_strong_subadditivity",
            EntropySpec::of(Family::Abe, 0.5),
            AxiomId::UpperStrongSubadditivity,
        ),
    ];
    let mut group = c.benchmark_group("check");
    group.sample_size(10);
    for (name, spec, axiom) in cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(name, format!("{exec:?}").to_lowercase());
            group.bench_with_input(id, &exec, |b, &exec| {
                b.iter(|| check_with(&spec, axiom, &cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, trial_throughput);
criterion_main!(benches);
