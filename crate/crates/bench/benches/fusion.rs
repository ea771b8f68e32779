use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use innoscore_core::indicators::{normalize, NormalizationMode, ObservationSet};
use innoscore_core::pipeline::{evaluate, group_bodies, EvaluateOptions};
use innoscore_core::{
    combine_all, combine_pair, fixtures, parse_source_data, BodyOfEvidence, Interval, PairRule,
};

fn grid_body(name: &str, n: usize, shift: usize) -> BodyOfEvidence {
    let weights = (0..n).map(|k| {
        let lo = ((k + shift) % 20) as f64 * 0.05;
        let hi = (lo + 0.05 * (1 + k % 4) as f64).min(1.0);
        (Interval::new(lo, hi).unwrap(), 1.0 + k as f64)
    });
    BodyOfEvidence::from_weights(name, weights).unwrap()
}

fn bench_combination(c: &mut Criterion) {
    let data = parse_source_data(fixtures::WORKED_EXAMPLE).unwrap();
    let bodies = group_bodies(&data, 0, 0).unwrap();

    c.bench_function("combine_all/worked_example", |b| {
        b.iter(|| combine_all(black_box(&bodies), PairRule::Envelope).unwrap())
    });

    let a = grid_body("a", 64, 0);
    let b = grid_body("b", 64, 7);
    c.bench_function("combine_pair/64x64", |bench| {
        bench.iter(|| combine_pair(black_box(&a), black_box(&b), PairRule::Envelope).unwrap())
    });

    let fragment = parse_source_data(fixtures::SEARCH_SURVEY).unwrap();
    c.bench_function("evaluate/fragment_10_components", |b| {
        b.iter(|| evaluate(black_box(&fragment), &EvaluateOptions::default()))
    });
}

fn bench_normalization(c: &mut Criterion) {
    let hits =
        ObservationSet::new((0..10_000).map(|k| ((k * 7919) % 10_007) as f64).collect()).unwrap();
    for mode in [
        NormalizationMode::Linear,
        NormalizationMode::Statistical,
        NormalizationMode::Exponential,
    ] {
        c.bench_function(&format!("normalize/{mode}/10k"), |b| {
            b.iter(|| normalize(black_box(&hits), mode))
        });
    }
}

criterion_group!(benches, bench_combination, bench_normalization);
criterion_main!(benches);
