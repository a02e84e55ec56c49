//! Hot paths: the N-mind evolution, the categorical sampler batch, exact
//! history enumeration, and the fine-graining round trip.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use born_lab_bench::{halves_spec, thirds_spec};
use born_lab_core::{
    branch_tally, evolve_many_minds, fine_grain, frequency_expectation_all, maverick_measure,
    sample_minds_batch, ExpectationMethod, QubitGas, SeededRng, Symbol,
};

fn bench_evolution(c: &mut Criterion) {
    let alphabet: Vec<Symbol> = vec![Symbol::new("↑"), Symbol::new("↓")];
    let gas = QubitGas::sample(2, 10_000, 1, &SeededRng::new(1)).unwrap();
    c.bench_function("evolve_many_minds_n10k_t2", |b| {
        b.iter(|| {
            let state = evolve_many_minds(black_box(&alphabet), black_box(gas.column(0))).unwrap();
            black_box(branch_tally(&state, &alphabet).unwrap())
        })
    });
}

fn bench_sampler(c: &mut Criterion) {
    let spec = thirds_spec();
    c.bench_function("sample_minds_batch_1k_trials_n100", |b| {
        b.iter(|| {
            black_box(sample_minds_batch(
                black_box(&spec),
                100,
                1_000,
                &SeededRng::new(2),
                0,
            ))
        })
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let spec = thirds_spec();
    c.bench_function("frequency_expectation_enumerate_n12", |b| {
        b.iter(|| {
            black_box(
                frequency_expectation_all(black_box(&spec), 12, ExpectationMethod::default())
                    .unwrap(),
            )
        })
    });

    let halves = halves_spec();
    c.bench_function("maverick_tail_n1000", |b| {
        b.iter(|| {
            black_box(maverick_measure(black_box(&halves), 1_000, &Symbol::new("↑"), 0.05).unwrap())
        })
    });
}

fn bench_fine_grain(c: &mut Criterion) {
    let spec = born_lab_core::SystemSpec::from_rationals(vec![
        (Symbol::new("a"), born_lab_core::weight::big_ratio(17, 100)),
        (Symbol::new("b"), born_lab_core::weight::big_ratio(33, 100)),
        (Symbol::new("c"), born_lab_core::weight::big_ratio(50, 100)),
    ])
    .unwrap();
    c.bench_function("fine_grain_t100", |b| {
        b.iter_batched(
            || spec.clone(),
            |s| black_box(fine_grain(&s).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_evolution,
    bench_sampler,
    bench_enumeration,
    bench_fine_grain
);
criterion_main!(benches);
