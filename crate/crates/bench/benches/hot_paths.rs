use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use momentum_core::changepoint::{cusum_on, TuneConfig};
use momentum_core::synth::AnnotatedConfig;
use momentum_core::*;

fn streak_tests(c: &mut Criterion) {
    let seqs = gen_null(0.5, 235, 31, 1).unwrap();
    let t = build_contingency(&streaks::pooled_streaks(&seqs), 7).unwrap();
    c.bench_function("chi_squared", |b| b.iter(|| chi_squared_test(black_box(&t)).unwrap()));
    c.bench_function("exact_test_10k", |b| b.iter(|| exact_test(black_box(&t), 10_000, 3).unwrap()));
}

fn cusum(c: &mut Criterion) {
    let matches = gen_annotated(&AnnotatedConfig { matches: 1, points: 300, seed: 4, ..Default::default() });
    let a = analyze_match(&matches[0], &PipelineConfig::default()).unwrap();
    let params = changepoint::CusumParams::for_series(&a.momentum, 1.0);
    c.bench_function("cusum_300", |b| b.iter(|| cusum_on(black_box(&a.momentum.values), &params).unwrap()));
    let tune = TuneConfig::new(40, 1.0);
    c.bench_function("tune_threshold_300", |b| b.iter(|| tune_threshold(&a.momentum, &params, &tune).unwrap()));
}

fn network(c: &mut Criterion) {
    let cfg = NetConfig::new(19, vec![16]).unwrap();
    let params: Vec<f64> = (0..cfg.param_count()).map(|i| ((i * 37 % 101) as f64 / 50.0) - 1.0).collect();
    let net = Network::new(cfg, params).unwrap();
    let x: Vec<Vec<f64>> = (0..256).map(|r| (0..19).map(|k| ((r * 7 + k * 13) % 29) as f64 / 29.0).collect()).collect();
    let y: Vec<bool> = (0..256).map(|r| r % 3 == 0).collect();
    c.bench_function("forward_256", |b| b.iter(|| x.iter().map(|r| net.forward(r).unwrap()).sum::<f64>()));
    c.bench_function("gradient_256", |b| b.iter(|| net.gradient(black_box(&x), &y).unwrap()));
}

fn shapley(c: &mut Criterion) {
    let w: Vec<f64> = (0..12).map(|k| (k as f64 - 6.0) / 4.0).collect();
    let predict = |x: &[f64]| {
        let s: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        1.0 / (1.0 + (-s).exp())
    };
    let background: Vec<Vec<f64>> = (0..50).map(|r| (0..12).map(|k| ((r + k) % 5) as f64 / 5.0).collect()).collect();
    let instance = vec![0.5; 12];
    c.bench_function("shapley_12_features", |b| b.iter(|| shapley_values(&predict, black_box(&instance), &background).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = streak_tests, cusum, network, shapley
}
criterion_main!(benches);
