use std::hint::black_box;

use alcurve_bench::{synthetic_with_labels, training_set};
use alcurve_core::classifier::{train_boosted, BoostConfig};
use alcurve_core::propagation::{PropagationConfig, Propagator};
use alcurve_core::strategy::{classifier_probabilities, Selector, StrategyConfig, StrategyKind};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn training(c: &mut Criterion) {
    let (x, y) = training_set(3000, 303, 1);
    let cfg = BoostConfig::default();
    let mut g = c.benchmark_group("classifier");
    g.sample_size(10);
    g.bench_function("train_3000x303", |b| b.iter(|| train_boosted(black_box(&x), &y, &cfg, 7).unwrap()));
    g.finish();
}

fn propagation(c: &mut Criterion) {
    let (sg, labels) = synthetic_with_labels(30);
    let (x, y): (Vec<&[f64]>, Vec<bool>) = labels.iter().map(|(i, l)| (sg.features(i), l)).unzip();
    let model = train_boosted(&x, &y, &BoostConfig::default(), 3).unwrap();
    let p = classifier_probabilities(&model, &sg);
    let prop = Propagator::new(&sg, &PropagationConfig::default()).unwrap();
    c.bench_function("propagate_600", |b| b.iter(|| prop.run(black_box(&p), &labels).unwrap()));
}

fn selection(c: &mut Criterion) {
    let (sg, labels) = synthetic_with_labels(30);
    let (x, y): (Vec<&[f64]>, Vec<bool>) = labels.iter().map(|(i, l)| (sg.features(i), l)).unzip();
    let model = train_boosted(&x, &y, &BoostConfig::default(), 3).unwrap();
    let mut g = c.benchmark_group("select_k2");
    for kind in [StrategyKind::Us, StrategyKind::Pps, StrategyKind::Dps] {
        let selector = Selector::new(&sg, StrategyConfig::new(kind)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        g.bench_function(kind.as_str(), |b| {
            b.iter(|| selector.select(&sg, &labels, Some(&model), &mut rng).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, training, propagation, selection);
criterion_main!(benches);
