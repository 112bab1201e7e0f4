//! Fixtures shared by the benchmarks.

use alcurve_core::graph::LabelSet;
use alcurve_core::synthetic::{generate_synthetic, SyntheticConfig};
use alcurve_core::SampleGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random training set with a noisy linear target.
pub fn training_set(n: usize, d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + rng.random_range(-0.5..0.5);
        x.push(row);
        y.push(s > 0.0);
    }
    (x, y)
}

/// Default synthetic graph with `labeled` ground-truth labels revealed,
/// alternating between the classes.
pub fn synthetic_with_labels(labeled: usize) -> (SampleGraph, LabelSet) {
    let sg = generate_synthetic(&SyntheticConfig::default()).expect("default synthetic config");
    let gt = sg.gt_labels().expect("synthetic samples are labeled");
    let mut labels = LabelSet::new(sg.len());
    let mut want = true;
    for (i, &l) in gt.iter().enumerate() {
        if labels.len() == labeled {
            break;
        }
        if l == want {
            labels.insert(i, l).expect("fresh index");
            want = !want;
        }
    }
    (sg, labels)
}
