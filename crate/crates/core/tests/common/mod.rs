#![allow(dead_code)]

use owar::criteria::{ScenarioSet, WeightVector};
use owar::oracles::SelectionProblem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_set(rng: &mut ChaCha8Rng, k: usize, n: usize) -> ScenarioSet {
    let rows = (0..k)
        .map(|_| (0..n).map(|_| rng.random_range(1..=100) as f64).collect())
        .collect();
    ScenarioSet::new(rows).unwrap()
}

/// Selection instance with `n <= max_n` and `K <= max_k`.
pub fn random_selection(rng: &mut ChaCha8Rng, max_n: usize, max_k: usize) -> (SelectionProblem, ScenarioSet) {
    let n = rng.random_range(2..=max_n);
    let p = rng.random_range(1..n);
    let k = rng.random_range(1..=max_k);
    (SelectionProblem::new(n, p).unwrap(), random_set(rng, k, n))
}

pub fn non_increasing(rng: &mut ChaCha8Rng, k: usize) -> WeightVector {
    let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    WeightVector::normalize(w).unwrap()
}

/// Non-decreasing weights whose first `K - l` entries are zero.
pub fn risk_affine(rng: &mut ChaCha8Rng, k: usize, l: usize) -> WeightVector {
    let mut tail: Vec<f64> = (0..l).map(|_| rng.random_range(0.01..1.0)).collect();
    tail.sort_by(f64::total_cmp);
    let mut w = vec![0.0; k - l];
    w.extend(tail);
    WeightVector::normalize(w).unwrap()
}
