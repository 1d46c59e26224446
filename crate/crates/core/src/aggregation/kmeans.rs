//! Lloyd iterations on scenario rows with farthest-point seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::ScenarioSet;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// Cluster of every scenario, all clusters non-empty.
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centre) in centroids.iter().enumerate() {
        let d = dist2(row, centre);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn seed_centres(set: &ScenarioSet, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let total = set.num_scenarios();
    let mut chosen = vec![rng.random_range(0..total)];
    let mut min_d: Vec<f64> = (0..total).map(|s| dist2(set.scenario(s), set.scenario(chosen[0]))).collect();
    while chosen.len() < k {
        let mut next = None;
        let mut best = f64::NEG_INFINITY;
        for s in 0..total {
            if !chosen.contains(&s) && min_d[s] > best {
                best = min_d[s];
                next = Some(s);
            }
        }
        let next = next.expect("fewer centres than scenarios");
        chosen.push(next);
        for s in 0..total {
            min_d[s] = min_d[s].min(dist2(set.scenario(s), set.scenario(next)));
        }
    }
    chosen
}

fn means(set: &ScenarioSet, assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; set.num_items()]; k];
    let mut sizes = vec![0usize; k];
    for (s, &c) in assignment.iter().enumerate() {
        sizes[c] += 1;
        for (acc, v) in sums[c].iter_mut().zip(set.scenario(s)) {
            *acc += v;
        }
    }
    for (row, size) in sums.iter_mut().zip(sizes) {
        row.iter_mut().for_each(|v| *v /= size.max(1) as f64);
    }
    sums
}

/// Moves, for every empty cluster, the point farthest from its centroid.
fn repair(set: &ScenarioSet, assignment: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &c in assignment.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut pick = None;
        let mut best = f64::NEG_INFINITY;
        for (s, &c) in assignment.iter().enumerate() {
            if sizes[c] > 1 {
                let d = dist2(set.scenario(s), &centroids[c]);
                if d > best {
                    best = d;
                    pick = Some(s);
                }
            }
        }
        let s = pick.expect("some cluster has more than one member");
        assignment[s] = empty;
        centroids[empty] = set.scenario(s).to_vec();
    }
}

/// Partitions the scenarios into `k` non-empty clusters under squared
/// Euclidean distance. Deterministic for a fixed `seed`.
pub fn kmeans_cluster(set: &ScenarioSet, k: usize, seed: u64, max_iter: usize) -> Result<KMeans> {
    let total = set.num_scenarios();
    if k == 0 || k > total {
        return Err(Error::InvalidParameter(format!(
            "cluster count must lie in 1..={total}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = seed_centres(set, k, &mut rng)
        .into_iter()
        .map(|s| set.scenario(s).to_vec())
        .collect();
    let mut assignment: Vec<usize> = set.rows().map(|r| nearest(r, &centroids)).collect();
    repair(set, &mut assignment, &mut centroids);
    centroids = means(set, &assignment, k);
    let mut iterations = 1;
    while iterations < max_iter.max(1) {
        let mut next: Vec<usize> = set.rows().map(|r| nearest(r, &centroids)).collect();
        repair(set, &mut next, &mut centroids);
        iterations += 1;
        if next == assignment {
            break;
        }
        assignment = next;
        centroids = means(set, &assignment, k);
    }
    Ok(KMeans {
        assignment,
        centroids,
        iterations,
    })
}
