//! Scenario aggregation: block averaging with its approximation bound, and
//! the clustering heuristics built on it.

mod kmeans;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

pub use kmeans::{kmeans_cluster, KMeans, DEFAULT_MAX_ITER};

use crate::criteria::{owar, regret_vector, ScenarioSet, Solution, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::exact::{solve_branch_bound, solve_enumeration, TIE_TOL};
use crate::oracles::NominalOracle;

/// A reduced scenario problem together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationResult {
    /// Cluster index of every original (padded) scenario.
    pub clusters: Vec<usize>,
    #[serde(serialize_with = "rows")]
    pub centroids: ScenarioSet,
    /// Comparison values replacing the per-scenario optima.
    pub o: Vec<f64>,
    #[serde(serialize_with = "weights")]
    pub w_prime: WeightVector,
    /// Bound factor, only for block aggregation.
    pub rho: Option<f64>,
    pub ell: usize,
}

fn rows<S: Serializer>(set: &ScenarioSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(set.rows())
}

fn weights<S: Serializer>(w: &WeightVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.as_slice())
}

impl AggregationResult {
    pub fn num_clusters(&self) -> usize {
        self.o.len()
    }

    /// Sizes of the clusters in cluster-index order.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters()];
        for &c in &self.clusters {
            sizes[c] += 1;
        }
        sizes
    }
}

/// `max_k Σ_{i<=k} w_i / Σ_{i<=k} w̄_i` over the reduced length.
pub fn rho(weights: &[f64], block_weights: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut best: f64 = 0.0;
    for (w, wb) in weights.iter().zip(block_weights) {
        num += w;
        den += wb;
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    best
}

/// Averages consecutive blocks of `ell` scenarios.
pub fn block_aggregate(
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    ell: usize,
) -> Result<AggregationResult> {
    let k = scenarios.num_scenarios();
    check_len("baseline length", k, opt.len())?;
    check_len("weight vector", k, weights.len())?;
    if ell == 0 || !k.is_multiple_of(ell) {
        return Err(Error::InvalidParameter(format!(
            "block size {ell} does not divide the scenario count {k}"
        )));
    }
    let clusters: Vec<usize> = (0..k).map(|s| s / ell).collect();
    let mut result = aggregate_clusters(scenarios, opt, weights, &clusters, OptMode::Oo, WeightMode::Dw, None)?;
    result.rho = Some(rho(weights.as_slice(), result.w_prime.as_slice()));
    result.ell = ell;
    Ok(result)
}

/// The three sides of the block-aggregation inequality chain for one solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
}

impl SandwichBounds {
    /// `lower <= mid <= upper` up to [`TIE_TOL`].
    pub fn holds(&self) -> bool {
        self.lower <= self.mid + TIE_TOL && self.mid <= self.upper + TIE_TOL
    }
}

/// Evaluates `(OWAR_w̄(x, Ū, ō), OWAR_w(x, U, opt), ℓρ·OWAR_w̄(x, Ū, ō))`.
///
/// Fails with [`Error::Precondition`] when the bound does not apply.
pub fn sandwich_check(
    x: &Solution,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    agg: &AggregationResult,
) -> Result<SandwichBounds> {
    if !weights.is_non_increasing() {
        return Err(Error::Precondition("the sandwich bound needs non-increasing weights".into()));
    }
    let rho = agg
        .rho
        .ok_or_else(|| Error::Precondition("aggregation carries no bound factor".into()))?;
    let r = regret_vector(x, scenarios, opt)?;
    if r.regrets.iter().any(|&v| v < -TIE_TOL) {
        return Err(Error::Precondition("the sandwich bound needs non-negative regrets".into()));
    }
    let lower = owar(x, &agg.centroids, &agg.o, &agg.w_prime)?;
    let mid = owar(x, scenarios, opt, weights)?;
    Ok(SandwichBounds {
        lower,
        mid,
        upper: agg.ell as f64 * rho * lower,
    })
}

/// Scenario set extended with zero scenarios to a multiple of `k_prime`.
#[derive(Debug, Clone, PartialEq)]
pub struct Padded {
    pub scenarios: ScenarioSet,
    pub opt: Vec<f64>,
    pub weights: WeightVector,
    pub ell: usize,
    pub added: usize,
}

/// Pads to `ℓK′` scenarios with `ℓ = ⌈K/K′⌉`; zeros go at the tail.
pub fn pad_scenarios(scenarios: &ScenarioSet, opt: &[f64], weights: &WeightVector, k_prime: usize) -> Result<Padded> {
    let k = scenarios.num_scenarios();
    check_len("baseline length", k, opt.len())?;
    check_len("weight vector", k, weights.len())?;
    if k_prime == 0 {
        return Err(Error::InvalidParameter("K' must be at least 1".into()));
    }
    let ell = k.div_ceil(k_prime);
    let total = ell * k_prime;
    let added = total - k;
    let mut rows: Vec<Vec<f64>> = scenarios.rows().map(<[f64]>::to_vec).collect();
    rows.resize(total, vec![0.0; scenarios.num_items()]);
    let mut opt = opt.to_vec();
    opt.resize(total, 0.0);
    Ok(Padded {
        scenarios: ScenarioSet::new(rows)?,
        opt,
        weights: weights.padded(total),
        ell,
        added,
    })
}

/// Comparison values of the reduced scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMode {
    /// Optimum of the nominal problem under each centroid.
    No,
    /// Mean of the member optima.
    Oo,
}

/// Reduced weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Consecutive blocks of the original weights, sized by the sorted cluster sizes.
    Dw,
    /// `w′_k` sums every `K′`-th original weight starting at `k`.
    Sw,
}

/// Dynamic weights from cluster sizes.
pub fn dynamic_weights(weights: &WeightVector, sizes: &[usize]) -> Result<WeightVector> {
    let total: usize = sizes.iter().sum();
    check_len("cluster sizes", weights.len(), total)?;
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let w = weights.as_slice();
    let mut start = 0;
    let out = sorted
        .iter()
        .map(|&s| {
            let block: f64 = w[start..start + s].iter().sum();
            start += s;
            block
        })
        .collect();
    WeightVector::new(out)
}

/// Static weights striped modulo `k_prime`.
pub fn static_weights(weights: &WeightVector, k_prime: usize) -> Result<WeightVector> {
    if k_prime == 0 {
        return Err(Error::InvalidParameter("K' must be at least 1".into()));
    }
    let mut out = vec![0.0; k_prime];
    for (l, w) in weights.as_slice().iter().enumerate() {
        out[l % k_prime] += w;
    }
    WeightVector::new(out)
}

/// Builds the reduced problem for a given clustering.
///
/// `clusters[s]` is the cluster of scenario `s`; cluster indices must cover
/// `0..K′` with no empty cluster. `oracle` is required for [`OptMode::No`].
pub fn aggregate_clusters(
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    clusters: &[usize],
    opt_mode: OptMode,
    weight_mode: WeightMode,
    oracle: Option<&dyn NominalOracle>,
) -> Result<AggregationResult> {
    let k = scenarios.num_scenarios();
    let n = scenarios.num_items();
    check_len("baseline length", k, opt.len())?;
    check_len("weight vector", k, weights.len())?;
    check_len("cluster assignment", k, clusters.len())?;
    let k_prime = clusters.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k_prime];
    let mut sums = vec![vec![0.0; n]; k_prime];
    let mut opt_sums = vec![0.0; k_prime];
    for (s, &c) in clusters.iter().enumerate() {
        sizes[c] += 1;
        for (acc, v) in sums[c].iter_mut().zip(scenarios.scenario(s)) {
            *acc += v;
        }
        opt_sums[c] += opt[s];
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::InvalidParameter(format!("cluster {empty} is empty")));
    }
    for (row, &size) in sums.iter_mut().zip(&sizes) {
        row.iter_mut().for_each(|v| *v /= size as f64);
    }
    let centroids = ScenarioSet::new(sums)?;
    let o = match opt_mode {
        OptMode::Oo => opt_sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).collect(),
        OptMode::No => {
            let oracle =
                oracle.ok_or_else(|| Error::InvalidParameter("new optimal values need a nominal oracle".into()))?;
            crate::oracles::opt_per_scenario(oracle, &centroids)?
        }
    };
    let w_prime = match weight_mode {
        WeightMode::Dw => dynamic_weights(weights, &sizes)?,
        WeightMode::Sw => static_weights(weights, k_prime)?,
    };
    Ok(AggregationResult {
        clusters: clusters.to_vec(),
        centroids,
        o,
        w_prime,
        rho: None,
        ell: sizes.iter().copied().max().unwrap_or(1),
    })
}

/// Clustering heuristic variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    KNoDw,
    KNoSw,
    KOoDw,
    KOoSw,
    Random,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::KNoDw, Variant::KNoSw, Variant::KOoDw, Variant::KOoSw, Variant::Random];

    pub const KMEANS: [Variant; 4] = [Variant::KNoDw, Variant::KNoSw, Variant::KOoDw, Variant::KOoSw];

    fn modes(self) -> Option<(OptMode, WeightMode)> {
        match self {
            Variant::KNoDw => Some((OptMode::No, WeightMode::Dw)),
            Variant::KNoSw => Some((OptMode::No, WeightMode::Sw)),
            Variant::KOoDw => Some((OptMode::Oo, WeightMode::Dw)),
            Variant::KOoSw => Some((OptMode::Oo, WeightMode::Sw)),
            Variant::Random => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::KNoDw => "K-NO-DW",
            Variant::KNoSw => "K-NO-SW",
            Variant::KOoDw => "K-OO-DW",
            Variant::KOoSw => "K-OO-SW",
            Variant::Random => "Random",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown variant '{s}', expected one of K-NO-DW, K-NO-SW, K-OO-DW, K-OO-SW, Random"
                ))
            })
    }
}

/// Exact solver used on the reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReducedSolver {
    #[default]
    Enumeration,
    /// Branch-and-bound when the oracle is a selection problem and `w′` is
    /// non-increasing, enumeration otherwise.
    BranchBoundIfPossible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicConfig {
    pub k_prime: usize,
    pub variant: Variant,
    pub seed: u64,
    pub max_iter: usize,
    pub solver: ReducedSolver,
}

impl HeuristicConfig {
    pub fn new(k_prime: usize, variant: Variant, seed: u64) -> Self {
        HeuristicConfig {
            k_prime,
            variant,
            seed,
            max_iter: DEFAULT_MAX_ITER,
            solver: ReducedSolver::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicOutcome {
    pub solution: Solution,
    /// OWAR of `solution` on the original problem.
    pub value: f64,
    /// `value / exact`, if the exact optimum was supplied.
    pub ratio: Option<f64>,
    pub aggregation: AggregationResult,
}

/// `value / exact` with `0/0 = 1`.
pub fn approximation_ratio(value: f64, exact: f64) -> f64 {
    if exact.abs() <= TIE_TOL {
        if value.abs() <= TIE_TOL {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        value / exact
    }
}

fn random_reduction(
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    k_prime: usize,
    seed: u64,
) -> Result<AggregationResult> {
    let k = scenarios.num_scenarios();
    if k_prime == 0 || k_prime > k {
        return Err(Error::InvalidParameter(format!("K' must lie in 1..={k}, got {k_prime}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, k, k_prime).into_vec();
    picked.sort_unstable();
    let centroids = scenarios.select(&picked)?;
    // unsampled scenarios are attached to their nearest sampled one
    let clusters = (0..k)
        .map(|s| {
            let row = scenarios.scenario(s);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, rep) in centroids.rows().enumerate() {
                let d: f64 = row.iter().zip(rep).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect();
    Ok(AggregationResult {
        clusters,
        centroids,
        o: picked.iter().map(|&s| opt[s]).collect(),
        w_prime: static_weights(weights, k_prime)?,
        rho: None,
        ell: k.div_ceil(k_prime),
    })
}

/// Runs one clustering heuristic end to end and evaluates the result on the
/// original problem.
pub fn solve_aggregated(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    config: &HeuristicConfig,
    exact: Option<f64>,
) -> Result<HeuristicOutcome> {
    check_len("scenario width", oracle.num_items(), scenarios.num_items())?;
    let aggregation = match config.variant.modes() {
        None => random_reduction(scenarios, opt, weights, config.k_prime, config.seed)?,
        Some((opt_mode, weight_mode)) => {
            let padded = pad_scenarios(scenarios, opt, weights, config.k_prime)?;
            let km = kmeans_cluster(&padded.scenarios, config.k_prime, config.seed, config.max_iter)?;
            let mut agg = aggregate_clusters(
                &padded.scenarios,
                &padded.opt,
                &padded.weights,
                &km.assignment,
                opt_mode,
                weight_mode,
                Some(oracle),
            )?;
            agg.ell = padded.ell;
            agg
        }
    };
    let use_bb = config.solver == ReducedSolver::BranchBoundIfPossible
        && oracle.as_selection().is_some()
        && aggregation.w_prime.is_non_increasing();
    let reduced = if use_bb {
        solve_branch_bound(oracle, &aggregation.centroids, &aggregation.o, &aggregation.w_prime)?
    } else {
        solve_enumeration(oracle, &aggregation.centroids, &aggregation.o, &aggregation.w_prime)?
    };
    let value = owar(&reduced.solution, scenarios, opt, weights)?;
    Ok(HeuristicOutcome {
        solution: reduced.solution,
        value,
        ratio: exact.map(|e| approximation_ratio(value, e)),
        aggregation,
    })
}

/// Nominal optimizer under the mean scenario.
pub fn midpoint_solution(oracle: &dyn NominalOracle, scenarios: &ScenarioSet) -> Result<Solution> {
    check_len("scenario width", oracle.num_items(), scenarios.num_items())?;
    oracle.solve(&scenarios.mean_scenario()).map(|(x, _)| x)
}
