//! Weight and instance generators, exact-solver backends, and the two
//! experiment pipelines (criterion cross-comparison and heuristic ratios).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aggregation::{approximation_ratio, solve_aggregated, HeuristicConfig, Variant};
use crate::criteria::{minmax_regret, owa, owar, value_vector, ScenarioSet, Solution, WeightVector};
use crate::error::{Error, Result};
use crate::exact::{
    build_mip, export_lp, read_solution_file, solution_from_values, solve_branch_bound, solve_enumeration,
};
use crate::io::{Instance, Problem};
use crate::oracles::{opt_per_scenario, DiGraphInstance, NominalOracle, SelectionProblem};

/// Shape of a generated weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightKind {
    /// First `k` entries `1/k`, the rest zero.
    TopK(usize),
    /// `w_k = g(α, k/K) - g(α, (k-1)/K)` with `g(α, z) = (1 - α^z) / (1 - α)`.
    Alpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub scenarios: usize,
    /// Accept `α = 1` and return uniform weights.
    pub uniform_limit: bool,
}

impl WeightSpec {
    pub fn top_k(k: usize, scenarios: usize) -> Self {
        WeightSpec {
            kind: WeightKind::TopK(k),
            scenarios,
            uniform_limit: false,
        }
    }

    pub fn alpha(alpha: f64, scenarios: usize) -> Self {
        WeightSpec {
            kind: WeightKind::Alpha(alpha),
            scenarios,
            uniform_limit: false,
        }
    }

    pub fn with_uniform_limit(mut self) -> Self {
        self.uniform_limit = true;
        self
    }
}

pub fn make_weights(spec: &WeightSpec) -> Result<WeightVector> {
    let big_k = spec.scenarios;
    if big_k == 0 {
        return Err(Error::InvalidParameter("weights need at least one scenario".into()));
    }
    match spec.kind {
        WeightKind::TopK(k) => {
            if k == 0 || k > big_k {
                return Err(Error::InvalidParameter(format!("top-k needs 1 <= k <= {big_k}, got {k}")));
            }
            let mut w = vec![0.0; big_k];
            w[..k].iter_mut().for_each(|v| *v = 1.0 / k as f64);
            WeightVector::new(w)
        }
        WeightKind::Alpha(alpha) => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
            }
            if alpha == 1.0 {
                if spec.uniform_limit {
                    return WeightVector::uniform(big_k);
                }
                return Err(Error::InvalidParameter(
                    "alpha = 1 is the uniform limit; enable uniform_limit to accept it".into(),
                ));
            }
            let g = |z: f64| (1.0 - alpha.powf(z)) / (1.0 - alpha);
            let kf = big_k as f64;
            let w = (1..=big_k)
                .map(|k| (g(k as f64 / kf) - g((k - 1) as f64 / kf)).max(0.0))
                .collect();
            WeightVector::new(w)
        }
    }
}

fn check_range(low: u32, high: u32) -> Result<()> {
    if low > high {
        return Err(Error::InvalidParameter(format!("cost range [{low}, {high}] is empty")));
    }
    Ok(())
}

fn random_costs(k: usize, n: usize, low: u32, high: u32, seed: u64) -> Result<ScenarioSet> {
    check_range(low, high)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..k)
        .map(|_| (0..n).map(|_| rng.random_range(low..=high) as f64).collect())
        .collect();
    ScenarioSet::new(rows)
}

/// Selection instance with integer costs drawn uniformly from `[low, high]`.
pub fn gen_selection_instance(
    n: usize,
    p: usize,
    k: usize,
    low: u32,
    high: u32,
    seed: u64,
) -> Result<(SelectionProblem, ScenarioSet)> {
    let prob = SelectionProblem::new(n, p)?;
    Ok((prob, random_costs(k, n, low, high, seed)?))
}

/// `rows × cols` grid with arcs right and down, from the top-left to the
/// bottom-right corner. Node `(r, c)` has id `r·cols + c`.
pub fn grid_graph(rows: usize, cols: usize) -> Result<DiGraphInstance> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidParameter(format!("grid {rows}x{cols} needs at least two nodes")));
    }
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                arcs.push((v, v + 1));
            }
            if r + 1 < rows {
                arcs.push((v, v + cols));
            }
        }
    }
    DiGraphInstance::new(rows * cols, arcs, 0, rows * cols - 1)
}

/// Grid shortest-path instance with integer arc costs from `[low, high]`.
pub fn gen_grid_instance(
    rows: usize,
    cols: usize,
    k: usize,
    low: u32,
    high: u32,
    seed: u64,
) -> Result<(DiGraphInstance, ScenarioSet)> {
    let graph = grid_graph(rows, cols)?;
    let costs = random_costs(k, graph.arcs().len(), low, high, seed)?;
    Ok((graph, costs))
}

/// Family of random instances used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProblemSource {
    Selection { n: usize, p: usize },
    Grid { rows: usize, cols: usize },
}

impl ProblemSource {
    pub fn generate(&self, k: usize, low: u32, high: u32, seed: u64) -> Result<Instance> {
        match *self {
            ProblemSource::Selection { n, p } => {
                let (prob, u) = gen_selection_instance(n, p, k, low, high, seed)?;
                Instance::new(Problem::Selection(prob), u)
            }
            ProblemSource::Grid { rows, cols } => {
                let (g, u) = gen_grid_instance(rows, cols, k, low, high, seed)?;
                Instance::new(Problem::ShortestPath(g), u)
            }
        }
    }
}

/// How exact OWAR optima are obtained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ExactMethod {
    #[default]
    Enumeration,
    /// Branch-and-bound where it applies, enumeration otherwise.
    BranchBound,
    /// Export `<dir>/<tag>.lp` and read `<dir>/<tag>.sol` when present.
    External(PathBuf),
}

/// Exact minimizer of `OWAR_w(·, U, baseline)`.
///
/// Returns `None` only for [`ExactMethod::External`] when the solution file
/// does not exist yet; the model file is written in that case.
pub fn solve_exact(
    method: &ExactMethod,
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    baseline: &[f64],
    weights: &WeightVector,
    tag: &str,
) -> Result<Option<Solution>> {
    match method {
        ExactMethod::Enumeration => Ok(Some(solve_enumeration(oracle, scenarios, baseline, weights)?.solution)),
        ExactMethod::BranchBound => {
            let report = if oracle.as_selection().is_some() && weights.is_non_increasing() {
                solve_branch_bound(oracle, scenarios, baseline, weights)?
            } else {
                solve_enumeration(oracle, scenarios, baseline, weights)?
            };
            Ok(Some(report.solution))
        }
        ExactMethod::External(dir) => {
            let model = build_mip(oracle, scenarios, baseline, weights)?;
            std::fs::create_dir_all(dir)?;
            export_lp(&model, dir.join(format!("{tag}.lp")))?;
            let sol = dir.join(format!("{tag}.sol"));
            if !sol.exists() {
                return Ok(None);
            }
            let x = solution_from_values(oracle.num_items(), &read_solution_file(&sol)?)?;
            if !oracle.is_feasible(&x) {
                return Err(Error::InvalidSolution(format!("{} is infeasible", sol.display())));
            }
            Ok(Some(x))
        }
    }
}

fn pending_error(method: &ExactMethod, pending: usize) -> Error {
    let dir = match method {
        ExactMethod::External(d) => d.display().to_string(),
        _ => String::new(),
    };
    Error::AwaitingExternal { pending, dir }
}

/// Decision criterion compared in the first experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Criterion {
    /// Min-max regret.
    Regret,
    /// OWA regret with top-k weights.
    Owar(usize),
    /// OWA of the objective values with top-k weights.
    Owa(usize),
}

impl Criterion {
    pub fn label(&self) -> String {
        match self {
            Criterion::Regret => "regret".into(),
            Criterion::Owar(k) => format!("OWAR_{k}"),
            Criterion::Owa(k) => format!("OWA_{k}"),
        }
    }

    fn top_k(&self) -> usize {
        match *self {
            Criterion::Regret => 1,
            Criterion::Owar(k) | Criterion::Owa(k) => k,
        }
    }

    fn uses_opt(&self) -> bool {
        !matches!(self, Criterion::Owa(_))
    }

    pub fn weights(&self, scenarios: usize) -> Result<WeightVector> {
        make_weights(&WeightSpec::top_k(self.top_k(), scenarios))
    }

    pub fn evaluate(&self, x: &Solution, scenarios: &ScenarioSet, opt: &[f64], weights: &WeightVector) -> Result<f64> {
        match self {
            Criterion::Regret => minmax_regret(x, scenarios, opt),
            Criterion::Owar(_) => owar(x, scenarios, opt, weights),
            Criterion::Owa(_) => owa(&value_vector(x, scenarios)?, weights),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `regret`, then `OWAR_k` and `OWA_k` for every `k` in `grid`.
pub fn criteria_grid(grid: &[usize]) -> Vec<Criterion> {
    let mut out = vec![Criterion::Regret];
    out.extend(grid.iter().map(|&k| Criterion::Owar(k)));
    out.extend(grid.iter().map(|&k| Criterion::Owa(k)));
    out
}

/// Divides every column by its minimum. A zero minimum maps zero cells to 1
/// and positive cells to infinity.
pub fn normalize_columns(values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = values.first().map_or(0, Vec::len);
    let mins: Vec<f64> = (0..cols)
        .map(|c| values.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min))
        .collect();
    values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&mins)
                .map(|(&v, &m)| {
                    if m.abs() <= crate::exact::TIE_TOL {
                        if v.abs() <= crate::exact::TIE_TOL {
                            1.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        v / m
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment1Config {
    pub source: ProblemSource,
    pub scenarios: usize,
    pub grid: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub low: u32,
    pub high: u32,
    #[serde(skip)]
    pub method: ExactMethod,
}

impl Default for Experiment1Config {
    fn default() -> Self {
        Experiment1Config {
            source: ProblemSource::Selection { n: 12, p: 6 },
            scenarios: 10,
            grid: vec![2, 4, 6, 8, 10],
            repetitions: 20,
            seed: 0,
            low: 1,
            high: 100,
            method: ExactMethod::Enumeration,
        }
    }
}

impl Experiment1Config {
    /// `n = 40, p = 20, K = 50`, `k ∈ {5, 10, ..., 50}`, 100 instances,
    /// solved externally through LP files in `dir`.
    pub fn paper_scale(dir: impl Into<PathBuf>) -> Self {
        Experiment1Config {
            source: ProblemSource::Selection { n: 40, p: 20 },
            scenarios: 50,
            grid: (1..=10).map(|i| 5 * i).collect(),
            repetitions: 100,
            method: ExactMethod::External(dir.into()),
            ..Default::default()
        }
    }
}

/// Cross-evaluation of criteria, column-normalized and averaged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceMatrix {
    pub labels: Vec<String>,
    /// `normalized[s][e]`: solution optimal for `s` evaluated under `e`.
    pub normalized: Vec<Vec<f64>>,
    pub row_averages: Vec<f64>,
    pub instances: usize,
    /// Raw values per instance.
    #[serde(skip)]
    pub values: Vec<Vec<Vec<f64>>>,
    #[serde(skip)]
    pub solutions: Vec<Vec<Solution>>,
}

impl PerformanceMatrix {
    pub fn from_values(labels: Vec<String>, values: Vec<Vec<Vec<f64>>>, solutions: Vec<Vec<Solution>>) -> Self {
        let c = labels.len();
        let mut normalized = vec![vec![0.0; c]; c];
        for inst in &values {
            for (acc_row, row) in normalized.iter_mut().zip(normalize_columns(inst)) {
                for (acc, v) in acc_row.iter_mut().zip(row) {
                    *acc += v;
                }
            }
        }
        let count = values.len().max(1) as f64;
        normalized.iter_mut().flatten().for_each(|v| *v /= count);
        let row_averages = normalized.iter().map(|r| r.iter().sum::<f64>() / c as f64).collect();
        PerformanceMatrix {
            labels,
            normalized,
            row_averages,
            instances: values.len(),
            values,
            solutions,
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn validate_grid(grid: &[usize], k: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("criterion grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|&&g| g == 0 || g > k) {
        return Err(Error::InvalidParameter(format!("grid value {bad} outside 1..={k}")));
    }
    Ok(())
}

// cross-evaluation values and per-criterion solutions of one instance
type RepValues = (Vec<Vec<f64>>, Vec<Solution>);

/// Solves every criterion on every instance and cross-evaluates.
pub fn run_experiment1(config: &Experiment1Config) -> Result<PerformanceMatrix> {
    let k = config.scenarios;
    validate_grid(&config.grid, k)?;
    let criteria = criteria_grid(&config.grid);
    let weights: Vec<WeightVector> = criteria.iter().map(|c| c.weights(k)).collect::<Result<_>>()?;
    let per_rep: Vec<Result<Option<RepValues>>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let inst = config
                .source
                .generate(k, config.low, config.high, config.seed.wrapping_add(rep as u64))?;
            let u = &inst.scenarios;
            let opt = opt_per_scenario(&inst.problem, u)?;
            let zeros = vec![0.0; k];
            let mut sols = Vec::with_capacity(criteria.len());
            let mut pending = false;
            for (c, w) in criteria.iter().zip(&weights) {
                let base = if c.uses_opt() { &opt } else { &zeros };
                let tag = format!("exp1_rep{rep:03}_{}", c.label());
                match solve_exact(&config.method, &inst.problem, u, base, w, &tag)? {
                    Some(x) => sols.push(x),
                    None => pending = true,
                }
            }
            if pending {
                return Ok(None);
            }
            let values = sols
                .iter()
                .map(|x| {
                    criteria
                        .iter()
                        .zip(&weights)
                        .map(|(c, w)| c.evaluate(x, u, &opt, w))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Some((values, sols)))
        })
        .collect();
    let mut values = Vec::with_capacity(per_rep.len());
    let mut solutions = Vec::with_capacity(per_rep.len());
    let mut pending = 0;
    for r in per_rep {
        match r? {
            Some((v, s)) => {
                values.push(v);
                solutions.push(s);
            }
            None => pending += 1,
        }
    }
    if pending > 0 {
        return Err(pending_error(&config.method, pending));
    }
    Ok(PerformanceMatrix::from_values(
        criteria.iter().map(Criterion::label).collect(),
        values,
        solutions,
    ))
}

/// Parameter varied along the x-axis of the second experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    TopK,
    P,
    N,
    K,
    KPrime,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::TopK => "topk",
            SweepParam::P => "p",
            SweepParam::N => "n",
            SweepParam::K => "K",
            SweepParam::KPrime => "Kprime",
        }
    }

    fn is_integer(self) -> bool {
        self != SweepParam::Alpha
    }
}

impl Serialize for SweepParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alpha" => SweepParam::Alpha,
            "topk" | "top-k" | "top_k" => SweepParam::TopK,
            "p" => SweepParam::P,
            "n" => SweepParam::N,
            "K" | "k" => SweepParam::K,
            "Kprime" | "kprime" | "K'" | "k-prime" => SweepParam::KPrime,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown sweep '{s}', expected alpha, topk, p, n, K or Kprime"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment2Config {
    pub n: usize,
    pub p: usize,
    pub scenarios: usize,
    pub k_prime: usize,
    pub weights: WeightKind,
    pub variants: Vec<Variant>,
    pub repetitions: usize,
    pub seed: u64,
    pub low: u32,
    pub high: u32,
    pub sweep: SweepParam,
    pub values: Vec<f64>,
    #[serde(skip)]
    pub method: ExactMethod,
}

impl Default for Experiment2Config {
    fn default() -> Self {
        let mut cfg = Experiment2Config {
            n: 12,
            p: 6,
            scenarios: 10,
            k_prime: 5,
            weights: WeightKind::Alpha(0.05),
            variants: Variant::ALL.to_vec(),
            repetitions: 20,
            seed: 0,
            low: 1,
            high: 100,
            sweep: SweepParam::KPrime,
            values: Vec::new(),
            method: ExactMethod::BranchBound,
        };
        cfg.values = cfg.default_values();
        cfg
    }
}

impl Experiment2Config {
    /// Same sweep at `n = 40, p = 20, K = 50, K' = 10` with exact optima
    /// from an external solver.
    pub fn paper_scale(sweep: SweepParam, dir: impl Into<PathBuf>) -> Self {
        let mut cfg = Experiment2Config {
            n: 40,
            p: 20,
            scenarios: 50,
            k_prime: 10,
            repetitions: 100,
            sweep,
            method: ExactMethod::External(dir.into()),
            ..Default::default()
        };
        cfg.values = cfg.default_values();
        cfg
    }

    /// Grid of sweep points derived from the base parameters.
    pub fn default_values(&self) -> Vec<f64> {
        let ints = |v: Vec<usize>| v.into_iter().map(|x| x as f64).collect();
        match self.sweep {
            SweepParam::Alpha => vec![0.01, 0.05, 0.2, 0.5, 0.8, 0.95],
            SweepParam::TopK => ints(steps(1, self.scenarios)),
            SweepParam::P => ints(steps(1, self.n - 1)),
            SweepParam::N => ints((self.p + 1..=self.n + 2).step_by(2).collect()),
            SweepParam::K => ints(steps(self.k_prime, 2 * self.scenarios)),
            SweepParam::KPrime => ints((1..=self.scenarios).collect()),
        }
    }
}

// about five evenly spaced integers from `lo` to `hi`
fn steps(lo: usize, hi: usize) -> Vec<usize> {
    let hi = hi.max(lo);
    let stride = ((hi - lo) / 4).max(1);
    let mut v: Vec<usize> = (lo..=hi).step_by(stride).collect();
    if v.last() != Some(&hi) {
        v.push(hi);
    }
    v
}

/// Mean, minimum and maximum approximation ratio per sweep point and variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub parameter: SweepParam,
    pub points: Vec<f64>,
    pub variants: Vec<Variant>,
    /// `mean[point][variant]`.
    pub mean: Vec<Vec<f64>>,
    pub min: Vec<Vec<f64>>,
    pub max: Vec<Vec<f64>>,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    n: usize,
    p: usize,
    k: usize,
    k_prime: usize,
    weights: WeightKind,
}

fn point_for(config: &Experiment2Config, value: f64) -> Result<Point> {
    if config.sweep.is_integer() && (value.fract() != 0.0 || value < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sweep {} needs positive integer values, got {value}",
            config.sweep
        )));
    }
    let v = value as usize;
    let mut pt = Point {
        n: config.n,
        p: config.p,
        k: config.scenarios,
        k_prime: config.k_prime,
        weights: config.weights,
    };
    match config.sweep {
        SweepParam::Alpha => pt.weights = WeightKind::Alpha(value),
        SweepParam::TopK => pt.weights = WeightKind::TopK(v),
        SweepParam::P => pt.p = v,
        SweepParam::N => pt.n = v,
        SweepParam::K => pt.k = v,
        SweepParam::KPrime => pt.k_prime = v,
    }
    if pt.k_prime == 0 || pt.k_prime > pt.k {
        return Err(Error::InvalidParameter(format!("K' = {} must lie in 1..={}", pt.k_prime, pt.k)));
    }
    Ok(pt)
}

/// Ratio of every heuristic variant to the exact optimum along one sweep.
pub fn run_experiment2(config: &Experiment2Config) -> Result<RatioTable> {
    if config.variants.is_empty() || config.values.is_empty() || config.repetitions == 0 {
        return Err(Error::InvalidParameter("experiment needs variants, sweep values and repetitions".into()));
    }
    let points: Vec<Point> = config
        .values
        .iter()
        .map(|&v| point_for(config, v))
        .collect::<Result<_>>()?;
    let nv = config.variants.len();
    let mut table = RatioTable {
        parameter: config.sweep,
        points: config.values.clone(),
        variants: config.variants.clone(),
        mean: Vec::new(),
        min: Vec::new(),
        max: Vec::new(),
        repetitions: config.repetitions,
    };
    let mut pending = 0;
    for (pi, pt) in points.iter().enumerate() {
        let weights = make_weights(&WeightSpec {
            kind: pt.weights,
            scenarios: pt.k,
            uniform_limit: true,
        })?;
        let per_rep: Vec<Result<Option<Vec<f64>>>> = (0..config.repetitions)
            .into_par_iter()
            .map(|rep| {
                let seed = config.seed.wrapping_add(rep as u64);
                let (prob, u) = gen_selection_instance(pt.n, pt.p, pt.k, config.low, config.high, seed)?;
                let opt = opt_per_scenario(&prob, &u)?;
                let tag = format!("exp2_{}{pi:02}_rep{rep:03}", config.sweep);
                let Some(best) = solve_exact(&config.method, &prob, &u, &opt, &weights, &tag)? else {
                    return Ok(None);
                };
                let exact = owar(&best, &u, &opt, &weights)?;
                config
                    .variants
                    .iter()
                    .map(|&variant| {
                        let cfg = HeuristicConfig::new(pt.k_prime, variant, seed);
                        let out = solve_aggregated(&prob, &u, &opt, &weights, &cfg, None)?;
                        Ok(approximation_ratio(out.value, exact))
                    })
                    .collect::<Result<Vec<f64>>>()
                    .map(Some)
            })
            .collect();
        let mut sum = vec![0.0; nv];
        let mut min = vec![f64::INFINITY; nv];
        let mut max = vec![f64::NEG_INFINITY; nv];
        for r in per_rep {
            let Some(ratios) = r? else {
                pending += 1;
                continue;
            };
            for (v, ratio) in ratios.into_iter().enumerate() {
                sum[v] += ratio;
                min[v] = min[v].min(ratio);
                max[v] = max[v].max(ratio);
            }
        }
        table.mean.push(sum.into_iter().map(|s| s / config.repetitions as f64).collect());
        table.min.push(min);
        table.max.push(max);
    }
    if pending > 0 {
        return Err(pending_error(&config.method, pending));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_k_weights() {
        assert_eq!(make_weights(&WeightSpec::top_k(4, 4)).unwrap(), WeightVector::uniform(4).unwrap());
        assert_eq!(make_weights(&WeightSpec::top_k(1, 3)).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert!(make_weights(&WeightSpec::top_k(0, 3)).is_err());
        assert!(make_weights(&WeightSpec::top_k(4, 3)).is_err());
    }

    // independent evaluation of g differences
    fn alpha_by_hand(alpha: f64, k: usize) -> Vec<f64> {
        (1..=k)
            .map(|i| {
                let a = alpha.powf((i - 1) as f64 / k as f64);
                let b = alpha.powf(i as f64 / k as f64);
                (a - b) / (1.0 - alpha)
            })
            .collect()
    }

    #[test]
    fn alpha_weights() {
        let w = make_weights(&WeightSpec::alpha(0.05, 4)).unwrap();
        for (a, b) in w.as_slice().iter().zip(alpha_by_hand(0.05, 4)) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(w.as_slice().windows(2).all(|p| p[0] > p[1]));
        for alpha in [0.01, 0.05, 0.5, 0.8, 0.99, 2.0] {
            for k in [1, 3, 10, 50] {
                let w = make_weights(&WeightSpec::alpha(alpha, k)).unwrap();
                assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                if alpha < 1.0 {
                    assert!(w.is_non_increasing());
                } else {
                    assert!(w.is_non_decreasing());
                }
            }
        }
        assert!(make_weights(&WeightSpec::alpha(1.0, 4)).is_err());
        assert!(make_weights(&WeightSpec::alpha(0.0, 4)).is_err());
        assert_eq!(
            make_weights(&WeightSpec::alpha(1.0, 4).with_uniform_limit()).unwrap(),
            WeightVector::uniform(4).unwrap()
        );
    }

    #[test]
    fn generators_are_seeded() {
        let (_, a) = gen_selection_instance(12, 6, 10, 1, 100, 7).unwrap();
        let (_, b) = gen_selection_instance(12, 6, 10, 1, 100, 7).unwrap();
        let (_, c) = gen_selection_instance(12, 6, 10, 1, 100, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.rows().flatten().all(|&v| (1.0..=100.0).contains(&v) && v.fract() == 0.0));
        let (prob, flat) = gen_selection_instance(5, 2, 3, 9, 9, 0).unwrap();
        assert!(flat.rows().flatten().all(|&v| v == 9.0));
        let opt = opt_per_scenario(&prob, &flat).unwrap();
        for x in prob.enumerate().unwrap() {
            assert_eq!(minmax_regret(&x, &flat, &opt).unwrap(), 0.0);
        }
        assert!(gen_selection_instance(5, 2, 3, 10, 9, 0).is_err());
    }

    #[test]
    fn grid_graph_shape() {
        let g = grid_graph(3, 4).unwrap();
        assert_eq!(g.num_nodes(), 12);
        assert_eq!(g.arcs().len(), 3 * 3 + 2 * 4);
        // monotone lattice paths: C(5, 2)
        assert_eq!(g.enumerate().unwrap().len(), 10);
        assert!(grid_graph(1, 1).is_err());
        let (g, u) = gen_grid_instance(2, 3, 4, 1, 10, 3).unwrap();
        assert_eq!(u.num_items(), g.arcs().len());
    }

    #[test]
    fn normalization_guard() {
        let n = normalize_columns(&[vec![2.0, 0.0], vec![4.0, 3.0], vec![3.0, 0.0]]);
        assert_eq!(n, vec![vec![1.0, 1.0], vec![2.0, f64::INFINITY], vec![1.5, 1.0]]);
    }

    #[test]
    fn dominant_solution_gives_all_ones() {
        // item 0 is free in every scenario, so selecting it is optimal for all criteria
        let u = ScenarioSet::new(vec![vec![0.0, 5.0, 7.0], vec![0.0, 9.0, 2.0]]).unwrap();
        let prob = SelectionProblem::new(3, 1).unwrap();
        let opt = opt_per_scenario(&prob, &u).unwrap();
        let criteria = criteria_grid(&[1, 2]);
        let x = Solution::from_indices(3, [0]).unwrap();
        let row: Vec<f64> = criteria
            .iter()
            .map(|c| c.evaluate(&x, &u, &opt, &c.weights(2).unwrap()).unwrap())
            .collect();
        let m = PerformanceMatrix::from_values(
            criteria.iter().map(Criterion::label).collect(),
            vec![vec![row; criteria.len()]],
            vec![vec![x; criteria.len()]],
        );
        assert!(m.normalized.iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn small_experiment1_structure() {
        let cfg = Experiment1Config {
            source: ProblemSource::Selection { n: 8, p: 4 },
            scenarios: 6,
            grid: vec![2, 6],
            repetitions: 4,
            seed: 11,
            ..Default::default()
        };
        let m = run_experiment1(&cfg).unwrap();
        assert_eq!(m.labels, ["regret", "OWAR_2", "OWAR_6", "OWA_2", "OWA_6"]);
        for i in 0..m.labels.len() {
            assert!((m.normalized[i][i] - 1.0).abs() < 1e-9);
        }
        let (a, b) = (m.index_of("OWAR_6").unwrap(), m.index_of("OWA_6").unwrap());
        assert_eq!(m.normalized[a], m.normalized[b]);
        assert_eq!(run_experiment1(&cfg).unwrap(), m);
        let bb = Experiment1Config {
            method: ExactMethod::BranchBound,
            ..cfg.clone()
        };
        let m_bb = run_experiment1(&bb).unwrap();
        for (x, y) in m_bb.normalized.iter().flatten().zip(m.normalized.iter().flatten()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_source_experiment1() {
        let cfg = Experiment1Config {
            source: ProblemSource::Grid { rows: 3, cols: 3 },
            scenarios: 4,
            grid: vec![2, 4],
            repetitions: 2,
            ..Default::default()
        };
        let m = run_experiment1(&cfg).unwrap();
        for i in 0..m.labels.len() {
            assert!((m.normalized[i][i] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn experiment1_rejects_bad_grid() {
        let cfg = Experiment1Config {
            grid: vec![11],
            ..Default::default()
        };
        assert!(run_experiment1(&cfg).is_err());
    }

    #[test]
    fn external_backend_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let method = ExactMethod::External(dir.path().to_path_buf());
        let (prob, u) = gen_selection_instance(6, 3, 4, 1, 20, 2).unwrap();
        let opt = opt_per_scenario(&prob, &u).unwrap();
        let w = make_weights(&WeightSpec::alpha(0.3, 4)).unwrap();
        assert_eq!(solve_exact(&method, &prob, &u, &opt, &w, "t").unwrap(), None);
        assert!(dir.path().join("t.lp").exists());
        let best = solve_enumeration(&prob, &u, &opt, &w).unwrap().solution;
        let sol: String = best.selected().map(|i| format!("x{} 1\n", i + 1)).collect();
        std::fs::write(dir.path().join("t.sol"), format!("# Objective value = 0\n{sol}")).unwrap();
        assert_eq!(solve_exact(&method, &prob, &u, &opt, &w, "t").unwrap(), Some(best));
        std::fs::write(dir.path().join("t.sol"), "x1 1\n").unwrap();
        assert!(matches!(
            solve_exact(&method, &prob, &u, &opt, &w, "t"),
            Err(Error::InvalidSolution(_))
        ));
    }

    #[test]
    fn external_experiment_reports_pending() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Experiment1Config {
            source: ProblemSource::Selection { n: 5, p: 2 },
            scenarios: 3,
            grid: vec![3],
            repetitions: 2,
            method: ExactMethod::External(dir.path().to_path_buf()),
            ..Default::default()
        };
        assert!(matches!(
            run_experiment1(&cfg),
            Err(Error::AwaitingExternal { pending: 2, .. })
        ));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2 * 3);
    }

    #[test]
    fn sweep_parsing_and_defaults() {
        for s in ["alpha", "topk", "p", "n", "K", "Kprime"] {
            assert_eq!(s.parse::<SweepParam>().unwrap().label(), s);
        }
        assert!("q".parse::<SweepParam>().is_err());
        let cfg = Experiment2Config::default();
        assert_eq!(cfg.values, (1..=10).map(f64::from).collect::<Vec<_>>());
        let cfg = Experiment2Config {
            sweep: SweepParam::TopK,
            ..Default::default()
        };
        assert_eq!(cfg.default_values(), vec![1.0, 3.0, 5.0, 7.0, 9.0, 10.0]);
    }

    #[test]
    fn small_experiment2() {
        let cfg = Experiment2Config {
            n: 8,
            p: 4,
            scenarios: 6,
            repetitions: 3,
            values: vec![2.0, 6.0],
            ..Default::default()
        };
        let t = run_experiment2(&cfg).unwrap();
        assert_eq!(t.mean.len(), 2);
        assert!(t.min.iter().flatten().all(|&r| r >= 1.0 - 1e-9));
        for (v, variant) in t.variants.iter().enumerate() {
            if *variant != Variant::Random {
                assert!((t.max[1][v] - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(run_experiment2(&cfg).unwrap(), t);
        let bad = Experiment2Config {
            values: vec![7.0],
            ..cfg.clone()
        };
        assert!(run_experiment2(&bad).is_err());
        let frac = Experiment2Config {
            values: vec![2.5],
            ..cfg
        };
        assert!(run_experiment2(&frac).is_err());
    }
}
