//! Domain types and the decision criteria evaluated for a fixed solution.
//!
//! A [`ScenarioSet`] holds `K` cost vectors over `n` items. For a binary
//! [`Solution`] the value vector collects its cost in every scenario, the
//! regret vector subtracts a per-scenario baseline (usually the scenario
//! optimum), and the ordered weighted average sorts a vector from largest to
//! smallest entry before taking the dot product with a [`WeightVector`].

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Tolerance used when checking that weights sum to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Slack allowed by the monotonicity flags of [`WeightVector`].
pub const MONOTONE_TOL: f64 = 1e-12;

/// Largest `K` accepted by [`owa_by_permutation_oracle`].
pub const PERMUTATION_ORACLE_MAX_K: usize = 9;

/// `K` cost scenarios over `n` items, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioSetRepr", into = "ScenarioSetRepr")]
pub struct ScenarioSet {
    k: usize,
    n: usize,
    costs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioSetRepr {
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    costs: Vec<Vec<f64>>,
}

impl TryFrom<ScenarioSetRepr> for ScenarioSet {
    type Error = Error;

    fn try_from(repr: ScenarioSetRepr) -> Result<Self> {
        check_len("scenario rows", repr.k, repr.costs.len())?;
        let set = ScenarioSet::new(repr.costs)?;
        check_len("scenario columns", repr.n, set.n)?;
        Ok(set)
    }
}

impl From<ScenarioSet> for ScenarioSetRepr {
    fn from(set: ScenarioSet) -> Self {
        ScenarioSetRepr {
            k: set.k,
            n: set.n,
            costs: set.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl ScenarioSet {
    /// Builds a scenario set from one cost row per scenario.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidScenarios("at least one scenario is required".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidScenarios("at least one item is required".into()));
        }
        let mut costs = Vec::with_capacity(k * n);
        for (idx, row) in rows.into_iter().enumerate() {
            check_len("scenario row length", n, row.len())?;
            if let Some(bad) = row.iter().find(|c| !c.is_finite() || **c < 0.0) {
                return Err(Error::InvalidScenarios(format!(
                    "scenario {} has invalid cost {bad}; costs must be finite and non-negative",
                    idx + 1
                )));
            }
            costs.extend(row);
        }
        Ok(ScenarioSet { k, n, costs })
    }

    pub fn num_scenarios(&self) -> usize {
        self.k
    }

    pub fn num_items(&self) -> usize {
        self.n
    }

    /// Cost vector of scenario `k` (0-based).
    pub fn scenario(&self, k: usize) -> &[f64] {
        &self.costs[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.costs.chunks_exact(self.n)
    }

    /// Column means, i.e. the midpoint scenario.
    pub fn mean_scenario(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.n];
        for row in self.rows() {
            for (m, c) in mean.iter_mut().zip(row) {
                *m += c;
            }
        }
        let k = self.k as f64;
        mean.iter_mut().for_each(|m| *m /= k);
        mean
    }

    /// Scenario set made of the listed rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        ScenarioSet::new(indices.iter().map(|&k| self.scenario(k).to_vec()).collect())
    }
}

/// Binary incidence vector over the items.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    incidence: Vec<bool>,
}

impl Solution {
    pub fn new(incidence: Vec<bool>) -> Self {
        Solution { incidence }
    }

    /// Solution of length `n` selecting the given 0-based items.
    pub fn from_indices(n: usize, selected: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut incidence = vec![false; n];
        for i in selected {
            if i >= n {
                return Err(Error::InvalidSolution(format!("item {i} out of range for length {n}")));
            }
            incidence[i] = true;
        }
        Ok(Solution { incidence })
    }

    /// Parses a 0/1 vector.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidSolution(format!("entry {other} is not binary"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Solution::new)
    }

    pub fn zeros(n: usize) -> Self {
        Solution { incidence: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.incidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incidence.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.incidence[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.incidence
    }

    /// 0-based indices of selected items, ascending.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.incidence.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.incidence.iter().filter(|&&b| b).count()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.incidence.iter().map(|&b| u8::from(b)).collect()
    }

    /// Cost of the solution under a single cost vector.
    pub fn cost(&self, costs: &[f64]) -> f64 {
        self.selected().map(|i| costs[i]).sum()
    }
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Solution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        Solution::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.incidence.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

/// Preference vector: non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    #[serde(skip)]
    non_increasing: bool,
    #[serde(skip)]
    non_decreasing: bool,
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            weights: Vec<f64>,
        }
        let repr = Repr::deserialize(deserializer)?;
        WeightVector::new(repr.weights).map_err(serde::de::Error::custom)
    }
}

impl WeightVector {
    /// Validates `weights`; the sum must already be one within [`WEIGHT_SUM_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1 (use WeightVector::normalize for unnormalized input)"
            )));
        }
        Ok(Self::with_flags(weights))
    }

    /// Scales non-negative weights so they sum to one.
    pub fn normalize(weights: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&weights)?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        Ok(Self::with_flags(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// `(1/K, ..., 1/K)`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidWeights("weight vector must be non-empty".into()));
        }
        Ok(Self::with_flags(vec![1.0 / k as f64; k]))
    }

    /// `(1, 0, ..., 0)`, the weights under which OWAR is min-max regret.
    pub fn max_weight(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidWeights("weight vector must be non-empty".into()));
        }
        let mut weights = vec![0.0; k];
        weights[0] = 1.0;
        Ok(Self::with_flags(weights))
    }

    fn validate_entries(weights: &[f64]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("weight vector must be non-empty".into()));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("weight {bad} is negative or not finite")));
        }
        Ok(())
    }

    fn with_flags(weights: Vec<f64>) -> Self {
        let non_increasing = weights.windows(2).all(|p| p[0] >= p[1] - MONOTONE_TOL);
        let non_decreasing = weights.windows(2).all(|p| p[0] <= p[1] + MONOTONE_TOL);
        WeightVector {
            weights,
            non_increasing,
            non_decreasing,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `w_1 >= w_2 >= ... >= w_K` (risk-averse).
    pub fn is_non_increasing(&self) -> bool {
        self.non_increasing
    }

    /// `w_1 <= w_2 <= ... <= w_K` (risk-affine).
    pub fn is_non_decreasing(&self) -> bool {
        self.non_decreasing
    }

    pub fn first(&self) -> f64 {
        self.weights[0]
    }

    /// Weight vector extended with zeros to length `len`.
    pub fn padded(&self, len: usize) -> Self {
        let mut weights = self.weights.clone();
        weights.resize(len.max(weights.len()), 0.0);
        Self::with_flags(weights)
    }
}

/// Regrets of one solution together with the baseline they were measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretVector {
    pub regrets: Vec<f64>,
    pub opt_values: Vec<f64>,
    /// At least one regret is negative, which can only happen for a baseline
    /// that is not the vector of true scenario optima.
    pub has_negative: bool,
}

/// `v(x)`: the cost of `x` in every scenario.
pub fn value_vector(x: &Solution, scenarios: &ScenarioSet) -> Result<Vec<f64>> {
    check_len("solution length", scenarios.num_items(), x.len())?;
    Ok(scenarios.rows().map(|row| x.cost(row)).collect())
}

/// Scenario indices ordered by descending value; ties by ascending index.
pub fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Ordered weighted average of `values` under `weights`.
pub fn owa(values: &[f64], weights: &WeightVector) -> Result<f64> {
    check_len("OWA input length", weights.len(), values.len())?;
    Ok(descending_order(values)
        .into_iter()
        .zip(weights.as_slice())
        .map(|(k, w)| w * values[k])
        .sum())
}

/// Regret of `x` against the baseline `opt`, scenario by scenario.
pub fn regret_vector(x: &Solution, scenarios: &ScenarioSet, opt: &[f64]) -> Result<RegretVector> {
    check_len("baseline length", scenarios.num_scenarios(), opt.len())?;
    let regrets: Vec<f64> = value_vector(x, scenarios)?
        .into_iter()
        .zip(opt)
        .map(|(v, o)| v - o)
        .collect();
    let has_negative = regrets.iter().any(|r| *r < 0.0);
    Ok(RegretVector {
        regrets,
        opt_values: opt.to_vec(),
        has_negative,
    })
}

/// Largest regret of `x` over all scenarios.
pub fn minmax_regret(x: &Solution, scenarios: &ScenarioSet, opt: &[f64]) -> Result<f64> {
    let r = regret_vector(x, scenarios, opt)?;
    Ok(r.regrets.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// OWA of the regret vector of `x`.
pub fn owar(x: &Solution, scenarios: &ScenarioSet, opt: &[f64], weights: &WeightVector) -> Result<f64> {
    let r = regret_vector(x, scenarios, opt)?;
    owa(&r.regrets, weights)
}

/// Brute-force OWA over all `K!` assignments of values to weight positions.
///
/// Non-increasing weights give the maximum over permutations, non-decreasing
/// weights the minimum. Test oracle only; the factorial cost is guarded by
/// [`PERMUTATION_ORACLE_MAX_K`].
pub fn owa_by_permutation_oracle(values: &[f64], weights: &WeightVector) -> Result<f64> {
    check_len("OWA input length", weights.len(), values.len())?;
    let k = values.len();
    if k > PERMUTATION_ORACLE_MAX_K {
        return Err(Error::TooLarge {
            what: "K for the permutation oracle",
            value: k,
            limit: PERMUTATION_ORACLE_MAX_K,
        });
    }
    let maximize = if weights.is_non_increasing() {
        true
    } else if weights.is_non_decreasing() {
        false
    } else {
        return Err(Error::NotMonotone);
    };
    let w = weights.as_slice();
    let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for_each_permutation(k, |perm| {
        let v: f64 = perm.iter().zip(w).map(|(&p, wk)| wk * values[p]).sum();
        best = if maximize { best.max(v) } else { best.min(v) };
    });
    Ok(best)
}

/// Calls `f` on every permutation of `0..k` (Heap's algorithm).
pub(crate) fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    f(&perm);
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
