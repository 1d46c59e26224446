//! Best-first branch-and-bound for OWAR on selection problems.
//!
//! A node is a subspace of the feasible set given by items fixed in and items
//! fixed out. Its bound is the midpoint-scenario relaxation: for non-increasing
//! weights the OWA of any vector is at least its mean, so
//! `OWAR(x) >= c̄·x - mean(opt)` and the minimum of the right-hand side over the
//! subspace is attained by the greedy completion on mean costs. Every node
//! evaluates that completion exactly, and children partition the subspace
//! minus the completion (fixing free items in index order), so no solution is
//! evaluated twice and the node count never exceeds `C(n, p)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{SolveReport, TIE_TOL};
use crate::criteria::{owar, ScenarioSet, Solution, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::oracles::{smallest_indices, NominalOracle, SelectionProblem};

#[derive(Debug, Clone, Default)]
pub struct BranchBoundOptions {
    /// Check at every node that the bound does not exceed the OWAR of the
    /// node's own solution and does not decrease from parent to child.
    pub check_bounds: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    In,
    Out,
}

struct Node {
    bound: f64,
    seq: u64,
    fixes: Vec<Fix>,
    completion: Solution,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (bound, seq)
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    prob: &'a SelectionProblem,
    scenarios: &'a ScenarioSet,
    opt: &'a [f64],
    weights: &'a WeightVector,
    mean: Vec<f64>,
    mean_opt: f64,
}

impl Search<'_> {
    /// Cheapest completion on mean costs, or `None` if the subspace is empty.
    fn complete(&self, fixes: &[Fix]) -> Option<(Solution, f64)> {
        let fixed_in: Vec<usize> = (0..fixes.len()).filter(|&i| fixes[i] == Fix::In).collect();
        let free: Vec<usize> = (0..fixes.len()).filter(|&i| fixes[i] == Fix::Free).collect();
        let need = self.prob.p().checked_sub(fixed_in.len())?;
        if need > free.len() {
            return None;
        }
        let picked = smallest_indices(&self.mean, &free, need);
        let x = Solution::from_indices(fixes.len(), fixed_in.into_iter().chain(picked)).ok()?;
        let bound = x.cost(&self.mean) - self.mean_opt;
        Some((x, bound))
    }
}

/// Exact OWAR optimum for a selection problem and non-increasing weights.
pub fn solve_branch_bound(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
) -> Result<SolveReport> {
    solve_branch_bound_with(oracle, scenarios, opt, weights, &BranchBoundOptions::default())
}

pub fn solve_branch_bound_with(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    options: &BranchBoundOptions,
) -> Result<SolveReport> {
    let prob = oracle
        .as_selection()
        .ok_or_else(|| Error::Unsupported("branch-and-bound requires a selection problem".into()))?;
    check_len("scenario width", prob.n(), scenarios.num_items())?;
    check_len("baseline length", scenarios.num_scenarios(), opt.len())?;
    check_len("weight vector", scenarios.num_scenarios(), weights.len())?;
    if !weights.is_non_increasing() {
        return Err(Error::WeightsNotNonIncreasing("branch-and-bound"));
    }
    let start = Instant::now();
    let search = Search {
        prob,
        scenarios,
        opt,
        weights,
        mean: scenarios.mean_scenario(),
        mean_opt: opt.iter().sum::<f64>() / opt.len() as f64,
    };

    let mut nodes = 0u64;
    let mut violations = 0u64;
    let mut seq = 0u64;
    let check = options.check_bounds;
    let mut evaluate = |x: &Solution, bound: f64, violations: &mut u64| -> Result<f64> {
        nodes += 1;
        let value = owar(x, search.scenarios, search.opt, search.weights)?;
        if check && bound > value + TIE_TOL {
            *violations += 1;
        }
        Ok(value)
    };

    let root_fixes = vec![Fix::Free; prob.n()];
    let (root_x, root_bound) = search.complete(&root_fixes).expect("selection problem is feasible");
    // the root completion is the midpoint-scenario solution
    let mut best_value = evaluate(&root_x, root_bound, &mut violations)?;
    let mut best_x = root_x.clone();

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: root_bound,
        seq,
        fixes: root_fixes,
        completion: root_x,
    });

    while let Some(node) = heap.pop() {
        if node.bound >= best_value - TIE_TOL {
            break;
        }
        let mut fixes = node.fixes.clone();
        for i in 0..fixes.len() {
            if fixes[i] != Fix::Free {
                continue;
            }
            let keep = if node.completion.get(i) { Fix::In } else { Fix::Out };
            let flip = if keep == Fix::In { Fix::Out } else { Fix::In };
            fixes[i] = flip;
            if let Some((x, bound)) = search.complete(&fixes) {
                if check && bound < node.bound - TIE_TOL {
                    violations += 1;
                }
                let value = evaluate(&x, bound, &mut violations)?;
                if value < best_value - TIE_TOL {
                    best_value = value;
                    best_x = x.clone();
                }
                if bound < best_value - TIE_TOL {
                    seq += 1;
                    heap.push(Node {
                        bound,
                        seq,
                        fixes: fixes.clone(),
                        completion: x,
                    });
                }
            }
            fixes[i] = keep;
        }
    }

    Ok(SolveReport {
        objective: best_value,
        solution: best_x,
        nodes,
        millis: start.elapsed(),
        optimal: true,
        nominal_solves: nodes,
        bound_violations: violations,
    })
}
