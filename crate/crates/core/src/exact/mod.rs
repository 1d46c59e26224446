//! Exact minimization of OWAR over the feasible set.

mod branch_bound;
mod lp;
mod mip;
mod risk_affine;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::criteria::{owar, ScenarioSet, Solution, WeightVector};
use crate::error::{check_len, Result};
use crate::oracles::NominalOracle;

pub use branch_bound::{solve_branch_bound, solve_branch_bound_with, BranchBoundOptions};
pub use lp::{export_lp, parse_lp, read_solution_file, write_lp};
pub use mip::{build_mip, certified_assignment, dual_certificate, solution_from_values, Constraint, MipModel, VarKind, Variable};
pub use risk_affine::{solve_risk_affine, RISK_AFFINE_MAX_L};

/// Absolute slack under which a later candidate does not displace the incumbent.
pub const TIE_TOL: f64 = 1e-9;

/// Outcome of an exact solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    pub solution: Solution,
    /// Branch-and-bound nodes, or candidate solutions scanned for enumeration.
    pub nodes: u64,
    #[serde(with = "millis")]
    pub millis: Duration,
    pub optimal: bool,
    /// Nominal problems solved along the way.
    #[serde(skip)]
    pub nominal_solves: u64,
    /// Nodes whose lower bound exceeded the OWAR of their own solution.
    #[serde(skip)]
    pub bound_violations: u64,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

/// First minimizer of `objective` over the enumerated feasible set.
///
/// A candidate replaces the incumbent only if it is better by more than
/// [`TIE_TOL`], so ties go to the earliest solution in enumeration order.
pub fn minimize_by_enumeration<F>(oracle: &dyn NominalOracle, mut objective: F) -> Result<(Solution, f64, u64)>
where
    F: FnMut(&Solution) -> Result<f64>,
{
    let mut best: Option<(Solution, f64)> = None;
    let mut scanned = 0u64;
    for x in oracle.enumerate()? {
        scanned += 1;
        let v = objective(&x)?;
        match &best {
            Some((_, b)) if v >= b - TIE_TOL => {}
            _ => best = Some((x, v)),
        }
    }
    let (x, v) = best.ok_or_else(|| crate::Error::Precondition("feasible set is empty".into()))?;
    Ok((x, v, scanned))
}

/// Exact OWAR optimum by scanning every feasible solution.
pub fn solve_enumeration(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
) -> Result<SolveReport> {
    check_len("scenario width", oracle.num_items(), scenarios.num_items())?;
    check_len("weight vector", scenarios.num_scenarios(), weights.len())?;
    let start = Instant::now();
    let (solution, objective, scanned) = minimize_by_enumeration(oracle, |x| owar(x, scenarios, opt, weights))?;
    Ok(SolveReport {
        objective,
        solution,
        nodes: scanned,
        millis: start.elapsed(),
        optimal: true,
        nominal_solves: 0,
        bound_violations: 0,
    })
}
