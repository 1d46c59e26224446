//! Polynomial algorithm for risk-affine weights with few non-zero entries.
//!
//! For non-decreasing weights the OWA equals the minimum over permutations of
//! the weighted sum, so with only the last `L` weights non-zero the optimum is
//! the best nominal solve over every ordered choice of `L` scenarios.

use std::time::Instant;

use super::{SolveReport, TIE_TOL};
use crate::criteria::{for_each_permutation, ScenarioSet, Solution, WeightVector, MONOTONE_TOL};
use crate::error::{check_len, Error, Result};
use crate::oracles::NominalOracle;

/// Largest number of non-zero weights accepted.
pub const RISK_AFFINE_MAX_L: usize = 3;

fn for_each_combination(k: usize, l: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut combo: Vec<usize> = (0..l).collect();
    loop {
        f(&combo)?;
        let mut i = l;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if combo[i] < k - l + i {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..l {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Exact OWAR optimum for `w` non-decreasing with `w_1 = ... = w_{K-L} = 0`.
///
/// Performs exactly `C(K, L) · L!` nominal solves.
pub fn solve_risk_affine(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
    l: usize,
) -> Result<SolveReport> {
    let k = scenarios.num_scenarios();
    let n = scenarios.num_items();
    check_len("scenario width", oracle.num_items(), n)?;
    check_len("baseline length", k, opt.len())?;
    check_len("weight vector", k, weights.len())?;
    if l > RISK_AFFINE_MAX_L {
        return Err(Error::TooLarge {
            what: "L for the risk-affine solver",
            value: l,
            limit: RISK_AFFINE_MAX_L,
        });
    }
    if l == 0 || l > k {
        return Err(Error::InvalidParameter(format!("L must lie in 1..={k}, got {l}")));
    }
    let w = weights.as_slice();
    if !weights.is_non_decreasing() || w[..k - l].iter().any(|&wi| wi > MONOTONE_TOL) {
        return Err(Error::NotRiskAffine(l));
    }
    let tail = &w[k - l..];

    let start = Instant::now();
    let mut solves = 0u64;
    let mut best: Option<(Solution, f64)> = None;
    let mut combined = vec![0.0; n];
    for_each_combination(k, l, |subset| {
        let mut outcome = Ok(());
        for_each_permutation(l, |perm| {
            if outcome.is_err() {
                return;
            }
            combined.iter_mut().for_each(|c| *c = 0.0);
            let mut offset = 0.0;
            for (pos, &s) in subset.iter().enumerate() {
                let wk = tail[perm[pos]];
                for (c, cs) in combined.iter_mut().zip(scenarios.scenario(s)) {
                    *c += wk * cs;
                }
                offset += wk * opt[s];
            }
            solves += 1;
            match oracle.solve(&combined) {
                Ok((x, value)) => {
                    let v = value - offset;
                    if best.as_ref().is_none_or(|(_, b)| v < b - TIE_TOL) {
                        best = Some((x, v));
                    }
                }
                Err(e) => outcome = Err(e),
            }
        });
        outcome
    })?;
    let (solution, objective) = best.expect("at least one subset");
    Ok(SolveReport {
        objective,
        solution,
        nodes: solves,
        millis: start.elapsed(),
        optimal: true,
        nominal_solves: solves,
        bound_violations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::owar;
    use crate::exact::solve_enumeration;
    use crate::oracles::{binomial, opt_per_scenario, ExplicitOracle, SelectionProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn worked() -> (ExplicitOracle, ScenarioSet, Vec<f64>) {
        let xs = (0..3).map(|i| Solution::from_indices(3, [i]).unwrap()).collect();
        let oracle = ExplicitOracle::new(xs).unwrap();
        let u = ScenarioSet::new(vec![vec![10.0, 6.0, 9.0], vec![1.0, 7.0, 4.0], vec![1.0, 3.0, 3.0]]).unwrap();
        (oracle, u, vec![6.0, 1.0, 1.0])
    }

    #[test]
    fn min_min_regret_is_zero() {
        let (oracle, u, opt) = worked();
        let w = WeightVector::new(vec![0.0, 0.0, 1.0]).unwrap();
        let rep = solve_risk_affine(&oracle, &u, &opt, &w, 1).unwrap();
        assert_eq!(rep.objective, 0.0);
        assert_eq!(rep.nominal_solves, 3);
        // first zero-regret pick is x^2 in scenario 1
        assert_eq!(rep.solution, Solution::from_indices(3, [1]).unwrap());
    }

    #[test]
    fn two_nonzero_weights_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let prob = SelectionProblem::new(6, 2).unwrap();
        for _ in 0..20 {
            let rows = (0..4).map(|_| (0..6).map(|_| rng.random_range(1..=50) as f64).collect()).collect();
            let u = ScenarioSet::new(rows).unwrap();
            let opt = opt_per_scenario(&prob, &u).unwrap();
            let a: f64 = rng.random_range(0.0..0.5);
            let w = WeightVector::new(vec![0.0, 0.0, a, 1.0 - a]).unwrap();
            let ra = solve_risk_affine(&prob, &u, &opt, &w, 2).unwrap();
            let en = solve_enumeration(&prob, &u, &opt, &w).unwrap();
            assert!((ra.objective - en.objective).abs() < 1e-9);
            assert!((owar(&ra.solution, &u, &opt, &w).unwrap() - ra.objective).abs() < 1e-9);
            assert_eq!(ra.nominal_solves as u128, binomial(4, 2) * 2);
        }
    }

    #[test]
    fn rejects_weights_outside_the_class() {
        let (oracle, u, opt) = worked();
        let averse = WeightVector::new(vec![0.6, 0.2, 0.2]).unwrap();
        assert!(matches!(
            solve_risk_affine(&oracle, &u, &opt, &averse, 2),
            Err(Error::NotRiskAffine(2))
        ));
        let three = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            solve_risk_affine(&oracle, &u, &opt, &three, 2),
            Err(Error::NotRiskAffine(2))
        ));
        assert!(solve_risk_affine(&oracle, &u, &opt, &three, 3).is_ok());
        assert!(matches!(
            solve_risk_affine(&oracle, &u, &opt, &three, 4),
            Err(Error::TooLarge { .. })
        ));
    }
}
