//! Compact mixed-integer model for OWAR with non-increasing weights.
//!
//! For non-increasing `w` the OWA of the regret vector is the value of an
//! assignment problem (maximize over permutations). Its LP dual has one free
//! variable per scenario (`a_k`) and one per weight position (`b_j`):
//!
//! ```text
//! min  Σ_k a_k + b_k
//! s.t. a_k + b_j - w_j Σ_i c^k_i x_i >= -w_j opt_k    for all j, k
//!      x ∈ X
//! ```
//!
//! The model is only ever exported; [`dual_certificate`] gives an explicit
//! optimal `(a, b)` for fixed `x` so the formulation can be checked without an
//! LP solver.

use std::collections::HashMap;

use crate::criteria::{descending_order, regret_vector, ScenarioSet, Solution, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::oracles::{NominalOracle, RowSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    /// Continuous and unbounded in both directions.
    Free,
    /// Continuous with the LP-format default bounds `[0, ∞)`.
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, no zero coefficients.
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A minimization model with linear objective and constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MipModel {
    variables: Vec<Variable>,
    names: HashMap<String, usize>,
    objective: Vec<(usize, f64)>,
    constraints: Vec<Constraint>,
}

impl MipModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind) -> Result<usize> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::InvalidParameter(format!("duplicate variable {name}")));
        }
        let idx = self.variables.len();
        self.names.insert(name.clone(), idx);
        self.variables.push(Variable { name, kind });
        Ok(idx)
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>) {
        self.objective = terms.into_iter().filter(|&(_, c)| c != 0.0).collect();
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<()> {
        if let Some(&(v, _)) = terms.iter().find(|&&(v, _)| v >= self.variables.len()) {
            return Err(Error::InvalidParameter(format!("constraint references unknown variable {v}")));
        }
        self.constraints.push(Constraint {
            name: name.into(),
            terms: terms.into_iter().filter(|&(_, c)| c != 0.0).collect(),
            sense,
            // normalizes -0.0
            rhs: rhs + 0.0,
        });
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    /// Constraint names starting with `reg_`.
    pub fn regret_constraint_count(&self) -> usize {
        self.constraints.iter().filter(|c| c.name.starts_with("reg_")).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Names of constraints violated by `values` beyond `tol`.
    pub fn violated(&self, values: &[f64], tol: f64) -> Vec<&str> {
        self.constraints
            .iter()
            .filter(|c| {
                let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v]).sum();
                match c.sense {
                    RowSense::Le => lhs > c.rhs + tol,
                    RowSense::Ge => lhs < c.rhs - tol,
                    RowSense::Eq => (lhs - c.rhs).abs() > tol,
                }
            })
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Sorted `(row, variable, coefficient)` triples; the objective row is `""`.
    pub fn coefficient_multiset(&self) -> Vec<(String, String, u64)> {
        let mut out: Vec<_> = self
            .objective
            .iter()
            .map(|&(v, c)| (String::new(), self.variables[v].name.clone(), c.to_bits()))
            .chain(self.constraints.iter().flat_map(|con| {
                con.terms
                    .iter()
                    .map(|&(v, c)| (con.name.clone(), self.variables[v].name.clone(), c.to_bits()))
            }))
            .collect();
        out.sort();
        out
    }
}

pub(crate) fn item_var(i: usize) -> String {
    format!("x{}", i + 1)
}

pub(crate) fn alpha_var(k: usize) -> String {
    format!("a{}", k + 1)
}

pub(crate) fn beta_var(j: usize) -> String {
    format!("b{}", j + 1)
}

/// Builds the dualized model. Variables are ordered `x1..xn, a1..aK, b1..bK`.
pub fn build_mip(
    oracle: &dyn NominalOracle,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
) -> Result<MipModel> {
    let n = scenarios.num_items();
    let k = scenarios.num_scenarios();
    check_len("scenario width", oracle.num_items(), n)?;
    check_len("baseline length", k, opt.len())?;
    check_len("weight vector", k, weights.len())?;
    if !weights.is_non_increasing() {
        return Err(Error::WeightsNotNonIncreasing("the dualized MIP"));
    }
    let rows = oracle
        .linear_description()
        .ok_or_else(|| Error::Unsupported("oracle has no linear description of its feasible set".into()))?;

    let mut model = MipModel::new();
    let xs: Vec<usize> = (0..n)
        .map(|i| model.add_variable(item_var(i), VarKind::Binary))
        .collect::<Result<_>>()?;
    let alphas: Vec<usize> = (0..k)
        .map(|s| model.add_variable(alpha_var(s), VarKind::Free))
        .collect::<Result<_>>()?;
    let betas: Vec<usize> = (0..k)
        .map(|j| model.add_variable(beta_var(j), VarKind::Free))
        .collect::<Result<_>>()?;
    model.set_objective(alphas.iter().chain(&betas).map(|&v| (v, 1.0)).collect());

    let w = weights.as_slice();
    for j in 0..k {
        for s in 0..k {
            let mut terms = vec![(alphas[s], 1.0), (betas[j], 1.0)];
            terms.extend(
                scenarios
                    .scenario(s)
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (xs[i], -w[j] * c)),
            );
            model.add_constraint(format!("reg_{}_{}", j + 1, s + 1), terms, RowSense::Ge, -w[j] * opt[s])?;
        }
    }
    for (r, row) in rows.into_iter().enumerate() {
        let terms = row.terms.into_iter().map(|(i, c)| (xs[i], c)).collect();
        model.add_constraint(format!("feas_{}", r + 1), terms, row.sense, row.rhs)?;
    }
    Ok(model)
}

/// Optimal dual values `(a, b)` of the inner assignment LP for regrets `r`.
///
/// With `d_m = w_m - w_{m+1}` and `t_m` the m-th largest regret,
/// `a_k = Σ_m d_m (r_k - t_m)^+` and `b_j = Σ_{m >= j} d_m t_m`. The point is
/// feasible for every `(j, k)` row and its objective equals `OWA_w(r)`.
pub fn dual_certificate(regrets: &[f64], weights: &WeightVector) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("regret vector", weights.len(), regrets.len())?;
    if !weights.is_non_increasing() {
        return Err(Error::WeightsNotNonIncreasing("the dual certificate"));
    }
    let w = weights.as_slice();
    let k = w.len();
    let sorted: Vec<f64> = descending_order(regrets).into_iter().map(|i| regrets[i]).collect();
    let d: Vec<f64> = (0..k).map(|m| w[m] - w.get(m + 1).copied().unwrap_or(0.0)).collect();
    let alpha = regrets
        .iter()
        .map(|&r| (0..k).map(|m| d[m] * (r - sorted[m]).max(0.0)).sum())
        .collect();
    let mut beta = vec![0.0; k];
    let mut acc = 0.0;
    for j in (0..k).rev() {
        acc += d[j] * sorted[j];
        beta[j] = acc;
    }
    Ok((alpha, beta))
}

/// Full variable assignment for `x` with its dual certificate.
pub fn certified_assignment(
    model: &MipModel,
    x: &Solution,
    scenarios: &ScenarioSet,
    opt: &[f64],
    weights: &WeightVector,
) -> Result<Vec<f64>> {
    let r = regret_vector(x, scenarios, opt)?;
    let (alpha, beta) = dual_certificate(&r.regrets, weights)?;
    let mut values = vec![0.0; model.variables().len()];
    for i in x.selected() {
        values[model.variable_index(&item_var(i)).expect("item variable")] = 1.0;
    }
    for (s, a) in alpha.iter().enumerate() {
        values[model.variable_index(&alpha_var(s)).expect("alpha variable")] = *a;
    }
    for (j, b) in beta.iter().enumerate() {
        values[model.variable_index(&beta_var(j)).expect("beta variable")] = *b;
    }
    Ok(values)
}

/// Item incidence read from a solver's variable values (`x1..xn`, rounded).
///
/// Missing item variables count as zero.
pub fn solution_from_values(n: usize, values: &HashMap<String, f64>) -> Result<Solution> {
    let mut incidence = Vec::with_capacity(n);
    for i in 0..n {
        let v = values.get(&item_var(i)).copied().unwrap_or(0.0);
        if (v - v.round()).abs() > 1e-6 || !(-1e-6..=1.0 + 1e-6).contains(&v) {
            return Err(Error::InvalidSolution(format!("{} = {v} is not binary", item_var(i))));
        }
        incidence.push(v.round() == 1.0);
    }
    Ok(Solution::new(incidence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{owa, owa_by_permutation_oracle, owar};
    use crate::oracles::{opt_per_scenario, ExplicitOracle, SelectionProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn selection_instance() -> (SelectionProblem, ScenarioSet, Vec<f64>) {
        let prob = SelectionProblem::new(3, 1).unwrap();
        let u = ScenarioSet::new(vec![vec![10.0, 6.0, 9.0], vec![1.0, 7.0, 4.0], vec![1.0, 3.0, 3.0]]).unwrap();
        let opt = opt_per_scenario(&prob, &u).unwrap();
        (prob, u, opt)
    }

    #[test]
    fn model_counts() {
        let (prob, u, opt) = selection_instance();
        let w = WeightVector::new(vec![0.6, 0.2, 0.2]).unwrap();
        let m = build_mip(&prob, &u, &opt, &w).unwrap();
        assert_eq!(m.variables().len(), 3 + 6);
        assert_eq!(m.regret_constraint_count(), 9);
        assert_eq!(m.constraints().len(), 10);
        assert_eq!(m.objective().len(), 6);
        let c = &m.constraints()[0];
        assert_eq!(c.name, "reg_1_1");
        assert_eq!(c.rhs, -0.6 * 6.0);
    }

    #[test]
    fn certificate_on_worked_example() {
        let (prob, u, opt) = selection_instance();
        let w = WeightVector::new(vec![0.6, 0.2, 0.2]).unwrap();
        let m = build_mip(&prob, &u, &opt, &w).unwrap();
        let x1 = Solution::from_indices(3, [0]).unwrap();
        let values = certified_assignment(&m, &x1, &u, &opt, &w).unwrap();
        assert!(m.violated(&values, 1e-9).is_empty());
        assert!((m.objective_value(&values) - 2.4).abs() < 1e-12);
        let r = regret_vector(&x1, &u, &opt).unwrap();
        assert!((owa_by_permutation_oracle(&r.regrets, &w).unwrap() - 2.4).abs() < 1e-12);
    }

    #[test]
    fn certificate_is_feasible_and_tight_on_random_regrets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let k = rng.random_range(1..=6);
            let r: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..20.0)).collect();
            let mut raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
            raw.sort_by(|a, b| b.total_cmp(a));
            let w = WeightVector::normalize(raw).unwrap();
            let (alpha, beta) = dual_certificate(&r, &w).unwrap();
            for j in 0..k {
                for s in 0..k {
                    assert!(alpha[s] + beta[j] >= w.as_slice()[j] * r[s] - 1e-9);
                }
            }
            let obj: f64 = alpha.iter().chain(&beta).sum();
            let primal = owa_by_permutation_oracle(&r, &w).unwrap();
            assert!((obj - primal).abs() < 1e-9);
            assert!((owa(&r, &w).unwrap() - primal).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_weights_have_simple_feasible_point() {
        let (prob, u, opt) = selection_instance();
        let w = WeightVector::uniform(3).unwrap();
        let m = build_mip(&prob, &u, &opt, &w).unwrap();
        let x = Solution::from_indices(3, [2]).unwrap();
        let r = regret_vector(&x, &u, &opt).unwrap().regrets;
        let mut values = vec![0.0; m.variables().len()];
        values[m.variable_index("x3").unwrap()] = 1.0;
        for (s, rs) in r.iter().enumerate() {
            values[m.variable_index(&alpha_var(s)).unwrap()] = rs / 3.0;
        }
        assert!(m.violated(&values, 1e-9).is_empty());
        assert!((m.objective_value(&values) - owar(&x, &u, &opt, &w).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn build_errors() {
        let (prob, u, opt) = selection_instance();
        let inc = WeightVector::new(vec![0.2, 0.2, 0.6]).unwrap();
        assert!(matches!(
            build_mip(&prob, &u, &opt, &inc),
            Err(Error::WeightsNotNonIncreasing(_))
        ));
        let explicit = ExplicitOracle::new(prob.enumerate().unwrap()).unwrap();
        let w = WeightVector::uniform(3).unwrap();
        assert!(matches!(build_mip(&explicit, &u, &opt, &w), Err(Error::Unsupported(_))));
        let mut m = MipModel::new();
        m.add_variable("y", VarKind::Free).unwrap();
        assert!(m.add_variable("y", VarKind::Binary).is_err());
        assert!(m.add_constraint("c", vec![(3, 1.0)], RowSense::Le, 0.0).is_err());
    }
}
