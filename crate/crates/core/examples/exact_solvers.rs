//! Exact OWAR optima by enumeration, branch-and-bound and the risk-affine
//! solver, next to the midpoint heuristic.

use owar::aggregation::midpoint_solution;
use owar::criteria::{owar, WeightVector};
use owar::exact::{solve_branch_bound, solve_enumeration, solve_risk_affine};
use owar::experiments::{make_weights, ProblemSource, WeightSpec};
use owar::oracles::opt_per_scenario;

fn main() -> owar::Result<()> {
    let inst = ProblemSource::Selection { n: 14, p: 7 }.generate(8, 1, 100, 42)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;

    let w = make_weights(&WeightSpec::alpha(0.3, 8))?;
    let en = solve_enumeration(&inst.problem, u, &opt, &w)?;
    let bb = solve_branch_bound(&inst.problem, u, &opt, &w)?;
    println!("enumeration      {:>8.2}  {:>5} solutions  {:?}", en.objective, en.nodes, en.millis);
    println!("branch-and-bound {:>8.2}  {:>5} nodes      {:?}", bb.objective, bb.nodes, bb.millis);

    let mid = midpoint_solution(&inst.problem, u)?;
    let v = owar(&mid, u, &opt, &w)?;
    println!("midpoint         {v:>8.2}  ratio {:.3}, bound {:.3}", v / en.objective, w.first() * 8.0);

    // only the two best-case scenarios count
    let ra_w = WeightVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.6])?;
    let ra = solve_risk_affine(&inst.problem, u, &opt, &ra_w, 2)?;
    let check = solve_enumeration(&inst.problem, u, &opt, &ra_w)?;
    println!(
        "risk-affine      {:>8.2}  {} nominal solves (enumeration {:.2})",
        ra.objective, ra.nominal_solves, check.objective
    );
    Ok(())
}
