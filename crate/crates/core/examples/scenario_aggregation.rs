//! Block aggregation: averaging consecutive scenarios gives a lower bound
//! that is at most a factor `ell * rho` away.

use owar::aggregation::{block_aggregate, sandwich_check};
use owar::experiments::{make_weights, ProblemSource, WeightSpec};
use owar::oracles::{opt_per_scenario, NominalOracle};

fn main() -> owar::Result<()> {
    let inst = ProblemSource::Selection { n: 8, p: 4 }.generate(12, 1, 100, 7)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;
    let w = make_weights(&WeightSpec::alpha(0.2, 12))?;
    let x = &inst.problem.enumerate()?[17];

    println!("{:>3} {:>6} {:>9} {:>9} {:>9}", "ell", "rho", "lower", "owar", "upper");
    for ell in [1, 2, 3, 4, 6, 12] {
        let agg = block_aggregate(u, &opt, &w, ell)?;
        let b = sandwich_check(x, u, &opt, &w, &agg)?;
        println!(
            "{ell:>3} {:>6.3} {:>9.3} {:>9.3} {:>9.3}",
            agg.rho.unwrap_or(f64::NAN),
            b.lower,
            b.mid,
            b.upper
        );
    }
    Ok(())
}
