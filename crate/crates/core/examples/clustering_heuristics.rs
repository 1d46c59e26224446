//! Reduces 20 scenarios to a handful with k-means and compares the heuristic
//! variants against the exact optimum.

use owar::aggregation::{solve_aggregated, HeuristicConfig, Variant};
use owar::exact::solve_branch_bound;
use owar::experiments::{make_weights, ProblemSource, WeightSpec};
use owar::oracles::opt_per_scenario;

fn main() -> owar::Result<()> {
    let k = 20;
    let inst = ProblemSource::Selection { n: 12, p: 6 }.generate(k, 1, 100, 3)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;
    let w = make_weights(&WeightSpec::alpha(0.05, k))?;
    let exact = solve_branch_bound(&inst.problem, u, &opt, &w)?.objective;
    println!("exact OWAR {exact:.2}\n");

    print!("{:>3}", "K'");
    for v in Variant::ALL {
        print!(" {:>8}", v.label());
    }
    println!();
    for k_prime in [2, 4, 8, 16, 20] {
        print!("{k_prime:>3}");
        for v in Variant::ALL {
            let out = solve_aggregated(&inst.problem, u, &opt, &w, &HeuristicConfig::new(k_prime, v, 1), Some(exact))?;
            print!(" {:>8.4}", out.ratio.unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
