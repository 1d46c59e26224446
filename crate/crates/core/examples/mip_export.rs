//! Writes the dualized MIP in LP format and checks an optimal assignment
//! against it.

use owar::exact::{build_mip, certified_assignment, parse_lp, solve_enumeration, write_lp};
use owar::io::Instance;
use owar::oracles::opt_per_scenario;

fn main() -> owar::Result<()> {
    let inst = Instance::worked_example();
    let u = &inst.scenarios;
    let w = inst.weights.clone().expect("bundled weights");
    let opt = opt_per_scenario(&inst.problem, u)?;

    let model = build_mip(&inst.problem, u, &opt, &w)?;
    let text = write_lp(&model);
    print!("{text}");

    let back = parse_lp(&text)?;
    assert_eq!(back.coefficient_multiset(), model.coefficient_multiset());

    let best = solve_enumeration(&inst.problem, u, &opt, &w)?;
    let values = certified_assignment(&model, &best.solution, u, &opt, &w)?;
    println!(
        "\\ optimum {:?}: objective {} with {} violated rows",
        best.solution.to_bits(),
        model.objective_value(&values),
        model.violated(&values, 1e-9).len()
    );
    Ok(())
}
