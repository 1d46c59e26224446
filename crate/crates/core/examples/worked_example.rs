//! Three alternatives, three scenarios: OWA, min-max regret and OWAR each
//! prefer a different alternative.

use owar::criteria::{minmax_regret, owa, owar, regret_vector, value_vector};
use owar::io::Instance;
use owar::oracles::{opt_per_scenario, NominalOracle};

fn main() -> owar::Result<()> {
    let inst = Instance::worked_example();
    let u = &inst.scenarios;
    let w = inst.weights.clone().expect("bundled weights");
    let opt = opt_per_scenario(&inst.problem, u)?;
    println!("opt per scenario: {opt:?}");
    println!("weights: {:?}\n", w.as_slice());

    println!("{:<4} {:>16} {:>6} {:>16} {:>10} {:>6}", "x", "values", "OWA", "regrets", "max regret", "OWAR");
    for (i, x) in inst.problem.enumerate()?.iter().enumerate() {
        let v = value_vector(x, u)?;
        let r = regret_vector(x, u, &opt)?;
        println!(
            "x{:<3} {:>16} {:>6.1} {:>16} {:>10.1} {:>6.1}",
            i + 1,
            format!("{v:?}"),
            owa(&v, &w)?,
            format!("{:?}", r.regrets),
            minmax_regret(x, u, &opt)?,
            owar(x, u, &opt, &w)?,
        );
    }
    Ok(())
}
