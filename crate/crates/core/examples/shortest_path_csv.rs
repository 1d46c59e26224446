//! Robust shortest path from arc and cost CSV files.

use std::fs;

use owar::criteria::WeightVector;
use owar::exact::solve_enumeration;
use owar::io::read_graph_csv;
use owar::oracles::opt_per_scenario;

const ARCS: &str = "tail,head
0,1
0,2
1,2
1,3
2,3
";

// one scenario per row, one column per arc
const COSTS: &str = "scenario,c_1,c_2,c_3,c_4,c_5
1,2,5,1,6,2
2,6,2,1,2,7
3,3,3,4,4,3
";

fn main() -> owar::Result<()> {
    let dir = std::env::temp_dir().join("owar_shortest_path");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("arcs.csv"), ARCS)?;
    fs::write(dir.join("costs.csv"), COSTS)?;

    let inst = read_graph_csv(dir.join("arcs.csv"), dir.join("costs.csv"), 0, 3)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;
    println!("opt per scenario: {opt:?}");

    for w in [vec![1.0, 0.0, 0.0], vec![0.5, 0.3, 0.2], vec![1.0; 3], vec![0.0, 0.0, 1.0]] {
        let w = WeightVector::normalize(w)?;
        let rep = solve_enumeration(&inst.problem, u, &opt, &w)?;
        println!("w = {:?}: arcs {:?} OWAR {:.3}", w.as_slice(), rep.solution.to_bits(), rep.objective);
    }
    Ok(())
}
