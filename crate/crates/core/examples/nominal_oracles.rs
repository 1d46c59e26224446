//! The nominal problems the toolkit ships with.

use owar::criteria::Solution;
use owar::experiments::grid_graph;
use owar::oracles::{ExplicitOracle, NominalOracle, SelectionProblem};

fn main() -> owar::Result<()> {
    // pick the 2 cheapest of 5 items
    let sel = SelectionProblem::new(5, 2)?;
    let (x, v) = sel.solve(&[4.0, 1.0, 3.0, 5.0, 2.0])?;
    println!("selection: {:?} cost {v}, |X| = {}", x.to_bits(), sel.cardinality());

    // 3x3 grid, arcs right and down, corner to corner
    let g = grid_graph(3, 3)?;
    let costs: Vec<f64> = (0..g.num_items()).map(|a| 1.0 + (a % 3) as f64).collect();
    let (path, len) = g.solve(&costs)?;
    println!(
        "shortest path: nodes {:?} length {len}, {} paths in total",
        g.path_nodes(&path).unwrap_or_default(),
        g.enumerate()?.len()
    );

    // any finite list of solutions
    let ex = ExplicitOracle::new(vec![
        Solution::from_bits(&[1, 0, 1])?,
        Solution::from_bits(&[0, 1, 1])?,
    ])?;
    let (x, v) = ex.solve(&[3.0, 1.0, 2.0])?;
    println!("explicit: {:?} cost {v}", x.to_bits());
    Ok(())
}
