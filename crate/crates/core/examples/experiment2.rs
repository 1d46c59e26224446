//! Approximation ratios of the clustering heuristics along a sweep of the
//! weight parameter alpha.

use owar::experiments::{run_experiment2, Experiment2Config, SweepParam};
use owar::report::CsvTable;

fn main() -> owar::Result<()> {
    let mut cfg = Experiment2Config {
        sweep: SweepParam::Alpha,
        repetitions: 10,
        ..Default::default()
    };
    cfg.values = cfg.default_values();
    let t = run_experiment2(&cfg)?;
    print!("{}", t.to_csv()?);

    let worst = t.max.iter().flatten().copied().fold(1.0, f64::max);
    println!("\nworst single ratio: {worst:.4}");
    Ok(())
}
