//! Cross-evaluates min-max regret, OWAR and OWA criteria on random selection
//! instances and writes the matrix as CSV and SVG to the temp directory.

use owar::experiments::{run_experiment1, Experiment1Config};
use owar::report::{emit_heatmap_svg, CsvTable};

fn main() -> owar::Result<()> {
    let cfg = Experiment1Config {
        repetitions: 10,
        ..Default::default()
    };
    let m = run_experiment1(&cfg)?;

    print!("{:>8}", "");
    for l in &m.labels {
        print!(" {l:>7}");
    }
    println!(" {:>7}", "avg");
    for ((l, row), avg) in m.labels.iter().zip(&m.normalized).zip(&m.row_averages) {
        print!("{l:>8}");
        for v in row {
            print!(" {v:>7.3}");
        }
        println!(" {avg:>7.3}");
    }

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("owar_matrix.csv"), m.to_csv()?)?;
    emit_heatmap_svg(&m, dir.join("owar_heatmap.svg"))?;
    println!("\nwrote owar_matrix.csv and owar_heatmap.svg to {}", dir.display());
    Ok(())
}
