//! Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::aggregation::{
    block_aggregate, midpoint_solution, sandwich_check, solve_aggregated, HeuristicConfig, Variant,
};
use crate::criteria::{owar, ScenarioSet, WeightVector};
use crate::exact::{
    build_mip, read_solution_file, solution_from_values, solve_branch_bound, solve_enumeration, solve_risk_affine,
    write_lp, SolveReport,
};
use crate::experiments::{
    make_weights, run_experiment1, run_experiment2, ExactMethod, Experiment1Config, Experiment2Config, ProblemSource,
    SweepParam, WeightKind, WeightSpec,
};
use crate::io::{read_graph_csv, read_scenarios_csv_file, write_scenarios_csv, Instance, Problem};
use crate::oracles::{opt_per_scenario, NominalOracle, SelectionProblem};
use crate::report::{heatmap_svg, CsvTable};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "owar", version, about = "OWA regret solvers, scenario aggregation and experiments")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Master seed for generators, clustering and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for exp1).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Large settings (n=40, p=20, K=50); exact optima come from an external MIP solver via LP files.
    #[arg(long, global = true)]
    paper_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance exactly or with the midpoint heuristic.
    Solve(SolveArgs),
    /// Run a clustering heuristic or block aggregation on an instance.
    Aggregate(AggregateArgs),
    /// Criterion cross-comparison (performance matrix).
    Exp1(Exp1Args),
    /// Heuristic approximation ratios along a parameter sweep.
    Exp2(Exp2Args),
    /// Write the dualized MIP of an instance in LP format.
    ExportLp(ExportArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with_all = ["scenarios", "arcs"])]
    instance: Option<PathBuf>,
    /// Scenario CSV for a selection problem (with --select).
    #[arg(long, requires = "select")]
    scenarios: Option<PathBuf>,
    /// Number of items to select.
    #[arg(long)]
    select: Option<usize>,
    /// Arc CSV (tail,head) for a shortest-path problem (with --costs).
    #[arg(long, requires = "costs")]
    arcs: Option<PathBuf>,
    /// Arc cost scenario CSV.
    #[arg(long)]
    costs: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    source: usize,
    /// Target node; defaults to the largest node id.
    #[arg(long)]
    target: Option<usize>,
}

#[derive(Args, Debug)]
struct WeightArgs {
    /// Explicit weights, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with_all = ["top_k", "alpha"])]
    weights: Option<Vec<f64>>,
    /// Rescale --weights to sum to one.
    #[arg(long, requires = "weights")]
    normalize: bool,
    /// First k weights 1/k.
    #[arg(long, conflicts_with = "alpha")]
    top_k: Option<usize>,
    /// Generator weights with parameter alpha.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Enum,
    Bb,
    RiskAffine,
    Midpoint,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, value_enum, default_value_t = Method::Enum)]
    method: Method,
    /// Number of non-zero weights for risk-affine (default: counted).
    #[arg(long)]
    l: Option<usize>,
    /// With --paper-scale: solver solution file to import.
    #[arg(long)]
    sol: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value = "K-OO-DW")]
    variant: Variant,
    /// Number of reduced scenarios.
    #[arg(long, default_value_t = 2)]
    k_prime: usize,
    /// Block aggregation with this block size instead of clustering.
    #[arg(long, conflicts_with = "variant")]
    block: Option<usize>,
    /// Also compute the exact optimum and report the ratio.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExpMethod {
    Enum,
    Bb,
}

impl ExpMethod {
    fn method(self) -> ExactMethod {
        match self {
            ExpMethod::Enum => ExactMethod::Enumeration,
            ExpMethod::Bb => ExactMethod::BranchBound,
        }
    }
}

#[derive(Args, Debug)]
struct Exp1Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    /// Number of scenarios.
    #[arg(long)]
    k: Option<usize>,
    /// Top-k grid for the OWAR and OWA criteria.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Shortest paths on a ROWSxCOLS grid instead of selection.
    #[arg(long, value_parser = parse_grid)]
    graph: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1)]
    low: u32,
    #[arg(long, default_value_t = 100)]
    high: u32,
    #[arg(long, value_enum, default_value_t = ExpMethod::Enum)]
    method: ExpMethod,
}

#[derive(Args, Debug)]
struct Exp2Args {
    #[arg(long, default_value = "Kprime")]
    sweep: SweepParam,
    /// Sweep points (default: derived from the base parameters).
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_prime: Option<usize>,
    /// Base weights from the alpha generator (default 0.05).
    #[arg(long, conflicts_with = "top_k")]
    alpha: Option<f64>,
    /// Base top-k weights.
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<Variant>>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value_t = 1)]
    low: u32,
    #[arg(long, default_value_t = 100)]
    high: u32,
    #[arg(long, value_enum, default_value_t = ExpMethod::Bb)]
    method: ExpMethod,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Selection,
    Grid,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Selection)]
    kind: GenKind,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    /// Number of scenarios.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    low: u32,
    #[arg(long, default_value_t = 100)]
    high: u32,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or("expected ROWSxCOLS")?;
    let r = r.trim().parse().map_err(|_| format!("bad row count '{r}'"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column count '{c}'"))?;
    Ok((r, c))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Error::AwaitingExternal { pending, dir }) => {
            println!("exported models to {dir}; {pending} instance(s) await .sol files, rerun once they are solved");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve(a) => solve(cli, a),
        Command::Aggregate(a) => aggregate(cli, a),
        Command::Exp1(a) => exp1(cli, a),
        Command::Exp2(a) => exp2(cli, a),
        Command::ExportLp(a) => export(cli, a),
        Command::Gen(a) => gen(cli, a),
    }
}

fn load_instance(a: &InstanceArgs) -> Result<Instance> {
    if let Some(path) = &a.instance {
        return Instance::read(path);
    }
    if let Some(path) = &a.scenarios {
        let set = read_scenarios_csv_file(path)?;
        let p = a.select.expect("clap enforces --select");
        return Instance::new(Problem::Selection(SelectionProblem::new(set.num_items(), p)?), set);
    }
    if let (Some(arcs), Some(costs)) = (&a.arcs, &a.costs) {
        let target = match a.target {
            Some(t) => t,
            None => {
                let arcs_list = crate::io::read_arcs_csv(fs::File::open(arcs)?)?;
                arcs_list.iter().map(|&(t, h)| t.max(h)).max().unwrap_or(0)
            }
        };
        return read_graph_csv(arcs, costs, a.source, target);
    }
    Err(Error::InvalidParameter(
        "give --instance, --scenarios with --select, or --arcs with --costs".into(),
    ))
}

fn resolve_weights(a: &WeightArgs, inst: &Instance) -> Result<WeightVector> {
    let k = inst.scenarios.num_scenarios();
    let w = if let Some(w) = &a.weights {
        if a.normalize {
            WeightVector::normalize(w.clone())?
        } else {
            WeightVector::new(w.clone())?
        }
    } else if let Some(t) = a.top_k {
        make_weights(&WeightSpec::top_k(t, k))?
    } else if let Some(alpha) = a.alpha {
        make_weights(&WeightSpec::alpha(alpha, k))?
    } else if let Some(w) = &inst.weights {
        w.clone()
    } else {
        return Err(Error::InvalidParameter(
            "no weights: pass --weights, --top-k or --alpha, or add weights to the instance".into(),
        ));
    };
    if w.len() != k {
        return Err(Error::DimensionMismatch {
            what: "weight vector",
            expected: k,
            found: w.len(),
        });
    }
    Ok(w)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn report_text(cli: &Cli, method: &str, rep: &SolveReport) -> Result<String> {
    Ok(match cli.format {
        Some(Format::Json) => json(rep)?,
        Some(Format::Csv) => format!(
            "objective,solution,nodes,millis,optimal\n{},{},{},{},{}\n",
            rep.objective,
            rep.solution.to_bits().iter().map(u8::to_string).collect::<String>(),
            rep.nodes,
            rep.millis.as_millis(),
            rep.optimal
        ),
        None => format!(
            "method: {method}\nsolution: {}\nobjective: {}\nnodes: {}\noptimal: {}\n",
            rep.solution, rep.objective, rep.nodes, rep.optimal
        ),
    })
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let w = resolve_weights(&a.weights, &inst)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;
    if cli.paper_scale {
        return solve_external(cli, a, &inst, &opt, &w);
    }
    let (label, rep) = match a.method {
        Method::Enum => ("enum", solve_enumeration(&inst.problem, u, &opt, &w)?),
        Method::Bb => ("bb", solve_branch_bound(&inst.problem, u, &opt, &w)?),
        Method::RiskAffine => {
            let l = a
                .l
                .unwrap_or_else(|| w.as_slice().iter().filter(|&&v| v > 0.0).count());
            ("risk-affine", solve_risk_affine(&inst.problem, u, &opt, &w, l)?)
        }
        Method::Midpoint => {
            let start = std::time::Instant::now();
            let x = midpoint_solution(&inst.problem, u)?;
            let objective = owar(&x, u, &opt, &w)?;
            (
                "midpoint",
                SolveReport {
                    objective,
                    solution: x,
                    nodes: 1,
                    millis: start.elapsed(),
                    optimal: false,
                    nominal_solves: 1,
                    bound_violations: 0,
                },
            )
        }
    };
    let text = report_text(cli, label, &rep)?;
    emit(cli, &text)
}

fn solve_external(cli: &Cli, a: &SolveArgs, inst: &Instance, opt: &[f64], w: &WeightVector) -> Result<()> {
    let model = build_mip(&inst.problem, &inst.scenarios, opt, w)?;
    let Some(sol) = &a.sol else {
        let lp = write_lp(&model);
        return emit(cli, &lp);
    };
    let x = solution_from_values(inst.problem.num_items(), &read_solution_file(sol)?)?;
    if !inst.problem.is_feasible(&x) {
        return Err(Error::InvalidSolution(format!("{} is infeasible for the instance", sol.display())));
    }
    let rep = SolveReport {
        objective: owar(&x, &inst.scenarios, opt, w)?,
        solution: x,
        nodes: 0,
        millis: Default::default(),
        optimal: true,
        nominal_solves: 0,
        bound_violations: 0,
    };
    let text = report_text(cli, "external", &rep)?;
    emit(cli, &text)
}

fn aggregate(cli: &Cli, a: &AggregateArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let w = resolve_weights(&a.weights, &inst)?;
    let u = &inst.scenarios;
    let opt = opt_per_scenario(&inst.problem, u)?;
    let exact = if a.exact {
        Some(solve_enumeration(&inst.problem, u, &opt, &w)?.objective)
    } else {
        None
    };
    if let Some(ell) = a.block {
        let agg = block_aggregate(u, &opt, &w, ell)?;
        let x = solve_enumeration(&inst.problem, &agg.centroids, &agg.o, &agg.w_prime)?.solution;
        let bounds = sandwich_check(&x, u, &opt, &w, &agg).ok();
        #[derive(Serialize)]
        struct Out<'a> {
            solution: &'a crate::criteria::Solution,
            value: f64,
            ratio: Option<f64>,
            bounds: Option<crate::aggregation::SandwichBounds>,
            aggregation: &'a crate::aggregation::AggregationResult,
        }
        let value = owar(&x, u, &opt, &w)?;
        let out = Out {
            solution: &x,
            value,
            ratio: exact.map(|e| crate::aggregation::approximation_ratio(value, e)),
            bounds,
            aggregation: &agg,
        };
        let text = match cli.format {
            Some(Format::Json) => json(&out)?,
            Some(Format::Csv) => format!(
                "method,solution,value,ratio\nblock{ell},{},{},{}\n",
                bits(&x),
                value,
                opt_num(out.ratio)
            ),
            None => {
                let mut s = format!("method: block (ell = {ell})\nsolution: {x}\nvalue: {value}\n");
                if let Some(r) = out.ratio {
                    s += &format!("ratio: {r}\n");
                }
                if let Some(b) = bounds {
                    s += &format!("bounds: {} <= {} <= {}\n", b.lower, b.mid, b.upper);
                }
                s
            }
        };
        return emit(cli, &text);
    }
    let cfg = HeuristicConfig::new(a.k_prime, a.variant, cli.seed);
    let out = solve_aggregated(&inst.problem, u, &opt, &w, &cfg, exact)?;
    let text = match cli.format {
        Some(Format::Json) => json(&out)?,
        Some(Format::Csv) => format!(
            "method,solution,value,ratio\n{},{},{},{}\n",
            a.variant,
            bits(&out.solution),
            out.value,
            opt_num(out.ratio)
        ),
        None => {
            let mut s = format!(
                "method: {} (K' = {})\nsolution: {}\nvalue: {}\n",
                a.variant, a.k_prime, out.solution, out.value
            );
            if let Some(r) = out.ratio {
                s += &format!("ratio: {r}\n");
            }
            s
        }
    };
    emit(cli, &text)
}

fn bits(x: &crate::criteria::Solution) -> String {
    x.to_bits().iter().map(u8::to_string).collect()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|r| r.to_string()).unwrap_or_default()
}

fn models_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(".")).join("models")
}

fn exp1(cli: &Cli, a: &Exp1Args) -> Result<()> {
    let mut cfg = if cli.paper_scale {
        Experiment1Config::paper_scale(models_dir(cli))
    } else {
        Experiment1Config {
            method: a.method.method(),
            ..Default::default()
        }
    };
    if let Some((rows, cols)) = a.graph {
        cfg.source = ProblemSource::Grid { rows, cols };
    } else if let ProblemSource::Selection { n, p } = cfg.source {
        cfg.source = ProblemSource::Selection {
            n: a.n.unwrap_or(n),
            p: a.p.unwrap_or(p),
        };
    }
    if let Some(k) = a.k {
        cfg.scenarios = k;
        if a.grid.is_none() {
            cfg.grid = even_grid(k);
        }
    }
    if let Some(g) = &a.grid {
        cfg.grid = g.clone();
    }
    if let Some(r) = a.repetitions {
        cfg.repetitions = r;
    }
    cfg.seed = cli.seed;
    cfg.low = a.low;
    cfg.high = a.high;
    let matrix = run_experiment1(&cfg)?;
    let body = match cli.format {
        Some(Format::Json) => json(&matrix)?,
        _ => matrix.to_csv()?,
    };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let name = if cli.format == Some(Format::Json) { "matrix.json" } else { "matrix.csv" };
            fs::write(dir.join(name), body)?;
            fs::write(dir.join("heatmap.svg"), heatmap_svg(&matrix))?;
            Ok(())
        }
        None => emit(cli, &body),
    }
}

// up to five evenly spaced top-k values ending at K
fn even_grid(k: usize) -> Vec<usize> {
    let step = k.div_ceil(5).max(1);
    let mut g: Vec<usize> = (1..=5).map(|i| i * step).filter(|&v| v <= k).collect();
    if g.last() != Some(&k) {
        g.push(k);
    }
    g
}

fn exp2(cli: &Cli, a: &Exp2Args) -> Result<()> {
    let mut cfg = if cli.paper_scale {
        let dir = cli
            .out
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
            .join("models");
        Experiment2Config::paper_scale(a.sweep, dir)
    } else {
        Experiment2Config {
            sweep: a.sweep,
            method: a.method.method(),
            ..Default::default()
        }
    };
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.p = a.p.unwrap_or(cfg.p);
    cfg.scenarios = a.k.unwrap_or(cfg.scenarios);
    cfg.k_prime = a.k_prime.unwrap_or(cfg.k_prime.min(cfg.scenarios));
    if let Some(alpha) = a.alpha {
        cfg.weights = WeightKind::Alpha(alpha);
    }
    if let Some(t) = a.top_k {
        cfg.weights = WeightKind::TopK(t);
    }
    if let Some(v) = &a.variants {
        cfg.variants = v.clone();
    }
    if let Some(r) = a.repetitions {
        cfg.repetitions = r;
    }
    cfg.seed = cli.seed;
    cfg.low = a.low;
    cfg.high = a.high;
    cfg.values = match &a.values {
        Some(v) => v.clone(),
        None => cfg.default_values(),
    };
    let table = run_experiment2(&cfg)?;
    let body = match cli.format {
        Some(Format::Json) => json(&table)?,
        _ => table.to_csv()?,
    };
    emit(cli, &body)
}

fn export(cli: &Cli, a: &ExportArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let w = resolve_weights(&a.weights, &inst)?;
    let opt = opt_per_scenario(&inst.problem, &inst.scenarios)?;
    let model = build_mip(&inst.problem, &inst.scenarios, &opt, &w)?;
    emit(cli, &write_lp(&model))
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    let (n, p, k) = if cli.paper_scale { (40, 20, 50) } else { (a.n, a.p, a.k) };
    let inst = match a.kind {
        GenKind::Selection => ProblemSource::Selection { n, p },
        GenKind::Grid => ProblemSource::Grid {
            rows: a.rows,
            cols: a.cols,
        },
    }
    .generate(k, a.low, a.high, cli.seed)?;
    let text = match cli.format {
        Some(Format::Csv) => scenarios_csv(&inst.scenarios)?,
        _ => inst.to_json()? + "\n",
    };
    emit(cli, &text)
}

fn scenarios_csv(set: &ScenarioSet) -> Result<String> {
    let mut buf = Vec::new();
    write_scenarios_csv(set, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
