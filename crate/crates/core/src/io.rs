//! Instance files: scenario CSV, graph CSV pairs and self-describing JSON.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{ScenarioSet, Solution, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::oracles::{DiGraphInstance, ExplicitOracle, LinearRow, NominalOracle, SelectionProblem};

/// The worked three-alternative example, as shipped in `data/worked_example.json`.
pub const WORKED_EXAMPLE_JSON: &str = include_str!("../data/worked_example.json");

/// A feasible set that can be written to and read from an instance file.
#[derive(Debug, Clone)]
pub enum Problem {
    Selection(SelectionProblem),
    ShortestPath(DiGraphInstance),
    Explicit(ExplicitOracle),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Selection(_) => "selection",
            Problem::ShortestPath(_) => "shortest_path",
            Problem::Explicit(_) => "explicit",
        }
    }

    fn inner(&self) -> &dyn NominalOracle {
        match self {
            Problem::Selection(p) => p,
            Problem::ShortestPath(g) => g,
            Problem::Explicit(e) => e,
        }
    }
}

impl NominalOracle for Problem {
    fn num_items(&self) -> usize {
        self.inner().num_items()
    }

    fn solve(&self, costs: &[f64]) -> Result<(Solution, f64)> {
        self.inner().solve(costs)
    }

    fn is_feasible(&self, x: &Solution) -> bool {
        self.inner().is_feasible(x)
    }

    fn enumerate(&self) -> Result<Vec<Solution>> {
        self.inner().enumerate()
    }

    fn linear_description(&self) -> Option<Vec<LinearRow>> {
        self.inner().linear_description()
    }

    fn as_selection(&self) -> Option<&SelectionProblem> {
        self.inner().as_selection()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ProblemRepr {
    Selection {
        n: usize,
        p: usize,
    },
    ShortestPath {
        nodes: usize,
        arcs: Vec<(usize, usize)>,
        source: usize,
        target: usize,
    },
    Explicit {
        solutions: Vec<Solution>,
    },
}

impl From<&Problem> for ProblemRepr {
    fn from(p: &Problem) -> Self {
        match p {
            Problem::Selection(s) => ProblemRepr::Selection { n: s.n(), p: s.p() },
            Problem::ShortestPath(g) => ProblemRepr::ShortestPath {
                nodes: g.num_nodes(),
                arcs: g.arcs().to_vec(),
                source: g.source(),
                target: g.target(),
            },
            Problem::Explicit(e) => ProblemRepr::Explicit {
                solutions: e.solutions().to_vec(),
            },
        }
    }
}

impl TryFrom<ProblemRepr> for Problem {
    type Error = Error;

    fn try_from(r: ProblemRepr) -> Result<Self> {
        Ok(match r {
            ProblemRepr::Selection { n, p } => Problem::Selection(SelectionProblem::new(n, p)?),
            ProblemRepr::ShortestPath {
                nodes,
                arcs,
                source,
                target,
            } => Problem::ShortestPath(DiGraphInstance::new(nodes, arcs, source, target)?),
            ProblemRepr::Explicit { solutions } => Problem::Explicit(ExplicitOracle::new(solutions)?),
        })
    }
}

/// A feasible set, its scenarios and optionally a default weight vector.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: Problem,
    pub scenarios: ScenarioSet,
    pub weights: Option<WeightVector>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    problem: ProblemRepr,
    scenarios: ScenarioSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl Instance {
    pub fn new(problem: Problem, scenarios: ScenarioSet) -> Result<Self> {
        check_len("scenario width", problem.num_items(), scenarios.num_items())?;
        Ok(Instance {
            problem,
            scenarios,
            weights: None,
        })
    }

    pub fn with_weights(mut self, weights: WeightVector) -> Result<Self> {
        check_len("weight vector", self.scenarios.num_scenarios(), weights.len())?;
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: InstanceRepr = serde_json::from_str(text)?;
        let inst = Instance::new(repr.problem.try_into()?, repr.scenarios)?;
        match repr.weights {
            Some(w) => inst.with_weights(WeightVector::new(w)?),
            None => Ok(inst),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = InstanceRepr {
            problem: (&self.problem).into(),
            scenarios: self.scenarios.clone(),
            weights: self.weights.as_ref().map(|w| w.as_slice().to_vec()),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Instance::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    /// The bundled worked example with weights `(0.6, 0.2, 0.2)`.
    pub fn worked_example() -> Self {
        Instance::from_json(WORKED_EXAMPLE_JSON).expect("bundled instance is valid")
    }
}

/// Scenario CSV: header `scenario,c_1,...,c_n`, one row per scenario.
pub fn write_scenarios_csv<W: Write>(set: &ScenarioSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scenario".to_string()];
    header.extend((1..=set.num_items()).map(|i| format!("c_{i}")));
    w.write_record(&header)?;
    for (k, row) in set.rows().enumerate() {
        let mut rec = vec![(k + 1).to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scenarios_csv<R: Read>(input: R) -> Result<ScenarioSet> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("scenario") {
        return Err(Error::Malformed("scenario CSV must start with a 'scenario' column".into()));
    }
    for (i, h) in header.iter().enumerate().skip(1) {
        if h != format!("c_{i}") {
            return Err(Error::Malformed(format!("expected column c_{i}, found '{h}'")));
        }
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Malformed(format!("row {}: '{v}' is not a number", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    ScenarioSet::new(rows)
}

pub fn read_scenarios_csv_file(path: impl AsRef<Path>) -> Result<ScenarioSet> {
    read_scenarios_csv(File::open(path)?)
}

pub fn write_scenarios_csv_file(set: &ScenarioSet, path: impl AsRef<Path>) -> Result<()> {
    write_scenarios_csv(set, File::create(path)?)
}

/// Arc list CSV with header `tail,head`; node ids are 0-based.
pub fn read_arcs_csv<R: Read>(input: R) -> Result<Vec<(usize, usize)>> {
    #[derive(Deserialize)]
    struct Arc {
        tail: usize,
        head: usize,
    }
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut arcs = Vec::new();
    for rec in r.deserialize() {
        let a: Arc = rec?;
        arcs.push((a.tail, a.head));
    }
    Ok(arcs)
}

pub fn write_arcs_csv<W: Write>(arcs: &[(usize, usize)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tail", "head"])?;
    for (t, h) in arcs {
        w.write_record([t.to_string(), h.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest-path instance from `arcs.csv` and a scenario CSV whose columns
/// follow the arc order. The node count is the largest id plus one.
pub fn read_graph_csv(
    arcs_path: impl AsRef<Path>,
    costs_path: impl AsRef<Path>,
    source: usize,
    target: usize,
) -> Result<Instance> {
    let arcs = read_arcs_csv(File::open(arcs_path)?)?;
    let scenarios = read_scenarios_csv_file(costs_path)?;
    check_len("cost columns", arcs.len(), scenarios.num_items())?;
    let nodes = arcs.iter().map(|&(t, h)| t.max(h) + 1).max().unwrap_or(0);
    let graph = DiGraphInstance::new(nodes, arcs, source, target)?;
    Instance::new(Problem::ShortestPath(graph), scenarios)
}
