use std::fs;

use owar::criteria::{owar, ScenarioSet, Solution, WeightVector};
use owar::exact::{build_mip, certified_assignment, export_lp, parse_lp, solve_enumeration};
use owar::experiments::{
    gen_grid_instance, run_experiment1, run_experiment2, solve_exact, ExactMethod, Experiment1Config,
    Experiment2Config, ProblemSource, SweepParam,
};
use owar::io::{
    read_graph_csv, read_scenarios_csv_file, write_arcs_csv, write_scenarios_csv_file, Instance,
};
use owar::oracles::opt_per_scenario;
use owar::report::{emit_csv, emit_heatmap_svg, parse_matrix_csv, parse_ratio_csv};
use owar::Error;

#[test]
fn instance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = ProblemSource::Selection { n: 7, p: 3 }.generate(5, 1, 50, 11).unwrap();
    let f = dir.path().join("inst.json");
    inst.write(&f).unwrap();
    let back = Instance::read(&f).unwrap();
    assert_eq!(back.scenarios, inst.scenarios);
    assert_eq!(back.problem.kind(), "selection");
}

#[test]
fn scenario_csv_round_trip_keeps_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let u = ScenarioSet::new(vec![vec![0.1, 2.5, 1e-7], vec![3.0, 1.0 / 3.0, 4.0]]).unwrap();
    let f = dir.path().join("u.csv");
    write_scenarios_csv_file(&u, &f).unwrap();
    assert!(fs::read_to_string(&f).unwrap().starts_with("scenario,c_1,c_2,c_3\n"));
    assert_eq!(read_scenarios_csv_file(&f).unwrap(), u);
}

#[test]
fn malformed_scenario_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.csv");
    fs::write(&f, "scenario,c_1,c_2\n1,1,x\n").unwrap();
    assert!(matches!(read_scenarios_csv_file(&f), Err(Error::Malformed(_))));
    fs::write(&f, "scenario,c_1,c_3\n1,1,2\n").unwrap();
    assert!(matches!(read_scenarios_csv_file(&f), Err(Error::Malformed(_))));
}

#[test]
fn graph_csv_reproduces_the_grid_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (g, u) = gen_grid_instance(3, 3, 4, 1, 20, 5).unwrap();
    let arcs = dir.path().join("arcs.csv");
    let costs = dir.path().join("costs.csv");
    write_arcs_csv(g.arcs(), fs::File::create(&arcs).unwrap()).unwrap();
    write_scenarios_csv_file(&u, &costs).unwrap();
    let back = read_graph_csv(&arcs, &costs, g.source(), g.target()).unwrap();
    assert_eq!(
        opt_per_scenario(&back.problem, &back.scenarios).unwrap(),
        opt_per_scenario(&g, &u).unwrap()
    );
    assert_eq!(back.problem.kind(), "shortest_path");
}

#[test]
fn external_solution_file_is_imported() {
    let dir = tempfile::tempdir().unwrap();
    let inst = Instance::worked_example();
    let u = &inst.scenarios;
    let w = inst.weights.clone().unwrap();
    let opt = opt_per_scenario(&inst.problem, u).unwrap();
    let method = ExactMethod::External(dir.path().to_path_buf());

    assert_eq!(solve_exact(&method, &inst.problem, u, &opt, &w, "ex").unwrap(), None);
    let lp = fs::read_to_string(dir.path().join("ex.lp")).unwrap();
    let model = parse_lp(&lp).unwrap();

    // what an external solver would report for the optimum
    let best = solve_enumeration(&inst.problem, u, &opt, &w).unwrap();
    let values = certified_assignment(&model, &best.solution, u, &opt, &w).unwrap();
    assert!((model.objective_value(&values) - best.objective).abs() < 1e-9);
    assert!(model.violated(&values, 1e-9).is_empty());
    let sol: String = model
        .variables()
        .iter()
        .zip(&values)
        .map(|(v, x)| format!("{} {x}\n", v.name))
        .collect();
    fs::write(dir.path().join("ex.sol"), format!("# objective {}\n{sol}", best.objective)).unwrap();

    let x = solve_exact(&method, &inst.problem, u, &opt, &w, "ex").unwrap().unwrap();
    assert_eq!(x, Solution::from_indices(3, [0]).unwrap());
    assert!((owar(&x, u, &opt, &w).unwrap() - 2.4).abs() < 1e-12);
}

#[test]
fn exported_lp_file_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let inst = ProblemSource::Selection { n: 5, p: 2 }.generate(3, 1, 9, 1).unwrap();
    let opt = opt_per_scenario(&inst.problem, &inst.scenarios).unwrap();
    let w = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
    let model = build_mip(&inst.problem, &inst.scenarios, &opt, &w).unwrap();
    let f = dir.path().join("m.lp");
    export_lp(&model, &f).unwrap();
    let back = parse_lp(&fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(back.coefficient_multiset(), model.coefficient_multiset());
}

#[test]
fn experiment_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment1(&Experiment1Config {
        source: ProblemSource::Selection { n: 6, p: 3 },
        scenarios: 4,
        grid: vec![2, 4],
        repetitions: 3,
        ..Default::default()
    })
    .unwrap();
    let f = dir.path().join("matrix.csv");
    emit_csv(&m, &f).unwrap();
    let back = parse_matrix_csv(&fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(back.normalized, m.normalized);
    assert_eq!(back.row_averages, m.row_averages);
    emit_heatmap_svg(&m, dir.path().join("heatmap.svg")).unwrap();

    let mut cfg = Experiment2Config {
        n: 6,
        p: 3,
        scenarios: 4,
        k_prime: 2,
        repetitions: 2,
        sweep: SweepParam::TopK,
        ..Default::default()
    };
    cfg.values = cfg.default_values();
    let t = run_experiment2(&cfg).unwrap();
    let f = dir.path().join("ratios.csv");
    emit_csv(&t, &f).unwrap();
    let back = parse_ratio_csv(&fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(back.parameter, "topk");
    assert_eq!(back.mean, t.mean);

    let json: serde_json::Value = serde_json::to_value(&t).unwrap();
    assert_eq!(json["parameter"], "topk");
    assert_eq!(json["variants"][4], "Random");
}
