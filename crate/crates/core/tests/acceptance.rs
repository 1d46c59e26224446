//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use owar::aggregation::{block_aggregate, midpoint_solution, sandwich_check, solve_aggregated, HeuristicConfig, Variant};
use owar::criteria::{minmax_regret, owa, owar, value_vector, ScenarioSet, Solution, WeightVector};
use owar::exact::{build_mip, parse_lp, solve_branch_bound, solve_enumeration, solve_risk_affine, write_lp};
use owar::experiments::{run_experiment1, run_experiment2, Experiment1Config, Experiment2Config, SweepParam, WeightKind};
use owar::io::Instance;
use owar::oracles::{opt_per_scenario, NominalOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{non_increasing, random_selection, random_set, risk_affine};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn argmin_set(values: &[f64]) -> Vec<usize> {
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    (0..values.len()).filter(|&i| values[i] <= m + TOL).collect()
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let inst = Instance::worked_example();
    let u = &inst.scenarios;
    let w = inst.weights.clone().ok_or("bundled example has no weights")?;
    let opt = opt_per_scenario(&inst.problem, u).map_err(e)?;
    ensure(opt == [6.0, 1.0, 1.0], || format!("opt = {opt:?}"))?;

    let xs: Vec<Solution> = inst.problem.enumerate().map_err(e)?;
    let mut owas = Vec::new();
    let mut maxr = Vec::new();
    let mut owars = Vec::new();
    for x in &xs {
        owas.push(owa(&value_vector(x, u).map_err(e)?, &w).map_err(e)?);
        maxr.push(minmax_regret(x, u, &opt).map_err(e)?);
        owars.push(owar(x, u, &opt, &w).map_err(e)?);
    }
    let expect = |got: &[f64], want: [f64; 3], what: &str| {
        ensure(got.iter().zip(want).all(|(a, b)| close(*a, b)), || format!("{what} = {got:?}"))
    };
    expect(&owas, [6.4, 6.0, 6.8], "OWA")?;
    expect(&maxr, [4.0, 6.0, 3.0], "max regret")?;
    expect(&owars, [2.4, 4.0, 2.8], "OWAR")?;
    ensure(argmin_set(&owas) == [1], || "OWA argmin is not x2".into())?;
    ensure(argmin_set(&maxr) == [2], || "regret argmin is not x3".into())?;
    ensure(argmin_set(&owars) == [0], || "OWAR argmin is not x1".into())?;
    let rep = solve_enumeration(&inst.problem, u, &opt, &w).map_err(e)?;
    ensure(rep.solution == xs[0], || "solver disagrees on the OWAR optimum".into())?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("{t:?}"))
}

fn max_weight_is_minmax_regret() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for _ in 0..100 {
        let (prob, u) = random_selection(&mut rng, 12, 10);
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let w = WeightVector::max_weight(u.num_scenarios()).map_err(e)?;
        for x in prob.enumerate().map_err(e)? {
            let a = owar(&x, &u, &opt, &w).map_err(e)?;
            let b = minmax_regret(&x, &u, &opt).map_err(e)?;
            ensure(close(a, b), || format!("{a} != {b}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} solutions"))
}

fn uniform_is_mean_regret() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for _ in 0..100 {
        let (prob, u) = random_selection(&mut rng, 12, 10);
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let w = WeightVector::uniform(u.num_scenarios()).map_err(e)?;
        let mean = u.mean_scenario();
        let mean_opt = opt.iter().sum::<f64>() / opt.len() as f64;
        let xs = prob.enumerate().map_err(e)?;
        let mut owars = Vec::new();
        let mut means = Vec::new();
        for x in &xs {
            let v = owar(x, &u, &opt, &w).map_err(e)?;
            let m = x.cost(&mean);
            ensure(close(v, m - mean_opt), || format!("{v} != {m} - {mean_opt}"))?;
            owars.push(v);
            means.push(m);
        }
        ensure(argmin_set(&owars) == argmin_set(&means), || "argmin sets differ".into())?;
        checked += xs.len();
    }
    Ok(format!("{checked} solutions"))
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn risk_affine_matches_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let l = 1 + i % 2;
        let (prob, _) = random_selection(&mut rng, 12, 1);
        let k = rng.random_range(l..=6);
        let u = random_set(&mut rng, k, prob.num_items());
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let w = risk_affine(&mut rng, k, l);
        let ra = solve_risk_affine(&prob, &u, &opt, &w, l).map_err(e)?;
        let en = solve_enumeration(&prob, &u, &opt, &w).map_err(e)?;
        ensure(close(ra.objective, en.objective), || {
            format!("instance {i}: {} != {}", ra.objective, en.objective)
        })?;
        let want = binomial(k, l) * (1..=l as u64).product::<u64>();
        ensure(ra.nominal_solves == want, || {
            format!("instance {i}: {} solves, expected {want}", ra.nominal_solves)
        })?;
    }
    Ok("100 instances".into())
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let (prob, u) = random_selection(&mut rng, 10, 12);
        let k = u.num_scenarios();
        let divisors: Vec<usize> = (1..=k).filter(|d| k % d == 0).collect();
        let ell = divisors[rng.random_range(0..divisors.len())];
        let w = non_increasing(&mut rng, k);
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let xs = prob.enumerate().map_err(e)?;
        let x = &xs[rng.random_range(0..xs.len())];
        let agg = block_aggregate(&u, &opt, &w, ell).map_err(e)?;
        let b = sandwich_check(x, &u, &opt, &w, &agg).map_err(e)?;
        ensure(b.lower <= b.mid + TOL && b.mid <= b.upper + TOL, || format!("draw {i}: {b:?}"))?;
        if b.upper > 0.0 {
            worst = worst.max(b.mid / b.upper);
        }
    }
    Ok(format!("500 draws, max mid/upper {worst:.3}"))
}

fn midpoint_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let (prob, u) = random_selection(&mut rng, 12, 10);
        let k = u.num_scenarios();
        let w = non_increasing(&mut rng, k);
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let exact = solve_enumeration(&prob, &u, &opt, &w).map_err(e)?.objective;
        let x = midpoint_solution(&prob, &u).map_err(e)?;
        let v = owar(&x, &u, &opt, &w).map_err(e)?;
        let bound = w.first() * k as f64 * exact;
        ensure(v <= bound + TOL, || format!("instance {i}: {v} > {bound}"))?;
    }
    Ok("100 instances".into())
}

fn branch_bound_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_frac: f64 = 0.0;
    for i in 0..100 {
        let (prob, u) = random_selection(&mut rng, 14, 10);
        let w = non_increasing(&mut rng, u.num_scenarios());
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let bb = solve_branch_bound(&prob, &u, &opt, &w).map_err(e)?;
        let en = solve_enumeration(&prob, &u, &opt, &w).map_err(e)?;
        ensure(close(bb.objective, en.objective), || {
            format!("instance {i}: {} != {}", bb.objective, en.objective)
        })?;
        ensure(bb.nodes <= en.nodes, || format!("instance {i}: {} nodes > {}", bb.nodes, en.nodes))?;
        max_frac = max_frac.max(bb.nodes as f64 / en.nodes as f64);
    }
    Ok(format!("100 instances, max nodes/|X| {max_frac:.3}"))
}

fn heuristic_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let (prob, u) = random_selection(&mut rng, 10, 8);
        let k = u.num_scenarios();
        let w = non_increasing(&mut rng, k);
        let opt = opt_per_scenario(&prob, &u).map_err(e)?;
        let exact = solve_enumeration(&prob, &u, &opt, &w).map_err(e)?.objective;
        for v in Variant::KMEANS {
            let out = solve_aggregated(&prob, &u, &opt, &w, &HeuristicConfig::new(k, v, i), Some(exact)).map_err(e)?;
            let r = out.ratio.unwrap_or(f64::NAN);
            ensure(close(r, 1.0), || format!("instance {i}, {v}: ratio {r}"))?;
        }
    }
    let mut lowest = f64::INFINITY;
    for sweep in [SweepParam::Alpha, SweepParam::TopK, SweepParam::P, SweepParam::N, SweepParam::K, SweepParam::KPrime] {
        let mut cfg = Experiment2Config {
            sweep,
            repetitions: 3,
            ..Default::default()
        };
        cfg.values = cfg.default_values();
        let t = run_experiment2(&cfg).map_err(e)?;
        for v in t.min.iter().flatten() {
            lowest = lowest.min(*v);
        }
    }
    ensure(lowest >= 1.0 - TOL, || format!("ratio {lowest} below 1"))?;
    Ok(format!("K'=K ratios 1, lowest sweep ratio {lowest:.4}"))
}

fn random_not_better() -> Outcome {
    let cfg = Experiment2Config {
        k_prime: 5,
        weights: WeightKind::Alpha(0.05),
        variants: vec![Variant::KOoDw, Variant::Random],
        repetitions: 50,
        sweep: SweepParam::Alpha,
        values: vec![0.05, 0.8],
        ..Default::default()
    };
    let t = run_experiment2(&cfg).map_err(e)?;
    let mut parts = Vec::new();
    for (alpha, row) in t.points.iter().zip(&t.mean) {
        let (kood, random) = (row[0], row[1]);
        ensure(random >= kood, || format!("alpha {alpha}: Random {random} < K-OO-DW {kood}"))?;
        parts.push(format!("alpha {alpha}: {random:.4} >= {kood:.4}"));
    }
    Ok(parts.join(", "))
}

fn experiment1_structure() -> Outcome {
    let start = Instant::now();
    let cfg = Experiment1Config::default();
    let m = run_experiment1(&cfg).map_err(e)?;
    for (i, row) in m.normalized.iter().enumerate() {
        ensure(close(row[i], 1.0), || format!("diagonal {} = {}", m.labels[i], row[i]))?;
    }
    let k = cfg.scenarios;
    let a = m.index_of(&format!("OWAR_{k}")).ok_or("no OWAR_K row")?;
    let b = m.index_of(&format!("OWA_{k}")).ok_or("no OWA_K row")?;
    ensure(
        m.normalized[a].iter().zip(&m.normalized[b]).all(|(x, y)| close(*x, *y)),
        || "OWAR_K and OWA_K rows differ".into(),
    )?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("{} instances in {t:?}", m.instances))
}

fn lp_round_trip() -> Outcome {
    let inst = Instance::worked_example();
    let u: &ScenarioSet = &inst.scenarios;
    let w = inst.weights.clone().ok_or("bundled example has no weights")?;
    let opt = opt_per_scenario(&inst.problem, u).map_err(e)?;
    let model = build_mip(&inst.problem, u, &opt, &w).map_err(e)?;
    let back = parse_lp(&write_lp(&model)).map_err(e)?;
    ensure(back.coefficient_multiset() == model.coefficient_multiset(), || "multisets differ".into())?;
    let (n, k) = (u.num_items(), u.num_scenarios());
    ensure(back.variables().len() == n + 2 * k, || format!("{} variables", back.variables().len()))?;
    ensure(back.regret_constraint_count() == k * k, || {
        format!("{} regret rows", back.regret_constraint_count())
    })?;
    let feas = back.constraints().len() - k * k;
    ensure(feas >= 1, || "no feasibility rows".into())?;
    Ok(format!("{} variables, {} regret rows, {feas} feasibility row(s)", n + 2 * k, k * k))
}

fn main() {
    let criteria: [Check; 11] = [
        ("worked example", worked_example),
        ("max weight equals min-max regret", max_weight_is_minmax_regret),
        ("uniform weight equals mean regret", uniform_is_mean_regret),
        ("risk-affine solver", risk_affine_matches_enumeration),
        ("block aggregation sandwich", sandwich),
        ("midpoint bound", midpoint_bound),
        ("branch-and-bound exactness", branch_bound_exact),
        ("heuristic sanity", heuristic_sanity),
        ("random baseline ordering", random_not_better),
        ("experiment 1 structure", experiment1_structure),
        ("LP export round trip", lp_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
