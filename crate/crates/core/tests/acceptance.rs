//! Acceptance suite. Each criterion prints one PASS or FAIL line. With
//! `ACCEPTANCE_STRICT` set, the process exits non-zero when any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lidarp::backend::{SolveStatus, Solver};
use lidarp::bnp::{branch_and_price, column_generation, root_node_heuristic, BnpConfig, BnpResult};
use lidarp::explicit::{full_pool, solve_explicit, MasterConfig};
use lidarp::gadgets::{clique_to_mpusp, example_graph, picked_vertices, solve_gadget, verify_gadget, GadgetSpec, Graph, Side};
use lidarp::master::{solve_rrmp, ColumnPool};
use lidarp::model::io::{read_solution, write_solution};
use lidarp::model::{enumerate_all_patterns, generate_instance, validate_solution, Direction, Instance, Solution};
use lidarp::pricing::{brute_force_mpsp, reduced_cost, solve_mpsp, solve_mpusp};

const EPS: f64 = 1e-6;
/// Wall-clock budget for one branch-and-price run in the exactness check.
const EXACT_TIME_LIMIT: f64 = 60.0;
/// Wall-clock budget for one explicit solve used as the heuristic's reference.
const ORACLE_TIME_LIMIT: f64 = 60.0;
/// Node budget for the repeated runs; time limits would not be reproducible.
const DETERMINISM_NODES: usize = 200;

type Outcome = Result<String, String>;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS * (1.0 + a.abs().max(b.abs()))
}

/// Random instance with parameters drawn from the given ranges.
fn sample(
    rng: &mut ChaCha8Rng,
    stations: &[usize],
    requests: std::ops::RangeInclusive<usize>,
    vehicles: std::ops::RangeInclusive<usize>,
    capacity: std::ops::RangeInclusive<usize>,
) -> Instance {
    let n = stations[rng.gen_range(0..stations.len())];
    let m = rng.gen_range(requests);
    let c = rng.gen_range(vehicles);
    let q = rng.gen_range(capacity);
    let seed = rng.gen();
    generate_instance(n, m, c, q, seed).expect("valid parameters")
}

fn describe(inst: &Instance) -> String {
    format!(
        "n={} m={} c={} Q={}",
        inst.stations(),
        inst.requests().len(),
        inst.vehicles(),
        inst.capacity()
    )
}

/// Solutions collected from every run for the validator round trip.
#[derive(Default)]
struct Emitted {
    solutions: Vec<(Instance, Solution, &'static str)>,
}

impl Emitted {
    fn push(&mut self, inst: &Instance, sol: &Option<Solution>, source: &'static str) {
        if let Some(s) = sol {
            self.solutions.push((inst.clone(), s.clone(), source));
        }
    }
}

struct ExactRun {
    inst: Instance,
    explicit: f64,
    bnp: BnpResult,
    heuristic: Option<f64>,
}

fn exactness(emitted: &mut Emitted, runs: &mut Vec<ExactRun>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let solver = Solver::default();
    let mut failures = Vec::new();
    let mut unproven = Vec::new();
    let mut nodes = 0;
    for i in 0..100 {
        let inst = sample(&mut rng, &[4, 5, 6], 2..=6, 1..=2, 1..=3);
        let cfg = MasterConfig::for_instance(&inst);
        let oracle = solve_explicit(&inst, &cfg, &solver, None).map_err(|e| e.to_string())?;
        let bnp = branch_and_price(&inst, &BnpConfig::for_instance(&inst), Some(EXACT_TIME_LIMIT))
            .map_err(|e| e.to_string())?;
        let heur = root_node_heuristic(&inst, &BnpConfig::for_instance(&inst), None).map_err(|e| e.to_string())?;
        emitted.push(&inst, &oracle.solution, "explicit");
        emitted.push(&inst, &bnp.solution, "branch-and-price");
        emitted.push(&inst, &heur.solution, "root heuristic");
        let (Some(a), Some(b)) = (oracle.objective(), bnp.objective()) else {
            failures.push(format!("#{i} ({}) missing objective", describe(&inst)));
            continue;
        };
        if oracle.status != SolveStatus::Optimal || !close(a, b) {
            failures.push(format!("#{i} ({}) explicit {a} [{}] vs bnp {b} [{}]", describe(&inst), oracle.status, bnp.status));
        } else if bnp.status != SolveStatus::Optimal {
            unproven.push(format!("#{i} ({}, {} nodes, gap {:.3})", describe(&inst), bnp.stats.processed, bnp.stats.gap));
        }
        nodes += bnp.stats.processed;
        runs.push(ExactRun { inst, explicit: a, bnp, heuristic: heur.objective() });
    }
    let proven = 100 - failures.len() - unproven.len();
    if failures.is_empty() && unproven.is_empty() {
        Ok(format!("100/100 instances agree, {nodes} nodes in total"))
    } else {
        let mut detail = format!("{proven}/100 proven equal");
        if !failures.is_empty() {
            detail += &format!("; {} mismatches: {}", failures.len(), failures.join("; "));
        }
        if !unproven.is_empty() {
            detail += &format!(
                "; {} not proven optimal within {EXACT_TIME_LIMIT}s though the incumbent equals the optimum: {}",
                unproven.len(),
                unproven.join("; ")
            );
        }
        Err(detail)
    }
}

fn pricing_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let solver = Solver::default();
    let mut failures = Vec::new();
    for i in 0..200 {
        let inst = sample(&mut rng, &[2, 3, 4, 5, 6, 7, 8], 1..=8, 1..=1, 1..=4);
        let rewards: Vec<f64> = (0..inst.requests().len())
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..150.0) })
            .collect();
        let dir = if rng.gen_bool(0.5) { Direction::Ascending } else { Direction::Descending };
        let q = inst.capacity();
        let milp = solve_mpsp(&inst, &rewards, dir, q, &solver).map_err(|e| e.to_string())?;
        let brute = brute_force_mpsp(&inst, &rewards, dir, Some(q)).map_err(|e| e.to_string())?;
        if !close(milp.profit, brute.profit) {
            failures.push(format!("#{i} capacitated {} vs {}", milp.profit, brute.profit));
        }
        let milp = solve_mpusp(&inst, &rewards, dir, &solver).map_err(|e| e.to_string())?;
        let brute = brute_force_mpsp(&inst, &rewards, dir, None).map_err(|e| e.to_string())?;
        if !close(milp.profit, brute.profit) {
            failures.push(format!("#{i} uncapacitated {} vs {}", milp.profit, brute.profit));
        }
    }
    if failures.is_empty() {
        Ok("200/200 configurations match enumeration, capacitated and uncapacitated".into())
    } else {
        Err(failures.join("; "))
    }
}

fn cg_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let solver = Solver::default();
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..30 {
        let inst = sample(&mut rng, &[4, 5, 6, 7, 8], 2..=6, 1..=2, 1..=3);
        let n = inst.stations();
        let cfg = MasterConfig::for_instance(&inst);
        let mut pool = ColumnPool::new(n).map_err(|e| e.to_string())?;
        let cg = column_generation(&inst, &[], &mut pool, &cfg, &solver, None).map_err(|e| e.to_string())?;
        let Some(lp) = cg.lp.as_ref().filter(|_| cg.proven) else {
            failures.push(format!("#{i} column generation did not finish"));
            continue;
        };
        let candidates: Vec<_> = enumerate_all_patterns(n)
            .map_err(|e| e.to_string())?
            .filter(|p| !p.is_single_stop())
            .collect();
        for k in 0..inst.vehicles() {
            for p in 1..=cfg.q {
                let dir = Direction::of_position(p);
                for pattern in &candidates {
                    let rc = reduced_cost(&inst, pattern, p, k, dir, &lp.duals).map_err(|e| e.to_string())?;
                    worst = worst.max(rc);
                    if rc > EPS {
                        failures.push(format!("#{i} pattern {pattern} at ({p},{k}) prices out at {rc}"));
                    }
                }
            }
        }
        let full = ColumnPool::with_patterns(n, full_pool(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let relaxation = solve_rrmp(&inst, &full, &cfg, &solver)
            .map_err(|e| e.to_string())?
            .ok_or("full relaxation infeasible")?;
        if !close(relaxation.objective, lp.objective) {
            failures.push(format!("#{i} final bound {} but full relaxation {}", lp.objective, relaxation.objective));
        }
    }
    if failures.is_empty() {
        Ok(format!("30/30 roots priced out, largest reduced cost {worst:.2e}, bounds equal the full relaxation"))
    } else {
        Err(failures.join("; "))
    }
}

fn bound_sandwich(runs: &[ExactRun]) -> Outcome {
    let mut failures = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let opt = run.explicit;
        let root = run.bnp.root_bound.unwrap_or(f64::NEG_INFINITY);
        if root < opt - EPS * (1.0 + opt.abs()) {
            failures.push(format!("#{i} root bound {root} below optimum {opt}"));
        }
        match run.heuristic {
            Some(h) if h <= opt + EPS * (1.0 + opt.abs()) => {}
            other => failures.push(format!("#{i} heuristic {other:?} above optimum {opt}")),
        }
        let incumbents: Vec<f64> = run.bnp.log.iter().map(|r| r.incumbent).filter(|v| v.is_finite()).collect();
        if incumbents.windows(2).any(|w| w[1] < w[0]) {
            failures.push(format!("#{i} ({}) incumbent decreased in the node log", describe(&run.inst)));
        }
    }
    if runs.len() != 100 {
        failures.push(format!("only {} runs available", runs.len()));
    }
    if failures.is_empty() {
        Ok(format!("{} runs: root bound >= optimum >= heuristic, incumbents monotone", runs.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn symmetry_neutrality(emitted: &mut Emitted) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let solver = Solver::default();
    let mut failures = Vec::new();
    for i in 0..30 {
        let inst = sample(&mut rng, &[4, 5, 6], 2..=5, 1..=2, 1..=3);
        let mut values = Vec::new();
        for (single, ordering) in [(true, true), (false, true), (true, false), (false, false)] {
            let config = MasterConfig {
                single_stop_symmetry: single,
                tour_length_ordering: ordering,
                ..MasterConfig::for_instance(&inst)
            };
            let res = solve_explicit(&inst, &config, &solver, None).map_err(|e| e.to_string())?;
            emitted.push(&inst, &res.solution, "symmetry setting");
            if res.status != SolveStatus::Optimal {
                failures.push(format!("#{i} ({}) ended {}", describe(&inst), res.status));
            }
            values.push(res.objective().unwrap_or(f64::NAN));
        }
        if !values.iter().all(|v| close(*v, values[0])) {
            failures.push(format!("#{i} ({}) objectives {values:?}", describe(&inst)));
        }
    }
    if failures.is_empty() {
        Ok("30/30 instances share one optimum across the four settings".into())
    } else {
        Err(failures.join("; "))
    }
}

fn position_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let solver = Solver::default();
    let mut failures = Vec::new();
    let mut fractions = Vec::new();
    for i in 0..20 {
        let inst = sample(&mut rng, &[4, 5], 2..=4, 1..=2, 1..=2);
        let full = 2 * inst.requests().len();
        let mut values = Vec::new();
        for q in 1..=full {
            let out = solve_explicit(&inst, &MasterConfig::with_positions(q), &solver, None).map_err(|e| e.to_string())?;
            values.push(out.objective().unwrap_or(f64::NAN));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0] - EPS * (1.0 + w[0].abs()))) {
            failures.push(format!("#{i} ({}) not monotone: {values:?}", describe(&inst)));
        }
        let best = values[full - 1];
        let first = values.iter().position(|v| close(*v, best)).map(|j| j + 1);
        match first {
            Some(q) => fractions.push(q as f64 / full as f64),
            None => failures.push(format!("#{i} optimum with 2m positions never reached")),
        }
    }
    if failures.is_empty() {
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        let max = fractions.iter().cloned().fold(0.0, f64::max);
        Ok(format!("20/20 monotone; optimum reached at {:.0}% of 2m on average, {:.0}% at most", 100.0 * mean, 100.0 * max))
    } else {
        Err(failures.join("; "))
    }
}

/// Independent structural check of an optimal gadget pattern that encodes a
/// clique: every base station, one vertex per gap, distinct vertices per side.
fn gadget_structure(spec: &GadgetSpec) -> Result<(), String> {
    let gadget = clique_to_mpusp(spec).map_err(|e| e.to_string())?;
    let best = solve_gadget(&gadget).map_err(|e| e.to_string())?;
    let b = spec.clique_size;
    for side in [Side::Left, Side::Right] {
        for j in 0..=b {
            if !best.pattern.contains(gadget.layout.base(side, j)) {
                return Err(format!("base {j} skipped"));
            }
        }
        let picks: Vec<_> = picked_vertices(&gadget, &best.pattern).into_iter().filter(|p| p.0 == side).collect();
        let gaps: Vec<usize> = picks.iter().map(|p| p.2).collect();
        if gaps != (0..b).collect::<Vec<_>>() {
            return Err(format!("gaps {gaps:?}"));
        }
        let mut vertices: Vec<usize> = picks.iter().map(|p| p.1).collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.len() != b {
            return Err("repeated vertex".into());
        }
    }
    Ok(())
}

fn gadget_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut cliques = 0;
    for b in [2, 3] {
        for vertices in b..=4 {
            for graph in Graph::all_on(vertices) {
                let spec = GadgetSpec::new(graph, b);
                let gadget = clique_to_mpusp(&spec).map_err(|e| e.to_string())?;
                checked += 1;
                if !verify_gadget(&gadget).map_err(|e| e.to_string())? {
                    failures.push(format!("b={b} graph {:?}", spec.graph));
                }
                if spec.graph.has_clique(b) {
                    cliques += 1;
                    if let Err(e) = gadget_structure(&spec) {
                        failures.push(format!("b={b} graph {:?}: {e}", spec.graph));
                    }
                }
            }
        }
    }
    let example = GadgetSpec::new(example_graph(), 3);
    let gadget = clique_to_mpusp(&example).map_err(|e| e.to_string())?;
    let best = solve_gadget(&gadget).map_err(|e| e.to_string())?;
    if !(best.profit >= gadget.threshold - 0.5) {
        failures.push(format!("example graph reaches {} below {}", best.profit, gadget.threshold));
    }
    let mut picked: Vec<usize> = picked_vertices(&gadget, &best.pattern).iter().map(|p| p.1 + 1).collect();
    picked.sort_unstable();
    picked.dedup();
    if picked != [1, 2, 4] {
        failures.push(format!("example graph picks vertices {picked:?}"));
    }
    if failures.is_empty() {
        Ok(format!("{checked} graphs equivalent ({cliques} with a clique), example graph picks {{1, 2, 4}}"))
    } else {
        Err(failures.join("; "))
    }
}

fn heuristic_quality(emitted: &mut Emitted) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let solver = Solver::default();
    let mut gaps = Vec::new();
    let mut proven_gaps = Vec::new();
    let mut bounded = 0;
    for _ in 0..50 {
        let inst = sample(&mut rng, &[5, 6, 7, 8], 4..=10, 1..=2, 1..=3);
        let oracle = solve_explicit(&inst, &MasterConfig::for_instance(&inst), &solver, Some(ORACLE_TIME_LIMIT))
            .map_err(|e| e.to_string())?;
        // An unproven oracle is replaced by its upper bound, which can only overstate the gap.
        let reference = match (oracle.status, oracle.objective(), oracle.bound) {
            (SolveStatus::Optimal, Some(opt), _) => opt,
            (_, _, Some(bound)) => {
                bounded += 1;
                bound
            }
            _ => return Err(format!("oracle gave neither optimum nor bound on {}", describe(&inst))),
        };
        let heur = root_node_heuristic(&inst, &BnpConfig::for_instance(&inst), None).map_err(|e| e.to_string())?;
        emitted.push(&inst, &oracle.solution, "explicit");
        emitted.push(&inst, &heur.solution, "root heuristic");
        let value = heur.objective().unwrap_or(0.0);
        let gap = if reference.abs() <= EPS { 0.0 } else { ((reference - value) / reference.abs()).max(0.0) };
        gaps.push(gap);
        if oracle.status == SolveStatus::Optimal {
            proven_gaps.push(gap);
        }
    }
    let within = gaps.iter().filter(|&&g| g <= 0.10).count();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let max = gaps.iter().cloned().fold(0.0, f64::max);
    let proven_within = proven_gaps.iter().filter(|&&g| g <= 0.10).count();
    let proven_mean = proven_gaps.iter().sum::<f64>() / proven_gaps.len().max(1) as f64;
    let detail = format!(
        "{within}/50 within 10%, mean gap {:.2}%, max {:.2}% ({bounded} gaps measured against the oracle bound; \
         against proven optima only: {proven_within}/{} within 10%, mean {:.2}%)",
        100.0 * mean,
        100.0 * max,
        proven_gaps.len(),
        100.0 * proven_mean
    );
    if within >= 45 && mean <= 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn validator_round_trip(emitted: &Emitted) -> Outcome {
    let dir = std::env::temp_dir().join(format!("lidarp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    for (i, (inst, sol, source)) in emitted.solutions.iter().enumerate() {
        let path = dir.join(format!("{i}.json"));
        write_solution(&path, sol).map_err(|e| e.to_string())?;
        let back = read_solution(&path).map_err(|e| e.to_string())?;
        if &back != sol {
            failures.push(format!("#{i} ({source}) changed in the file round trip"));
        }
        let report = validate_solution(inst, &back);
        if !report.is_valid() {
            failures.push(format!("#{i} ({source}): {:?}", report.violations));
        }
        if !close(report.recomputed_objective, back.objective) {
            failures.push(format!("#{i} ({source}) objective {} recomputed {}", back.objective, report.recomputed_objective));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    if emitted.solutions.is_empty() {
        return Err("no solutions collected".into());
    }
    if failures.is_empty() {
        Ok(format!("{} solutions re-validate with zero violations", emitted.solutions.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    for i in 0..8 {
        let inst = sample(&mut rng, &[5, 6, 7], 3..=7, 1..=2, 1..=3);
        let config = BnpConfig { node_limit: Some(DETERMINISM_NODES), ..BnpConfig::for_instance(&inst) };
        let a = branch_and_price(&inst, &config, None).map_err(|e| e.to_string())?;
        let b = branch_and_price(&inst, &config, None).map_err(|e| e.to_string())?;
        let same = a.objective() == b.objective()
            && a.solution == b.solution
            && a.stats.processed == b.stats.processed
            && a.pool.patterns() == b.pool.patterns()
            && a.log.len() == b.log.len()
            && a.log.iter().zip(&b.log).all(|(x, y)| x.seq == y.seq && x.node_bound == y.node_bound && x.outcome == y.outcome);
        if !same {
            failures.push(format!("#{i} ({}) branch-and-price runs differ", describe(&inst)));
        }
        let ha = root_node_heuristic(&inst, &config, None).map_err(|e| e.to_string())?;
        let hb = root_node_heuristic(&inst, &config, None).map_err(|e| e.to_string())?;
        if ha.solution != hb.solution || ha.pool.patterns() != hb.pool.patterns() {
            failures.push(format!("#{i} heuristic runs differ"));
        }
    }
    if failures.is_empty() {
        Ok(format!("8/8 instances: identical objectives, node counts, logs and pools (at most {DETERMINISM_NODES} nodes)"))
    } else {
        Err(failures.join("; "))
    }
}

fn report(id: usize, name: &str, started: Instant, outcome: Outcome) -> usize {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS {id:>2} {name}: {detail} ({secs:.1}s)");
            1
        }
        Err(detail) => {
            println!("FAIL {id:>2} {name}: {detail} ({secs:.1}s)");
            0
        }
    }
}

fn main() {
    let mut emitted = Emitted::default();
    let mut runs = Vec::new();
    let mut passed = 0;

    let t = Instant::now();
    passed += report(1, "branch-and-price matches the explicit model", t, exactness(&mut emitted, &mut runs));
    let t = Instant::now();
    passed += report(2, "pricing solvers match enumeration", t, pricing_correctness());
    let t = Instant::now();
    passed += report(3, "column generation stops only when nothing prices out", t, cg_soundness());
    let t = Instant::now();
    passed += report(4, "bound sandwich and monotone incumbents", t, bound_sandwich(&runs));
    let t = Instant::now();
    passed += report(5, "symmetry constraints keep the optimum", t, symmetry_neutrality(&mut emitted));
    let t = Instant::now();
    passed += report(6, "optimum grows with positions per vehicle", t, position_monotonicity());
    let t = Instant::now();
    passed += report(7, "clique gadgets reach the threshold exactly with a clique", t, gadget_equivalence());
    let t = Instant::now();
    passed += report(8, "root heuristic stays close to the optimum", t, heuristic_quality(&mut emitted));
    let t = Instant::now();
    passed += report(9, "emitted solutions re-validate", t, validator_round_trip(&emitted));
    let t = Instant::now();
    passed += report(10, "repeated runs are identical", t, determinism());

    println!("{passed}/10 criteria passed");
    if passed < 10 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
