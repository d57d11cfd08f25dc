use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use lidarp::backend::{BackendConfig, Solver};
use lidarp::bnp::{branch_and_price, root_node_heuristic, BnpConfig};
use lidarp::explicit::{positions_for_fraction, solve_integer, MasterConfig};
use lidarp::gadgets::{clique_to_mpusp, solve_gadget, verify_gadget, GadgetSpec, Graph};
use lidarp::master::InitialPool;
use lidarp::model::io::{write_instance, write_solution, InstanceFile};
use lidarp::model::{generate_instance, instance_name, validate_solution, Direction, Instance, Solution};
use lidarp::pricing::{solve_mpsp, solve_mpusp};

use crate::{bench, Cli, DirectionArg, Mode};

/// Time budget of the root heuristic when none is given.
const HEURISTIC_SECONDS: f64 = 900.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub w_pax: f64,
    pub w_dist: f64,
    pub positions: usize,
    pub single_stop_symmetry: bool,
    pub tour_length_ordering: bool,
    pub require_all_requests: bool,
    pub pool: String,
    pub seed: u64,
}

/// One solver run. Everything except `seconds` is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instance: String,
    pub mode: String,
    pub status: String,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub accepted: Option<usize>,
    pub nodes: usize,
    pub columns: usize,
    pub settings: Settings,
    pub seconds: f64,
}

pub struct Loaded {
    pub name: String,
    pub instance: Instance,
    pub rewards: Option<Vec<f64>>,
}

pub fn load(path: &Path, cli: &Cli) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: InstanceFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let rewards = file
        .provenance
        .as_ref()
        .and_then(|p| p.get("rewards"))
        .map(|r| serde_json::from_value::<Vec<f64>>(r.clone()))
        .transpose()
        .context("provenance rewards")?;
    let mut instance: Instance = file.try_into().with_context(|| format!("invalid instance {}", path.display()))?;
    if let Some(w) = cli.w_pax {
        instance.w_pax = w;
    }
    if let Some(w) = cli.w_dist {
        instance.w_dist = w;
    }
    let name = instance.name.clone().unwrap_or_else(|| {
        path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
    });
    Ok(Loaded { name, instance, rewards })
}

fn single_instance(cli: &Cli) -> Result<Loaded> {
    match cli.instance.as_slice() {
        [path] => load(path, cli),
        [] => bail!("--instance is required in {} mode", cli.mode.name()),
        _ => bail!("{} mode takes exactly one --instance", cli.mode.name()),
    }
}

pub fn master_config(instance: &Instance, cli: &Cli) -> Result<MasterConfig> {
    let mut cfg = MasterConfig::for_instance(instance);
    if let Some(f) = cli.positions_fraction {
        cfg.q = positions_for_fraction(instance, f)?;
    }
    cfg.single_stop_symmetry = !cli.no_symmetry_single_stop;
    cfg.tour_length_ordering = !cli.no_symmetry_tour_length;
    cfg.require_all_requests = cli.require_all_requests;
    Ok(cfg)
}

fn pool_spec(cli: &Cli, default: InitialPool) -> Result<InitialPool> {
    let Some(text) = &cli.pool else { return Ok(default) };
    Ok(match text.parse::<InitialPool>()? {
        InitialPool::Random { count, .. } => InitialPool::Random { count, seed: cli.seed },
        other => other,
    })
}

fn settings(instance: &Instance, cfg: &MasterConfig, pool: InitialPool, seed: u64) -> Settings {
    Settings {
        w_pax: instance.w_pax,
        w_dist: instance.w_dist,
        positions: cfg.q,
        single_stop_symmetry: cfg.single_stop_symmetry,
        tour_length_ordering: cfg.tour_length_ordering,
        require_all_requests: cfg.require_all_requests,
        pool: pool.to_string(),
        seed,
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Runs one solver mode and checks the solution it returns.
pub fn solve(
    mode: Mode,
    loaded: &Loaded,
    cfg: &MasterConfig,
    pool: InitialPool,
    cli: &Cli,
) -> Result<(Summary, Option<Solution>)> {
    let inst = &loaded.instance;
    let (status, solution, bound, gap, nodes, columns, seconds) = match mode {
        Mode::Explicit => {
            let patterns = pool.build(inst.stations())?;
            let solver = Solver::default();
            let out = solve_integer(inst, patterns.patterns(), cfg, &solver, cli.time_limit)?;
            let gap = out.gap();
            (out.status, out.solution, out.bound, gap, 0, patterns.len(), out.seconds)
        }
        Mode::Bnp => {
            let config = BnpConfig { master: cfg.clone(), initial_pool: pool, ..BnpConfig::for_instance(inst) };
            let res = branch_and_price(inst, &config, cli.time_limit)?;
            let gap = finite(res.stats.gap);
            (res.status, res.solution, finite(res.bound), gap, res.stats.processed, res.pool.len(), res.seconds)
        }
        Mode::RootHeuristic => {
            let config = BnpConfig { master: cfg.clone(), initial_pool: pool, ..BnpConfig::for_instance(inst) };
            let res = root_node_heuristic(inst, &config, Some(cli.time_limit.unwrap_or(HEURISTIC_SECONDS)))?;
            (res.status, res.solution, finite(res.bound), finite(res.gap), 1, res.pool.len(), res.seconds)
        }
        other => bail!("{} is not a solver mode", other.name()),
    };
    if let Some(sol) = &solution {
        let report = validate_solution(inst, sol);
        if !report.is_valid() {
            let list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            bail!("{} produced an invalid solution: {}", mode.name(), list.join("; "));
        }
    }
    let summary = Summary {
        instance: loaded.name.clone(),
        mode: mode.name().into(),
        status: status.to_string(),
        objective: solution.as_ref().map(|s| s.objective),
        bound,
        gap,
        accepted: solution.as_ref().map(Solution::accepted),
        nodes,
        columns,
        settings: settings(inst, cfg, pool, cli.seed),
        seconds,
    };
    Ok((summary, solution))
}

fn out_dir(cli: &Cli) -> Result<Option<PathBuf>> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    match cli.mode {
        Mode::Generate => generate(cli),
        Mode::Explicit | Mode::Bnp | Mode::RootHeuristic => solver_mode(cli),
        Mode::Mpsp => mpsp(cli),
        Mode::Gadget => gadget(cli),
        Mode::Validate => validate(cli),
        Mode::Bench => bench::run(cli),
    }
}

fn generate(cli: &Cli) -> Result<ExitCode> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for version in 0..cli.versions {
        let name = instance_name(cli.vehicles, cli.requests, version);
        let mut inst = generate_instance(cli.stations, cli.requests, cli.vehicles, cli.capacity, cli.seed + version as u64)?
            .with_name(name.clone());
        inst.w_pax = cli.w_pax.unwrap_or(inst.w_pax);
        inst.w_dist = cli.w_dist.unwrap_or(inst.w_dist);
        let path = dir.join(format!("{name}.json"));
        write_instance(&path, &inst)?;
        written.push(path.display().to_string());
    }
    print_json(&json!({ "mode": "generate", "files": written }))?;
    Ok(ExitCode::SUCCESS)
}

fn solver_mode(cli: &Cli) -> Result<ExitCode> {
    let loaded = single_instance(cli)?;
    let cfg = master_config(&loaded.instance, cli)?;
    let default = if cli.mode == Mode::Explicit { InitialPool::All } else { InitialPool::Standard };
    let pool = pool_spec(cli, default)?;
    let (summary, solution) = solve(cli.mode, &loaded, &cfg, pool, cli)?;
    if let Some(dir) = out_dir(cli)? {
        let stem = format!("{}.{}", loaded.name, cli.mode.name());
        write_json(&dir.join(format!("{stem}.summary.json")), &summary)?;
        if let Some(sol) = &solution {
            write_solution(dir.join(format!("{stem}.solution.json")), sol)?;
        }
    }
    print_json(&summary)?;
    Ok(ExitCode::SUCCESS)
}

fn mpsp(cli: &Cli) -> Result<ExitCode> {
    let loaded = single_instance(cli)?;
    let inst = &loaded.instance;
    let rewards = match &loaded.rewards {
        Some(r) => r.clone(),
        None => inst.requests().iter().map(|r| inst.request_value(r)).collect(),
    };
    let dir = match cli.direction {
        DirectionArg::Asc => Direction::Ascending,
        DirectionArg::Desc => Direction::Descending,
    };
    let solver = Solver::from_config(&BackendConfig::default())?;
    let best = if cli.uncapacitated {
        solve_mpusp(inst, &rewards, dir, &solver)?
    } else {
        solve_mpsp(inst, &rewards, dir, inst.capacity(), &solver)?
    };
    let stops: Vec<usize> = best.pattern.stops_in(dir).into_iter().map(|h| h + 1).collect();
    let record = json!({
        "instance": loaded.name,
        "mode": if cli.uncapacitated { "mpusp" } else { "mpsp" },
        "profit": best.profit,
        "stops": stops,
        "accepted": best.accepted,
    });
    if let Some(out) = out_dir(cli)? {
        write_json(&out.join(format!("{}.mpsp.json", loaded.name)), &record)?;
    }
    print_json(&record)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_graph(text: &str, vertices: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (u, v) = part.split_once('-').ok_or_else(|| anyhow!("edge `{part}` is not of the form u-v"))?;
        let (u, v): (usize, usize) = (u.trim().parse()?, v.trim().parse()?);
        if u == 0 || v == 0 {
            bail!("vertices are numbered from 1");
        }
        edges.push((u - 1, v - 1));
    }
    let largest = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = vertices.unwrap_or(largest);
    if n < largest {
        bail!("--vertices {n} is smaller than the largest edge endpoint {largest}");
    }
    Ok(Graph::new(n, edges)?)
}

fn gadget(cli: &Cli) -> Result<ExitCode> {
    let graph = parse_graph(&cli.graph, cli.vertices)?;
    let spec = GadgetSpec::new(graph, cli.clique_size);
    let gadget = clique_to_mpusp(&spec)?;
    let name = gadget.instance.name.clone().unwrap_or_else(|| "gadget".into());
    let mut record = json!({
        "mode": "gadget",
        "instance": name,
        "stations": gadget.instance.stations(),
        "requests": gadget.instance.requests().len(),
        "threshold": gadget.threshold,
    });
    if let Some(dir) = out_dir(cli)? {
        let path = dir.join(format!("{name}.json"));
        write_json(&path, &gadget.to_file())?;
        record["file"] = json!(path.display().to_string());
    }
    let mut code = ExitCode::SUCCESS;
    if cli.verify {
        let best = solve_gadget(&gadget)?;
        let equivalent = verify_gadget(&gadget)?;
        record["optimum"] = json!(best.profit);
        record["has_clique"] = json!(spec.graph.has_clique(spec.clique_size));
        record["equivalent"] = json!(equivalent);
        if !equivalent {
            code = ExitCode::FAILURE;
        }
    }
    print_json(&record)?;
    Ok(code)
}

fn validate(cli: &Cli) -> Result<ExitCode> {
    let loaded = single_instance(cli)?;
    let path = cli.solution.as_ref().ok_or_else(|| anyhow!("--solution is required in validate mode"))?;
    let solution = lidarp::model::io::read_solution(path).with_context(|| format!("reading {}", path.display()))?;
    let report = validate_solution(&loaded.instance, &solution);
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    print_json(&json!({
        "mode": "validate",
        "instance": loaded.name,
        "valid": report.is_valid(),
        "stored_objective": solution.objective,
        "recomputed_objective": report.recomputed_objective,
        "violations": violations,
    }))?;
    Ok(if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_parsing() {
        let g = parse_graph("1-2, 1-4,2-4,3-4", None).unwrap();
        assert_eq!(g.vertices, 4);
        assert_eq!(g.edges[1], (0, 3));
        assert_eq!(parse_graph("", Some(3)).unwrap().edges.len(), 0);
        assert!(parse_graph("0-1", None).is_err());
        assert!(parse_graph("1-5", Some(3)).is_err());
        assert!(parse_graph("12", None).is_err());
    }
}
