use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use lidarp::master::InitialPool;
use lidarp::model::ENUMERATION_LIMIT;

use crate::run::{load, master_config, solve, Summary};
use crate::{Cli, Mode};

/// Symmetry settings of the grid: label, single-stop family, tour-length family.
pub const SYMMETRY_GRID: [(&str, bool, bool); 4] = [
    ("baseline", true, true),
    ("no-single-stop", false, true),
    ("no-tour-length", true, false),
    ("no-symmetry", false, false),
];

#[derive(Debug, Serialize)]
struct Row {
    instance: String,
    mode: String,
    objective: Option<f64>,
    bound: Option<f64>,
    gap: Option<f64>,
    time: f64,
    nodes: usize,
    columns: usize,
}

impl Row {
    fn new(summary: Summary, mode: String) -> Self {
        Row {
            instance: summary.instance,
            mode,
            objective: summary.objective,
            bound: summary.bound,
            gap: summary.gap,
            time: summary.seconds,
            nodes: summary.nodes,
            columns: summary.columns,
        }
    }
}

/// Instance files named directly or found as `*.json` in a directory.
fn instance_files(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in &cli.instance {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("listing {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        bail!("bench mode needs at least one --instance file or directory");
    }
    Ok(files)
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let modes = &cli.bench_modes;
    if let Some(m) = modes.iter().find(|m| !matches!(m, Mode::Explicit | Mode::Bnp | Mode::RootHeuristic)) {
        bail!("{} cannot be benchmarked", m.name());
    }
    let sink: Box<dyn io::Write> = match &cli.out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    for path in instance_files(cli)? {
        let loaded = load(&path, cli)?;
        let base = master_config(&loaded.instance, cli)?;
        for &mode in modes {
            if mode == Mode::Explicit && loaded.instance.stations() > ENUMERATION_LIMIT {
                log::warn!("{}: too many stations for the explicit model, skipped", loaded.name);
                continue;
            }
            let pool = if mode == Mode::Explicit { InitialPool::All } else { InitialPool::Standard };
            let grid: Vec<(String, bool, bool)> = if mode == Mode::Bnp && cli.symmetry_grid {
                SYMMETRY_GRID.iter().map(|&(l, s, t)| (format!("bnp/{l}"), s, t)).collect()
            } else {
                vec![(mode.name().to_string(), base.single_stop_symmetry, base.tour_length_ordering)]
            };
            for (label, single, ordering) in grid {
                let mut cfg = base.clone();
                cfg.single_stop_symmetry = single;
                cfg.tour_length_ordering = ordering;
                let (summary, _) = solve(mode, &loaded, &cfg, pool, cli)?;
                log::info!("{} {label}: {:?} in {:.2}s", summary.instance, summary.objective, summary.seconds);
                csv.serialize(Row::new(summary, label))?;
                csv.flush()?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
