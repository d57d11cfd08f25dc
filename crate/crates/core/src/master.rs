//! Restricted master problems over a growing column pool and the dual prices
//! they hand to pricing.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backend::{SolveStatus, Solver};
use crate::error::{Error, Result};
use crate::explicit::{build_master, full_pool, random_pool, solve_integer, IntegerOutcome, MasterConfig, MasterModel, MasterRow, MasterVar};
use crate::model::{Instance, StoppingPattern};

/// Distinct stopping patterns with stable indices. Always holds every
/// single-stop pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnPool {
    n: usize,
    patterns: Vec<StoppingPattern>,
    index: HashMap<StoppingPattern, usize>,
}

impl ColumnPool {
    /// Single-stop patterns followed by the pattern stopping everywhere.
    pub fn new(n: usize) -> Result<Self> {
        let mut pool = ColumnPool::singles(n)?;
        pool.add_columns([StoppingPattern::full(n)]);
        Ok(pool)
    }

    pub fn singles(n: usize) -> Result<Self> {
        let mut pool = ColumnPool {
            n,
            patterns: Vec::new(),
            index: HashMap::new(),
        };
        for h in 0..n {
            pool.add_columns([StoppingPattern::single(n, h)?]);
        }
        Ok(pool)
    }

    /// Single stops first, then `patterns` in order.
    pub fn with_patterns(n: usize, patterns: impl IntoIterator<Item = StoppingPattern>) -> Result<Self> {
        let mut pool = ColumnPool::singles(n)?;
        let patterns: Vec<_> = patterns.into_iter().collect();
        if let Some(p) = patterns.iter().find(|p| p.stations() != n) {
            return Err(Error::InvalidPattern(format!("pattern {p} does not have {n} stations")));
        }
        pool.add_columns(patterns);
        Ok(pool)
    }

    /// Appends the patterns not yet pooled and returns their new indices.
    pub fn add_columns(&mut self, patterns: impl IntoIterator<Item = StoppingPattern>) -> Vec<usize> {
        let mut added = Vec::new();
        for p in patterns {
            debug_assert_eq!(p.stations(), self.n);
            if self.index.contains_key(&p) {
                continue;
            }
            let j = self.patterns.len();
            self.index.insert(p.clone(), j);
            self.patterns.push(p);
            added.push(j);
        }
        added
    }

    pub fn stations(&self) -> usize {
        self.n
    }

    pub fn patterns(&self) -> &[StoppingPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<&StoppingPattern> {
        self.patterns.get(j)
    }

    pub fn index_of(&self, pattern: &StoppingPattern) -> Option<usize> {
        self.index.get(pattern).copied()
    }
}

/// Which patterns a pool starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPool {
    /// Single stops plus the full pattern.
    #[default]
    Standard,
    /// Single stops plus `count` random multi-stop patterns.
    Random { count: usize, seed: u64 },
    /// Every pattern; only for small lines.
    All,
}

impl InitialPool {
    pub fn build(&self, n: usize) -> Result<ColumnPool> {
        match *self {
            InitialPool::Standard => ColumnPool::new(n),
            InitialPool::Random { count, seed } => ColumnPool::with_patterns(n, random_pool(n, count, seed)?),
            InitialPool::All => ColumnPool::with_patterns(n, full_pool(n)?),
        }
    }
}

impl fmt::Display for InitialPool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialPool::Standard => write!(f, "standard"),
            InitialPool::Random { count, .. } => write!(f, "random:{count}"),
            InitialPool::All => write!(f, "all"),
        }
    }
}

impl FromStr for InitialPool {
    type Err = Error;

    /// Parses `standard`, `all` or `random:<k>`; the seed starts at 0.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(InitialPool::Standard),
            "all" => Ok(InitialPool::All),
            _ => s
                .strip_prefix("random:")
                .and_then(|k| k.parse().ok())
                .map(|count| InitialPool::Random { count, seed: 0 })
                .ok_or_else(|| Error::Config(format!("unknown pool `{s}`, expected standard, all or random:<k>"))),
        }
    }
}

/// Add `patterns` to `pool`; returns the indices of the genuinely new ones.
pub fn add_columns(pool: &mut ColumnPool, patterns: impl IntoIterator<Item = StoppingPattern>) -> Vec<usize> {
    pool.add_columns(patterns)
}

/// Row duals of a relaxed restricted master, keyed by meaning.
///
/// Each value is the rate at which the relaxation's optimum grows with the
/// right-hand side of its row, so `<=` rows carry nonnegative prices.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValues {
    n: usize,
    q: usize,
    vehicles: usize,
    convexity: Vec<f64>,
    coverage: HashMap<(usize, usize, usize), f64>,
    start_link: Vec<f64>,
    end_link: Vec<f64>,
    length: Vec<f64>,
    parking: HashMap<(usize, usize, usize), f64>,
}

impl DualValues {
    /// All prices zero.
    pub fn zero(n: usize, q: usize, vehicles: usize) -> Self {
        DualValues {
            n,
            q,
            vehicles,
            convexity: vec![0.0; q * vehicles],
            coverage: HashMap::new(),
            start_link: vec![0.0; q * vehicles * n],
            end_link: vec![0.0; q * vehicles * n],
            length: vec![0.0; vehicles],
            parking: HashMap::new(),
        }
    }

    pub fn stations(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> usize {
        self.q
    }

    pub fn vehicles(&self) -> usize {
        self.vehicles
    }

    fn slot(&self, p: usize, k: usize) -> Result<usize> {
        if p == 0 || p > self.q || k >= self.vehicles {
            return Err(Error::MissingDual(format!("position {p} of vehicle {k}")));
        }
        Ok((p - 1) * self.vehicles + k)
    }

    fn station_slot(&self, h: usize, p: usize, k: usize) -> Result<usize> {
        if h >= self.n {
            return Err(Error::MissingDual(format!("station {h}")));
        }
        Ok(self.slot(p, k)? * self.n + h)
    }

    /// Price of the one-pattern-per-position row.
    pub fn convexity(&self, p: usize, k: usize) -> Result<f64> {
        Ok(self.convexity[self.slot(p, k)?])
    }

    /// Price of serving request `r` at `(p, k)`. Zero for requests that do not
    /// match the position's direction.
    pub fn coverage(&self, r: usize, p: usize, k: usize) -> Result<f64> {
        self.slot(p, k)?;
        Ok(self.coverage.get(&(r, p, k)).copied().unwrap_or(0.0))
    }

    pub fn start_link(&self, h: usize, p: usize, k: usize) -> Result<f64> {
        Ok(self.start_link[self.station_slot(h, p, k)?])
    }

    pub fn end_link(&self, h: usize, p: usize, k: usize) -> Result<f64> {
        Ok(self.end_link[self.station_slot(h, p, k)?])
    }

    /// Price per unit of tour length of vehicle `k`.
    pub fn length(&self, k: usize) -> Result<f64> {
        self.length
            .get(k)
            .copied()
            .ok_or_else(|| Error::MissingDual(format!("length of vehicle {k}")))
    }

    /// Price of the parking row of single-stop column `j` at `(p, k)`.
    pub fn parking(&self, j: usize, p: usize, k: usize) -> Option<f64> {
        self.parking.get(&(j, p, k)).copied()
    }

    pub fn set_convexity(&mut self, p: usize, k: usize, value: f64) -> Result<()> {
        let i = self.slot(p, k)?;
        self.convexity[i] = value;
        Ok(())
    }

    pub fn set_coverage(&mut self, r: usize, p: usize, k: usize, value: f64) -> Result<()> {
        self.slot(p, k)?;
        self.coverage.insert((r, p, k), value);
        Ok(())
    }

    pub fn set_start_link(&mut self, h: usize, p: usize, k: usize, value: f64) -> Result<()> {
        let i = self.station_slot(h, p, k)?;
        self.start_link[i] = value;
        Ok(())
    }

    pub fn set_end_link(&mut self, h: usize, p: usize, k: usize, value: f64) -> Result<()> {
        let i = self.station_slot(h, p, k)?;
        self.end_link[i] = value;
        Ok(())
    }

    pub fn set_length(&mut self, k: usize, value: f64) -> Result<()> {
        let slot = self
            .length
            .get_mut(k)
            .ok_or_else(|| Error::MissingDual(format!("length of vehicle {k}")))?;
        *slot = value;
        Ok(())
    }

    /// Maps row duals of a solved master onto their roles.
    pub fn from_rows(master: &MasterModel, n: usize, duals: &[f64]) -> Result<Self> {
        let mut out = DualValues::zero(n, master.q, master.vehicles);
        for (row, key) in master.model.rows() {
            let y = duals[row.index()];
            match *key {
                MasterRow::Convexity { position, vehicle } => out.set_convexity(position, vehicle, y)?,
                MasterRow::Coverage { request, position, vehicle } => out.set_coverage(request, position, vehicle, y)?,
                MasterRow::StartLink { station, position, vehicle } => out.set_start_link(station, position, vehicle, y)?,
                MasterRow::EndLink { station, position, vehicle } => out.set_end_link(station, position, vehicle, y)?,
                MasterRow::LengthLink { vehicle } => out.set_length(vehicle, y)?,
                MasterRow::Parking { pattern, position, vehicle } => {
                    out.parking.insert((pattern, position, vehicle), y);
                }
                _ => {}
            }
        }
        Ok(out)
    }
}

/// Optimal solution of a relaxed restricted master.
#[derive(Debug, Clone)]
pub struct RrmpSolution {
    pub objective: f64,
    pub master: MasterModel,
    pub primal: Vec<f64>,
    pub duals: DualValues,
}

impl RrmpSolution {
    pub fn value(&self, key: &MasterVar) -> f64 {
        self.master.value(&self.primal, key)
    }

    /// Whether any artificial column carries weight.
    pub fn uses_artificial(&self) -> bool {
        self.master
            .model
            .vars()
            .any(|(v, key)| matches!(key, MasterVar::Artificial { .. }) && self.primal[v.index()] > crate::model::TOLERANCE)
    }
}

/// Solves the relaxation over `pool`. `Ok(None)` means the fixings make the
/// relaxation infeasible.
pub fn solve_rrmp(
    instance: &Instance,
    pool: &ColumnPool,
    config: &MasterConfig,
    solver: &Solver,
) -> Result<Option<RrmpSolution>> {
    let config = MasterConfig { relaxed: true, ..config.clone() };
    let master = build_master(instance, pool.patterns(), &config)?;
    let res = solver.solve_lp(&master.model)?;
    match res.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Ok(None),
        other => return Err(Error::Backend(format!("restricted relaxation ended with status {other}"))),
    }
    let primal = res.primal().map(<[f64]>::to_vec).unwrap_or_default();
    let duals = res
        .duals()
        .ok_or_else(|| Error::Backend("backend returned no duals for an optimal LP".into()))?;
    let duals = DualValues::from_rows(&master, instance.stations(), duals)?;
    Ok(Some(RrmpSolution {
        objective: res.objective.unwrap_or(0.0),
        master,
        primal,
        duals,
    }))
}

/// Integer master over the pool. Falls back to the all-idle solution when the
/// solver stops without an incumbent.
pub fn solve_rmp_integer(
    instance: &Instance,
    pool: &ColumnPool,
    config: &MasterConfig,
    solver: &Solver,
    time_limit: Option<f64>,
) -> Result<IntegerOutcome> {
    let config = MasterConfig { artificial_columns: false, ..config.clone() };
    solve_integer(instance, pool.patterns(), &config, solver, time_limit)
}

#[cfg(test)]
mod tests {

    #[test]
    fn initial_pool_parsing() {
        assert_eq!("standard".parse::<InitialPool>().unwrap(), InitialPool::Standard);
        assert_eq!("random:7".parse::<InitialPool>().unwrap(), InitialPool::Random { count: 7, seed: 0 });
        assert!("random:x".parse::<InitialPool>().is_err());
        assert_eq!(InitialPool::All.build(4).unwrap().len(), 15);
        assert_eq!(InitialPool::Standard.build(4).unwrap().len(), 5);
        assert_eq!(InitialPool::Random { count: 3, seed: 1 }.build(4).unwrap().len(), 7);
        assert_eq!(InitialPool::Random { count: 3, seed: 0 }.to_string(), "random:3");
    }

    use super::*;
    use crate::explicit::full_pool;
    use crate::model::generate_instance;

    #[test]
    fn pool_deduplicates() {
        let mut pool = ColumnPool::singles(4).unwrap();
        assert_eq!(pool.len(), 4);
        assert!(pool.add_columns([StoppingPattern::single(4, 2).unwrap()]).is_empty());
        assert_eq!(pool.add_columns([StoppingPattern::full(4)]), vec![4]);
        let fresh = [
            StoppingPattern::from_stops(4, &[0, 1]).unwrap(),
            StoppingPattern::from_stops(4, &[1, 3]).unwrap(),
            StoppingPattern::from_stops(4, &[0, 1]).unwrap(),
        ];
        assert_eq!(add_columns(&mut pool, fresh), vec![5, 6]);
        assert_eq!(pool.len(), 7);
        assert_eq!(pool.index_of(&StoppingPattern::from_stops(4, &[1, 3]).unwrap()), Some(6));
    }

    #[test]
    fn initial_pool_has_singles_and_full() {
        let pool = ColumnPool::new(3).unwrap();
        assert_eq!(pool.len(), 4);
        assert!(pool.patterns()[..3].iter().all(StoppingPattern::is_single_stop));
        assert_eq!(pool.patterns()[3], StoppingPattern::full(3));
        assert_eq!(ColumnPool::new(1).unwrap().len(), 1);
    }

    #[test]
    fn no_requests_gives_zero_bound_and_prices() {
        let inst = Instance::on_line(&[0.0, 1.0, 2.0], vec![], 1, 1).unwrap();
        let pool = ColumnPool::new(3).unwrap();
        let lp = solve_rrmp(&inst, &pool, &MasterConfig::for_instance(&inst), &Solver::default())
            .unwrap()
            .unwrap();
        assert!(lp.objective.abs() < 1e-9);
        assert!(lp.duals.coverage.values().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn relaxation_dominates_integer_rmp() {
        let solver = Solver::default();
        for seed in 0..4 {
            let inst = generate_instance(5, 3, 2, 1, seed).unwrap();
            let pool = ColumnPool::new(5).unwrap();
            let config = MasterConfig::for_instance(&inst);
            let lp = solve_rrmp(&inst, &pool, &config, &solver).unwrap().unwrap();
            let ip = solve_rmp_integer(&inst, &pool, &config, &solver, None).unwrap();
            assert!(lp.objective >= ip.objective().unwrap() - 1e-6);
        }
    }

    #[test]
    fn pooled_columns_price_out() {
        let solver = Solver::default();
        let inst = generate_instance(4, 3, 1, 2, 3).unwrap();
        let pool = ColumnPool::with_patterns(4, full_pool(4).unwrap()).unwrap();
        let config = MasterConfig::for_instance(&inst);
        let lp = solve_rrmp(&inst, &pool, &config, &solver).unwrap().unwrap();
        for p in 1..=config.q {
            let dir = crate::model::Direction::of_position(p);
            for pat in pool.patterns().iter().filter(|p| !p.is_single_stop()) {
                let rc = crate::pricing::reduced_cost(&inst, pat, p, 0, dir, &lp.duals).unwrap();
                assert!(rc <= 1e-6, "pattern {pat} at {p}: {rc}");
            }
        }
    }

    #[test]
    fn require_all_with_singles_only_is_infeasible() {
        let inst = Instance::on_line(&[0.0, 1.0], vec![(0, 1)], 1, 1).unwrap();
        let pool = ColumnPool::singles(2).unwrap();
        let config = MasterConfig { require_all_requests: true, ..MasterConfig::for_instance(&inst) };
        let out = solve_rmp_integer(&inst, &pool, &config, &Solver::default(), None).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(solve_rrmp(&inst, &pool, &config, &Solver::default()).unwrap().is_none());
    }

    #[test]
    fn missing_slots_are_reported() {
        let d = DualValues::zero(3, 2, 1);
        assert!(matches!(d.convexity(3, 0), Err(Error::MissingDual(_))));
        assert!(matches!(d.start_link(5, 1, 0), Err(Error::MissingDual(_))));
        assert!(d.length(1).is_err());
    }
}
