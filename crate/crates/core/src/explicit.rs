//! The pattern-assignment MILP over a given set of stopping patterns.
//!
//! Every vehicle drives `q` positions; odd positions ascend and even positions
//! descend. Each position receives exactly one pattern from the pool (idle
//! positions use a single-stop pattern) and requests are assigned to
//! direction-compatible positions whose pattern stops at both ends. Over the
//! complete pattern set the model is exact; over a column pool it is the
//! restricted master problem.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{Key, ModelHandle, RowSense, SolveStatus, Solver, VarId, VarKind};
use crate::error::{Error, Result};
use crate::model::{
    enumerate_all_patterns, overlap_groups, Assignment, Direction, Instance, Solution, StoppingPattern,
    TourLeg, ENUMERATION_LIMIT, TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MasterVar {
    /// Request `request` rides on `position` of `vehicle`.
    Assign { request: usize, position: usize, vehicle: usize },
    /// Pool column `pattern` is driven at `position` of `vehicle`.
    Pattern { pattern: usize, position: usize, vehicle: usize },
    Start { station: usize, position: usize, vehicle: usize },
    End { station: usize, position: usize, vehicle: usize },
    TourLength { vehicle: usize },
    /// Penalised placeholder that serves every request of a position; keeps
    /// a restricted relaxation feasible under branching fixings.
    Artificial { position: usize, vehicle: usize },
}

impl fmt::Display for MasterVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MasterVar::Assign { request, position, vehicle } => write!(f, "assign({request},{position},{vehicle})"),
            MasterVar::Pattern { pattern, position, vehicle } => write!(f, "pattern({pattern},{position},{vehicle})"),
            MasterVar::Start { station, position, vehicle } => write!(f, "start({station},{position},{vehicle})"),
            MasterVar::End { station, position, vehicle } => write!(f, "end({station},{position},{vehicle})"),
            MasterVar::TourLength { vehicle } => write!(f, "length({vehicle})"),
            MasterVar::Artificial { position, vehicle } => write!(f, "artificial({position},{vehicle})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MasterRow {
    ServeOnce { request: usize },
    Capacity { segment: usize, position: usize, vehicle: usize },
    Continuity { station: usize, position: usize, vehicle: usize },
    OneStart { position: usize, vehicle: usize },
    OneEnd { position: usize, vehicle: usize },
    Convexity { position: usize, vehicle: usize },
    Coverage { request: usize, position: usize, vehicle: usize },
    StartLink { station: usize, position: usize, vehicle: usize },
    EndLink { station: usize, position: usize, vehicle: usize },
    LengthLink { vehicle: usize },
    Parking { pattern: usize, position: usize, vehicle: usize },
    LengthOrder { vehicle: usize },
}

impl fmt::Display for MasterRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MasterRow::ServeOnce { request } => write!(f, "once({request})"),
            MasterRow::Capacity { segment, position, vehicle } => write!(f, "cap({segment},{position},{vehicle})"),
            MasterRow::Continuity { station, position, vehicle } => write!(f, "cont({station},{position},{vehicle})"),
            MasterRow::OneStart { position, vehicle } => write!(f, "onestart({position},{vehicle})"),
            MasterRow::OneEnd { position, vehicle } => write!(f, "oneend({position},{vehicle})"),
            MasterRow::Convexity { position, vehicle } => write!(f, "convex({position},{vehicle})"),
            MasterRow::Coverage { request, position, vehicle } => write!(f, "cover({request},{position},{vehicle})"),
            MasterRow::StartLink { station, position, vehicle } => write!(f, "slink({station},{position},{vehicle})"),
            MasterRow::EndLink { station, position, vehicle } => write!(f, "elink({station},{position},{vehicle})"),
            MasterRow::LengthLink { vehicle } => write!(f, "len({vehicle})"),
            MasterRow::Parking { pattern, position, vehicle } => write!(f, "park({pattern},{position},{vehicle})"),
            MasterRow::LengthOrder { vehicle } => write!(f, "order({vehicle})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterConfig {
    /// Positions per vehicle.
    pub q: usize,
    pub relaxed: bool,
    /// Once a vehicle parks on the same single stop twice in a row it stays.
    pub single_stop_symmetry: bool,
    /// Tour lengths are non-increasing in the vehicle index.
    pub tour_length_ordering: bool,
    /// Variable fixings from branching, applied as bounds.
    pub fixings: Vec<(MasterVar, u8)>,
    pub require_all_requests: bool,
    /// Adds a penalised artificial column per position.
    pub artificial_columns: bool,
}

impl MasterConfig {
    /// Defaults with `2m` positions, both symmetry families on.
    pub fn for_instance(instance: &Instance) -> Self {
        MasterConfig::with_positions(default_positions(instance))
    }

    pub fn with_positions(q: usize) -> Self {
        MasterConfig {
            q,
            relaxed: false,
            single_stop_symmetry: true,
            tour_length_ordering: true,
            fixings: Vec::new(),
            require_all_requests: false,
            artificial_columns: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::Config("at least one position per vehicle is required".into()));
        }
        for (key, value) in &self.fixings {
            if !matches!(key, MasterVar::Assign { .. } | MasterVar::Pattern { .. }) {
                return Err(Error::Config(format!("fixing on {key}: only assignment and pattern variables can be fixed")));
            }
            if *value > 1 {
                return Err(Error::Config(format!("fixing on {key}: value {value} is not binary")));
            }
        }
        Ok(())
    }
}

/// Positions per vehicle when none are given: twice the request count.
pub fn default_positions(instance: &Instance) -> usize {
    (2 * instance.requests().len()).max(1)
}

/// Positions for a fraction of the default `2m`, rounded up.
pub fn positions_for_fraction(instance: &Instance, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("positions fraction must lie in (0, 1], got {fraction}")));
    }
    Ok(((default_positions(instance) as f64 * fraction).ceil() as usize).max(1))
}

/// A built master model together with the data needed to read it back.
#[derive(Debug, Clone)]
pub struct MasterModel {
    pub model: ModelHandle<MasterVar, MasterRow>,
    pub q: usize,
    pub vehicles: usize,
    pub pool_size: usize,
}

impl MasterModel {
    pub fn value(&self, primal: &[f64], key: &MasterVar) -> f64 {
        self.model.var(key).map_or(0.0, |v| primal[v.index()])
    }
}

/// Objective penalty of the artificial column: larger than any attainable
/// objective swing.
pub fn artificial_penalty(instance: &Instance) -> f64 {
    let rewards: f64 = instance.requests().iter().map(|r| instance.request_value(r)).sum();
    let n = instance.stations();
    let mut diameter: f64 = 0.0;
    for g in 0..n {
        for h in 0..n {
            diameter = diameter.max(instance.distance(g, h));
        }
    }
    1000.0 * (1.0 + rewards + instance.w_dist * diameter * n as f64)
}

pub fn build_master(instance: &Instance, pool: &[StoppingPattern], config: &MasterConfig) -> Result<MasterModel> {
    config.validate()?;
    let n = instance.stations();
    if let Some(p) = pool.iter().find(|p| p.stations() != n) {
        return Err(Error::InvalidPattern(format!("pattern {p} has {} stations, instance has {n}", p.stations())));
    }
    if config.single_stop_symmetry {
        let singles: HashSet<usize> = pool.iter().filter(|p| p.is_single_stop()).map(|p| p.lowest()).collect();
        if singles.len() < n {
            return Err(Error::Config(
                "single-stop symmetry rows require every single-stop pattern in the pool".into(),
            ));
        }
    }

    let q = config.q;
    let c = instance.vehicles();
    let bin = if config.relaxed { VarKind::Continuous } else { VarKind::Binary };
    let mut m: ModelHandle<MasterVar, MasterRow> = ModelHandle::new();
    let lengths: Vec<f64> = pool.iter().map(|p| p.length(instance)).collect();
    let groups = [Direction::Ascending, Direction::Descending].map(|d| overlap_groups(instance, d));
    let penalty = artificial_penalty(instance);

    for k in 0..c {
        for p in 1..=q {
            let dir = Direction::of_position(p);
            for r in instance.requests_in(dir) {
                let value = instance.request_value(r);
                m.add_var(MasterVar::Assign { request: r.id, position: p, vehicle: k }, bin, 0.0, 1.0, value)?;
            }
            for j in 0..pool.len() {
                m.add_var(MasterVar::Pattern { pattern: j, position: p, vehicle: k }, bin, 0.0, 1.0, 0.0)?;
            }
            if config.artificial_columns {
                m.add_var(MasterVar::Artificial { position: p, vehicle: k }, VarKind::Continuous, 0.0, 1.0, -penalty)?;
            }
            for h in 0..n {
                m.add_var(MasterVar::Start { station: h, position: p, vehicle: k }, bin, 0.0, 1.0, 0.0)?;
                m.add_var(MasterVar::End { station: h, position: p, vehicle: k }, bin, 0.0, 1.0, 0.0)?;
            }
        }
        m.add_var(MasterVar::TourLength { vehicle: k }, VarKind::Continuous, 0.0, f64::INFINITY, -instance.w_dist)?;
    }

    let var = |m: &ModelHandle<MasterVar, MasterRow>, key: MasterVar| m.var(&key).expect("declared above");

    for r in instance.requests() {
        let dir = r.direction();
        let terms = (0..c)
            .flat_map(|k| (1..=q).filter(move |&p| Direction::of_position(p) == dir).map(move |p| (p, k)))
            .map(|(p, k)| (var(&m, MasterVar::Assign { request: r.id, position: p, vehicle: k }), 1.0))
            .collect();
        let sense = if config.require_all_requests { RowSense::Eq } else { RowSense::Le };
        m.add_row(MasterRow::ServeOnce { request: r.id }, terms, sense, 1.0)?;
    }

    for k in 0..c {
        for p in 1..=q {
            let dir = Direction::of_position(p);
            let idx = dir as usize;
            for g in &groups[idx] {
                let terms = g
                    .members
                    .iter()
                    .map(|&r| (var(&m, MasterVar::Assign { request: r, position: p, vehicle: k }), 1.0))
                    .collect();
                let key = MasterRow::Capacity { segment: g.segment, position: p, vehicle: k };
                m.add_row(key, terms, RowSense::Le, instance.capacity() as f64)?;
            }
            if p >= 2 {
                for h in 0..n {
                    let terms = vec![
                        (var(&m, MasterVar::Start { station: h, position: p, vehicle: k }), 1.0),
                        (var(&m, MasterVar::End { station: h, position: p - 1, vehicle: k }), -1.0),
                    ];
                    m.add_row(MasterRow::Continuity { station: h, position: p, vehicle: k }, terms, RowSense::Eq, 0.0)?;
                }
            }
            let starts = (0..n).map(|h| (var(&m, MasterVar::Start { station: h, position: p, vehicle: k }), 1.0)).collect();
            m.add_row(MasterRow::OneStart { position: p, vehicle: k }, starts, RowSense::Eq, 1.0)?;
            let ends = (0..n).map(|h| (var(&m, MasterVar::End { station: h, position: p, vehicle: k }), 1.0)).collect();
            m.add_row(MasterRow::OneEnd { position: p, vehicle: k }, ends, RowSense::Eq, 1.0)?;

            let artificial = m.var(&MasterVar::Artificial { position: p, vehicle: k });
            let mut convex: Vec<(VarId, f64)> = (0..pool.len())
                .map(|j| (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), 1.0))
                .collect();
            convex.extend(artificial.map(|a| (a, 1.0)));
            m.add_row(MasterRow::Convexity { position: p, vehicle: k }, convex, RowSense::Eq, 1.0)?;

            for r in instance.requests_in(dir) {
                let mut terms = vec![(var(&m, MasterVar::Assign { request: r.id, position: p, vehicle: k }), 1.0)];
                terms.extend(
                    pool.iter()
                        .enumerate()
                        .filter(|(_, pat)| pat.serves(r))
                        .map(|(j, _)| (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), -1.0)),
                );
                terms.extend(artificial.map(|a| (a, -1.0)));
                m.add_row(MasterRow::Coverage { request: r.id, position: p, vehicle: k }, terms, RowSense::Le, 0.0)?;
            }

            for h in 0..n {
                let mut terms: Vec<(VarId, f64)> = pool
                    .iter()
                    .enumerate()
                    .filter(|(_, pat)| pat.start(dir) == h)
                    .map(|(j, _)| (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), 1.0))
                    .collect();
                terms.push((var(&m, MasterVar::Start { station: h, position: p, vehicle: k }), -1.0));
                m.add_row(MasterRow::StartLink { station: h, position: p, vehicle: k }, terms, RowSense::Le, 0.0)?;

                let mut terms: Vec<(VarId, f64)> = pool
                    .iter()
                    .enumerate()
                    .filter(|(_, pat)| pat.end(dir) == h)
                    .map(|(j, _)| (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), 1.0))
                    .collect();
                terms.push((var(&m, MasterVar::End { station: h, position: p, vehicle: k }), -1.0));
                m.add_row(MasterRow::EndLink { station: h, position: p, vehicle: k }, terms, RowSense::Le, 0.0)?;
            }

            if config.single_stop_symmetry && p >= 3 {
                for (j, _) in pool.iter().enumerate().filter(|(_, pat)| pat.is_single_stop()) {
                    let terms = vec![
                        (var(&m, MasterVar::Pattern { pattern: j, position: p - 2, vehicle: k }), 1.0),
                        (var(&m, MasterVar::Pattern { pattern: j, position: p - 1, vehicle: k }), 1.0),
                        (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), -1.0),
                    ];
                    m.add_row(MasterRow::Parking { pattern: j, position: p, vehicle: k }, terms, RowSense::Le, 1.0)?;
                }
            }
        }

        let mut terms: Vec<(VarId, f64)> = (1..=q)
            .flat_map(|p| (0..pool.len()).map(move |j| (j, p)))
            .filter(|&(j, _)| lengths[j] > 0.0)
            .map(|(j, p)| (var(&m, MasterVar::Pattern { pattern: j, position: p, vehicle: k }), lengths[j]))
            .collect();
        terms.push((var(&m, MasterVar::TourLength { vehicle: k }), -1.0));
        m.add_row(MasterRow::LengthLink { vehicle: k }, terms, RowSense::Le, 0.0)?;

        if config.tour_length_ordering && k + 1 < c {
            let terms = vec![
                (var(&m, MasterVar::TourLength { vehicle: k + 1 }), 1.0),
                (var(&m, MasterVar::TourLength { vehicle: k }), -1.0),
            ];
            m.add_row(MasterRow::LengthOrder { vehicle: k }, terms, RowSense::Le, 0.0)?;
        }
    }

    for (key, value) in &config.fixings {
        let v = m
            .var(key)
            .ok_or_else(|| Error::Config(format!("fixing references unknown variable {key}")))?;
        let value = f64::from(*value);
        m.set_bounds(v, value, value)?;
    }

    Ok(MasterModel {
        model: m,
        q,
        vehicles: c,
        pool_size: pool.len(),
    })
}

fn integral<K: Key>(key: &K, value: f64) -> Result<bool> {
    if value.abs() <= TOLERANCE {
        Ok(false)
    } else if (value - 1.0).abs() <= TOLERANCE {
        Ok(true)
    } else {
        Err(Error::NotIntegral { key: key.to_string(), value })
    }
}

/// Reads tours and assignments off an integral primal vector.
pub fn decode_solution(
    instance: &Instance,
    pool: &[StoppingPattern],
    master: &MasterModel,
    primal: &[f64],
) -> Result<Solution> {
    let mut tours = Vec::with_capacity(master.vehicles);
    for k in 0..master.vehicles {
        let mut legs = Vec::with_capacity(master.q);
        for p in 1..=master.q {
            let art = MasterVar::Artificial { position: p, vehicle: k };
            if integral(&art, master.value(primal, &art))? {
                return Err(Error::Contract(format!("artificial column active at position {p} of vehicle {k}")));
            }
            let mut chosen = None;
            for j in 0..master.pool_size {
                let key = MasterVar::Pattern { pattern: j, position: p, vehicle: k };
                if integral(&key, master.value(primal, &key))? {
                    chosen = Some(j);
                }
            }
            let j = chosen.ok_or_else(|| Error::Contract(format!("no pattern at position {p} of vehicle {k}")))?;
            legs.push(TourLeg { position: p, pattern: pool[j].clone() });
        }
        while legs.last().is_some_and(|l| l.pattern.is_single_stop()) {
            legs.pop();
        }
        tours.push(legs);
    }

    let mut assignments = Vec::new();
    let mut rejected = Vec::new();
    for r in instance.requests() {
        let mut slot = None;
        for k in 0..master.vehicles {
            for p in 1..=master.q {
                let key = MasterVar::Assign { request: r.id, position: p, vehicle: k };
                if integral(&key, master.value(primal, &key))? {
                    slot = Some((p, k));
                }
            }
        }
        match slot {
            Some((p, k)) => {
                let boarding_index = crate::model::boarding_index(&tours[k], p, r.origin).ok_or_else(|| {
                    Error::Contract(format!("request {} assigned to position {p} of vehicle {k} which skips its origin", r.id))
                })?;
                assignments.push(Assignment { request: r.id, vehicle: k, position: p, boarding_index });
            }
            None => rejected.push(r.id),
        }
    }

    let mut solution = Solution { tours, assignments, rejected, objective: 0.0 };
    solution.objective = solution.compute_objective(instance);
    Ok(solution)
}

/// Outcome of an integer solve over a fixed pattern set.
#[derive(Debug, Clone)]
pub struct IntegerOutcome {
    /// Best integer solution, or the all-idle solution when the solver found
    /// none and idling is feasible.
    pub solution: Option<Solution>,
    pub bound: Option<f64>,
    pub status: SolveStatus,
    pub seconds: f64,
}

impl IntegerOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }

    pub fn gap(&self) -> Option<f64> {
        relative_gap(self.bound?, self.objective()?)
    }
}

/// `(bound - objective) / bound`, zero when both vanish.
pub fn relative_gap(bound: f64, objective: f64) -> Option<f64> {
    if bound.abs() <= TOLERANCE {
        Some(if objective.abs() <= TOLERANCE { 0.0 } else { f64::INFINITY })
    } else {
        Some(((bound - objective) / bound.abs()).max(0.0))
    }
}

/// Integer master over `pool` with `config` (relaxation flag ignored).
pub fn solve_integer(
    instance: &Instance,
    pool: &[StoppingPattern],
    config: &MasterConfig,
    solver: &Solver,
    time_limit: Option<f64>,
) -> Result<IntegerOutcome> {
    let config = MasterConfig { relaxed: false, ..config.clone() };
    let master = build_master(instance, pool, &config)?;
    let res = solver.solve_mip(&master.model, time_limit)?;
    let mut solution = match res.primal() {
        Some(primal) => Some(decode_solution(instance, pool, &master, primal)?),
        None => None,
    };
    if solution.is_none() && res.status != SolveStatus::Infeasible && !config.require_all_requests {
        solution = Some(Solution::empty(instance));
    }
    let status = match (res.status, &solution) {
        (SolveStatus::TimeLimit, Some(_)) => SolveStatus::TimeLimit,
        (s, _) => s,
    };
    Ok(IntegerOutcome {
        solution,
        bound: res.best_bound,
        status,
        seconds: res.seconds,
    })
}

/// Every non-empty pattern on `n` stations.
pub fn full_pool(n: usize) -> Result<Vec<StoppingPattern>> {
    Ok(enumerate_all_patterns(n)?.collect())
}

/// All single-stop patterns plus `k` distinct random multi-stop patterns.
pub fn random_pool(n: usize, k: usize, seed: u64) -> Result<Vec<StoppingPattern>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity { what: "stations", value: n, limit: ENUMERATION_LIMIT });
    }
    let mut pool: Vec<StoppingPattern> = (0..n).map(|h| StoppingPattern::single(n, h)).collect::<Result<_>>()?;
    let mut multi: Vec<StoppingPattern> = enumerate_all_patterns(n)?.filter(|p| !p.is_single_stop()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    multi.shuffle(&mut rng);
    multi.truncate(k);
    multi.sort();
    pool.extend(multi);
    Ok(pool)
}

/// Solves the master over the complete pattern set.
pub fn solve_explicit(
    instance: &Instance,
    config: &MasterConfig,
    solver: &Solver,
    time_limit: Option<f64>,
) -> Result<IntegerOutcome> {
    let n = instance.stations();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity { what: "stations", value: n, limit: ENUMERATION_LIMIT });
    }
    solve_integer(instance, &full_pool(n)?, config, solver, time_limit)
}
