//! Most profitable stopping patterns.
//!
//! A pattern driven in one direction is a path through the stations in
//! driving order, so every pricing question is a longest-path-with-rewards
//! problem on the acyclic tournament over the stations plus a source depot
//! (node `0`) and a sink depot (node `n + 1`). Descending positions are
//! handled by mirroring the station axis, after which every problem ascends.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::backend::{ModelHandle, RowSense, SolveStatus, Solver, VarKind};
use crate::error::{Error, Result};
use crate::master::DualValues;
use crate::model::{overlap_groups_of, Direction, Instance, Request, StoppingPattern, ENUMERATION_LIMIT};

/// Minimum reduced cost for a column to count as profitable.
pub const PROFIT_EPSILON: f64 = 1e-6;

/// Largest line handled by the pruned uncapacitated search.
pub const SEARCH_LIMIT: usize = 64;

/// Limits of the capacitated enumeration oracle.
pub const BRUTE_FORCE_STATIONS: usize = 12;
pub const BRUTE_FORCE_REQUESTS: usize = 12;

/// Reduced cost of `pattern` at position `p` of vehicle `k`, driven in `dir`.
pub fn reduced_cost(
    instance: &Instance,
    pattern: &StoppingPattern,
    p: usize,
    k: usize,
    dir: Direction,
    duals: &DualValues,
) -> Result<f64> {
    let mut rc = -duals.convexity(p, k)?;
    for r in instance.requests_in(dir) {
        if pattern.serves(r) {
            rc += duals.coverage(r.id, p, k)?;
        }
    }
    rc -= duals.start_link(pattern.start(dir), p, k)?;
    rc -= duals.end_link(pattern.end(dir), p, k)?;
    rc -= pattern.length(instance) * duals.length(k)?;
    Ok(rc)
}

/// Maps stations to positions along the driving direction and back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Axis {
    n: usize,
    mirrored: bool,
}

impl Axis {
    fn new(n: usize, dir: Direction) -> Self {
        Axis { n, mirrored: dir == Direction::Descending }
    }

    /// Works in both directions since mirroring is an involution.
    fn map(&self, h: usize) -> usize {
        if self.mirrored {
            self.n - 1 - h
        } else {
            h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reward {
    pub request: usize,
    /// Node of the boarding station on the graph.
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

/// Arc-weighted tournament on `0, 1, …, n + 1` for one pricing problem.
///
/// Node `i` in `1..=n` is the `i`-th station in driving order. A path
/// `0 → … → n + 1` pays the weights of its arcs and collects the reward of
/// every request whose two endpoints it visits.
#[derive(Debug, Clone)]
pub struct TournamentDigraph {
    n: usize,
    direction: Direction,
    position: usize,
    vehicle: usize,
    weights: Vec<f64>,
    rewards: Vec<Reward>,
    /// Patterns that must not be returned.
    excluded: Vec<StoppingPattern>,
}

impl TournamentDigraph {
    pub fn stations(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn vehicle(&self) -> usize {
        self.vehicle
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn weight(&self, g: usize, h: usize) -> f64 {
        self.weights[g * (self.n + 2) + h]
    }

    /// Weight of the forbidden direct depot arc.
    pub fn big_m(&self) -> f64 {
        self.weight(0, self.n + 1)
    }

    pub fn rewards(&self) -> &[Reward] {
        &self.rewards
    }

    pub fn excluded(&self) -> &[StoppingPattern] {
        &self.excluded
    }

    pub fn exclude(&mut self, pattern: StoppingPattern) {
        self.excluded.push(pattern);
    }

    /// Graph node of station `h`.
    pub fn node_of(&self, h: usize) -> usize {
        Axis::new(self.n, self.direction).map(h) + 1
    }

    /// Station of graph node `i` in `1..=n`.
    pub fn station_of(&self, i: usize) -> usize {
        Axis::new(self.n, self.direction).map(i - 1)
    }

    /// Upper bound on the path profit of every multi-stop pattern, taken
    /// over all first and last stops. Counts every positive reward inside
    /// the span and the cheapest increasing path between the two ends.
    pub fn profit_upper_bound(&self) -> f64 {
        let n = self.n;
        let mut cheapest = vec![vec![f64::INFINITY; n + 2]; n + 2];
        for b in (1..=n).rev() {
            for a in (1..b).rev() {
                let mut best = self.weight(a, b);
                for c in a + 1..b {
                    best = best.min(self.weight(a, c) + cheapest[c][b]);
                }
                cheapest[a][b] = best;
            }
        }
        let mut bound = f64::NEG_INFINITY;
        for a in 1..=n {
            for b in a + 1..=n {
                let gain: f64 = self
                    .rewards
                    .iter()
                    .filter(|r| r.value > 0.0 && r.from.min(r.to) >= a && r.from.max(r.to) <= b)
                    .map(|r| r.value)
                    .sum();
                bound = bound.max(gain - self.weight(0, a) - self.weight(b, n + 1) - cheapest[a][b]);
            }
        }
        bound
    }

    /// Path profit of a pattern: rewards collected minus arc weights.
    pub fn evaluate(&self, pattern: &StoppingPattern) -> f64 {
        let mut nodes: Vec<usize> = pattern.stops().map(|h| self.node_of(h)).collect();
        nodes.sort_unstable();
        let mut profit: f64 = self
            .rewards
            .iter()
            .filter(|r| nodes.binary_search(&r.from).is_ok() && nodes.binary_search(&r.to).is_ok())
            .map(|r| r.value)
            .sum();
        let mut prev = 0;
        for &i in nodes.iter().chain([self.n + 1].iter()) {
            profit -= self.weight(prev, i);
            prev = i;
        }
        profit
    }
}

/// Pricing graph of position `p` of vehicle `k` under `duals`.
pub fn build_pricing_graph(
    instance: &Instance,
    p: usize,
    k: usize,
    dir: Direction,
    duals: &DualValues,
) -> Result<TournamentDigraph> {
    let n = instance.stations();
    let axis = Axis::new(n, dir);
    let nu = duals.length(k)?;
    let size = n + 2;
    let mut weights = vec![0.0; size * size];
    let mut total_distance = 0.0;
    for a in 0..n {
        let h = axis.map(a);
        weights[a + 1] = duals.start_link(h, p, k)?;
        weights[(a + 1) * size + n + 1] = duals.end_link(h, p, k)?;
        for b in a + 1..n {
            let t = instance.distance(h, axis.map(b));
            total_distance += t;
            weights[(a + 1) * size + b + 1] = t * nu;
        }
    }
    let mut rewards = Vec::new();
    for r in instance.requests_in(dir) {
        rewards.push(Reward {
            request: r.id,
            from: axis.map(r.origin) + 1,
            to: axis.map(r.destination) + 1,
            value: duals.coverage(r.id, p, k)?,
        });
    }
    let reward_sum: f64 = rewards.iter().map(|r| r.value.max(0.0)).sum();
    weights[n + 1] = reward_sum + nu.abs() * total_distance + 1.0;
    Ok(TournamentDigraph {
        n,
        direction: dir,
        position: p,
        vehicle: k,
        weights,
        rewards,
        excluded: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricedPattern {
    pub pattern: StoppingPattern,
    pub profit: f64,
    pub reduced_cost: f64,
    pub position: usize,
    pub vehicle: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PathVar {
    Arc(usize, usize),
    Take(usize),
}

impl fmt::Display for PathVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathVar::Arc(g, h) => write!(f, "arc({g},{h})"),
            PathVar::Take(i) => write!(f, "take({i})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PathRow {
    LeaveSource,
    EnterSink,
    Flow(usize),
    Board(usize),
    Alight(usize),
    Interior,
    Capacity(usize),
    Exclude(usize),
}

impl fmt::Display for PathRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathRow::LeaveSource => write!(f, "source"),
            PathRow::EnterSink => write!(f, "sink"),
            PathRow::Flow(i) => write!(f, "flow({i})"),
            PathRow::Board(i) => write!(f, "board({i})"),
            PathRow::Alight(i) => write!(f, "alight({i})"),
            PathRow::Interior => write!(f, "interior"),
            PathRow::Capacity(s) => write!(f, "cap({s})"),
            PathRow::Exclude(t) => write!(f, "exclude({t})"),
        }
    }
}

/// Path MILP on the tournament: nodes `0..=n+1`, `weight(g, h)` per arc,
/// rewards between station nodes.
struct PathProblem<'a> {
    n: usize,
    weight: &'a dyn Fn(usize, usize) -> f64,
    rewards: &'a [Reward],
    integral_rewards: bool,
    /// Capacity and member reward indices per segment group.
    capacity: Option<(usize, Vec<(usize, Vec<usize>)>)>,
    /// Node sets that must not be visited exactly.
    excluded: Vec<Vec<usize>>,
    /// Paths with profit at most this value may be cut off.
    floor: Option<f64>,
}

struct PathOutcome {
    /// Visited station nodes in increasing order.
    nodes: Vec<usize>,
    taken: Vec<usize>,
}

fn solve_path(problem: &PathProblem<'_>, solver: &Solver, time_limit: Option<f64>) -> Result<Option<PathOutcome>> {
    let n = problem.n;
    let sink = n + 1;
    let mut m: ModelHandle<PathVar, PathRow> = ModelHandle::new();
    for g in 0..sink {
        for h in g + 1..=sink {
            m.add_var(PathVar::Arc(g, h), VarKind::Binary, 0.0, 1.0, -(problem.weight)(g, h))?;
        }
    }
    let kind = if problem.integral_rewards { VarKind::Binary } else { VarKind::Continuous };
    for (i, r) in problem.rewards.iter().enumerate() {
        m.add_var(PathVar::Take(i), kind, 0.0, 1.0, r.value)?;
    }
    let arc = |m: &ModelHandle<PathVar, PathRow>, g: usize, h: usize| m.var(&PathVar::Arc(g, h)).expect("declared");
    let inflow = |m: &ModelHandle<PathVar, PathRow>, h: usize, coef: f64| -> Vec<_> {
        (0..h).map(|g| (arc(m, g, h), coef)).collect()
    };

    let leave = (1..=sink).map(|h| (arc(&m, 0, h), 1.0)).collect();
    m.add_row(PathRow::LeaveSource, leave, RowSense::Eq, 1.0)?;
    let enter = inflow(&m, sink, 1.0);
    m.add_row(PathRow::EnterSink, enter, RowSense::Eq, 1.0)?;
    for h in 1..=n {
        let mut terms = inflow(&m, h, 1.0);
        terms.extend((h + 1..=sink).map(|g| (arc(&m, h, g), -1.0)));
        m.add_row(PathRow::Flow(h), terms, RowSense::Eq, 0.0)?;
    }
    for (i, r) in problem.rewards.iter().enumerate() {
        let take = m.var(&PathVar::Take(i)).expect("declared");
        let mut terms = vec![(take, 1.0)];
        terms.extend(inflow(&m, r.from, -1.0));
        m.add_row(PathRow::Board(i), terms, RowSense::Le, 0.0)?;
        let mut terms = vec![(take, 1.0)];
        terms.extend(inflow(&m, r.to, -1.0));
        m.add_row(PathRow::Alight(i), terms, RowSense::Le, 0.0)?;
    }
    let interior = (1..=n)
        .flat_map(|g| (g + 1..=n).map(move |h| (g, h)))
        .map(|(g, h)| (arc(&m, g, h), 1.0))
        .collect();
    m.add_row(PathRow::Interior, interior, RowSense::Ge, 1.0)?;
    if let Some((q, groups)) = &problem.capacity {
        for (segment, members) in groups {
            let terms = members.iter().map(|&i| (m.var(&PathVar::Take(i)).expect("declared"), 1.0)).collect();
            m.add_row(PathRow::Capacity(*segment), terms, RowSense::Le, *q as f64)?;
        }
    }
    for (t, nodes) in problem.excluded.iter().enumerate() {
        let mut terms = Vec::new();
        for h in 1..=n {
            let coef = if nodes.contains(&h) { 1.0 } else { -1.0 };
            terms.extend(inflow(&m, h, coef));
        }
        m.add_row(PathRow::Exclude(t), terms, RowSense::Le, nodes.len() as f64 - 1.0)?;
    }

    let res = match problem.floor {
        Some(floor) => solver.solve_mip_above(&m, time_limit, floor)?,
        None => solver.solve_mip(&m, time_limit)?,
    };
    let Some(primal) = res.primal() else {
        return match res.status {
            SolveStatus::Infeasible | SolveStatus::TimeLimit => Ok(None),
            other => Err(Error::Backend(format!("path model ended with status {other}"))),
        };
    };
    let nodes = (1..=n)
        .filter(|&h| (0..h).map(|g| primal[arc(&m, g, h).index()]).sum::<f64>() > 0.5)
        .collect();
    let taken = (0..problem.rewards.len())
        .filter(|&i| primal[m.var(&PathVar::Take(i)).expect("declared").index()] > 0.5)
        .collect();
    Ok(Some(PathOutcome { nodes, taken }))
}

/// Most profitable multi-stop path on `graph`; a pattern is returned only if
/// its profit beats `zeta` by more than [`PROFIT_EPSILON`].
pub fn solve_pricing(
    graph: &TournamentDigraph,
    zeta: f64,
    solver: &Solver,
    time_limit: Option<f64>,
) -> Result<Option<PricedPattern>> {
    let n = graph.n;
    if n < 2 || graph.profit_upper_bound() <= zeta + PROFIT_EPSILON {
        return Ok(None);
    }
    let weight = |g: usize, h: usize| graph.weight(g, h);
    let excluded = graph
        .excluded
        .iter()
        .map(|p| p.stops().map(|h| graph.node_of(h)).collect())
        .collect();
    let problem = PathProblem {
        n,
        weight: &weight,
        rewards: &graph.rewards,
        integral_rewards: false,
        capacity: None,
        excluded,
        floor: Some(zeta),
    };
    let Some(out) = solve_path(&problem, solver, time_limit)? else {
        return Ok(None);
    };
    let stops: Vec<usize> = out.nodes.iter().map(|&i| graph.station_of(i)).collect();
    let pattern = StoppingPattern::from_stops(n, &stops)?;
    let profit = graph.evaluate(&pattern);
    if profit > zeta + PROFIT_EPSILON {
        Ok(Some(PricedPattern {
            pattern,
            profit,
            reduced_cost: profit - zeta,
            position: graph.position,
            vehicle: graph.vehicle,
            direction: graph.direction,
        }))
    } else {
        Ok(None)
    }
}

/// A most profitable stopping pattern with the requests it carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpspSolution {
    pub pattern: StoppingPattern,
    pub accepted: Vec<usize>,
    pub profit: f64,
}

fn check_rewards(instance: &Instance, rewards: &[f64]) -> Result<()> {
    if rewards.len() != instance.requests().len() {
        return Err(Error::Config(format!(
            "{} rewards given for {} requests",
            rewards.len(),
            instance.requests().len()
        )));
    }
    if let Some(r) = rewards.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::Config(format!("rewards must be finite and nonnegative, got {r}")));
    }
    if instance.stations() < 2 {
        return Err(Error::Config("a multi-stop pattern needs at least two stations".into()));
    }
    Ok(())
}

/// Profit of driving `pattern`: rewards of `accepted` minus its length.
pub fn pattern_profit(instance: &Instance, rewards: &[f64], pattern: &StoppingPattern, accepted: &[usize]) -> f64 {
    accepted.iter().map(|&r| rewards[r]).sum::<f64>() - pattern.length(instance)
}

fn solve_mp(
    instance: &Instance,
    rewards: &[f64],
    dir: Direction,
    capacity: Option<usize>,
    solver: &Solver,
) -> Result<MpspSolution> {
    check_rewards(instance, rewards)?;
    let n = instance.stations();
    let axis = Axis::new(n, dir);
    let requests: Vec<&Request> = instance.requests_in(dir).collect();
    let arcs: Vec<Reward> = requests
        .iter()
        .map(|r| Reward {
            request: r.id,
            from: axis.map(r.origin) + 1,
            to: axis.map(r.destination) + 1,
            value: rewards[r.id],
        })
        .collect();
    let capacity = capacity.map(|q| {
        let local: Vec<Request> = arcs
            .iter()
            .enumerate()
            .map(|(i, a)| Request::new(i, a.from - 1, a.to - 1))
            .collect();
        let refs: Vec<&Request> = local.iter().collect();
        let groups = overlap_groups_of(n, Direction::Ascending, &refs)
            .into_iter()
            .map(|g| (g.segment, g.members))
            .collect();
        (q, groups)
    });
    let weight = |g: usize, h: usize| {
        if g == 0 || h == n + 1 {
            0.0
        } else {
            instance.distance(axis.map(g - 1), axis.map(h - 1))
        }
    };
    let problem = PathProblem {
        n,
        weight: &weight,
        rewards: &arcs,
        integral_rewards: capacity.is_some(),
        capacity,
        excluded: Vec::new(),
        floor: None,
    };
    let out = solve_path(&problem, solver, None)?
        .ok_or_else(|| Error::Backend("path model without a solution".into()))?;
    let stops: Vec<usize> = out.nodes.iter().map(|&i| axis.map(i - 1)).collect();
    let pattern = StoppingPattern::from_stops(n, &stops)?;
    let mut accepted: Vec<usize> = if problem.integral_rewards {
        out.taken.iter().map(|&i| arcs[i].request).collect()
    } else {
        requests.iter().filter(|r| pattern.serves(r)).map(|r| r.id).collect()
    };
    accepted.sort_unstable();
    let profit = pattern_profit(instance, rewards, &pattern, &accepted);
    Ok(MpspSolution { pattern, accepted, profit })
}

/// Capacitated problem: each `dir` request may be carried for its reward, at
/// most `capacity` on board at once.
pub fn solve_mpsp(
    instance: &Instance,
    rewards: &[f64],
    dir: Direction,
    capacity: usize,
    solver: &Solver,
) -> Result<MpspSolution> {
    solve_mp(instance, rewards, dir, Some(capacity), solver)
}

/// Uncapacitated problem: every carried request is accepted.
pub fn solve_mpusp(instance: &Instance, rewards: &[f64], dir: Direction, solver: &Solver) -> Result<MpspSolution> {
    solve_mp(instance, rewards, dir, None, solver)
}

/// Exhaustive oracle for [`solve_mpsp`] (`Some(capacity)`) and
/// [`solve_mpusp`] (`None`).
///
/// The capacitated case enumerates every multi-stop pattern and every subset
/// of the requests it serves. The uncapacitated case enumerates patterns up
/// to the pattern enumeration limit and switches to a depth-first search with
/// an optimistic bound on larger lines.
pub fn brute_force_mpsp(
    instance: &Instance,
    rewards: &[f64],
    dir: Direction,
    capacity: Option<usize>,
) -> Result<MpspSolution> {
    check_rewards(instance, rewards)?;
    let n = instance.stations();
    match capacity {
        Some(q) => {
            if n > BRUTE_FORCE_STATIONS {
                return Err(Error::Capacity { what: "stations", value: n, limit: BRUTE_FORCE_STATIONS });
            }
            let m = instance.requests().len();
            if m > BRUTE_FORCE_REQUESTS {
                return Err(Error::Capacity { what: "requests", value: m, limit: BRUTE_FORCE_REQUESTS });
            }
            Ok(enumerate_capacitated(instance, rewards, dir, q))
        }
        None if n <= ENUMERATION_LIMIT => Ok(enumerate_uncapacitated(instance, rewards, dir)),
        None if n <= SEARCH_LIMIT => Ok(search_uncapacitated(instance, rewards, dir)),
        None => Err(Error::Capacity { what: "stations", value: n, limit: SEARCH_LIMIT }),
    }
}

fn enumerate_capacitated(instance: &Instance, rewards: &[f64], dir: Direction, q: usize) -> MpspSolution {
    let n = instance.stations();
    let requests: Vec<&Request> = instance.requests_in(dir).collect();
    let mut best: Option<MpspSolution> = None;
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let pattern = StoppingPattern::from_mask(n, mask).expect("mask within range");
        let served: Vec<&Request> = requests.iter().copied().filter(|r| pattern.serves(r)).collect();
        let length = pattern.length(instance);
        let mut best_subset: (f64, Vec<usize>) = (0.0, Vec::new());
        for subset in 0u32..(1u32 << served.len()) {
            let chosen: Vec<&Request> = (0..served.len()).filter(|i| subset >> i & 1 == 1).map(|i| served[i]).collect();
            let fits = (0..n.saturating_sub(1)).all(|s| chosen.iter().filter(|r| r.covers_segment(s)).count() <= q);
            if !fits {
                continue;
            }
            let value: f64 = chosen.iter().map(|r| rewards[r.id]).sum();
            if value > best_subset.0 {
                best_subset = (value, chosen.iter().map(|r| r.id).collect());
            }
        }
        let profit = best_subset.0 - length;
        if best.as_ref().is_none_or(|b| profit > b.profit) {
            let mut accepted = best_subset.1;
            accepted.sort_unstable();
            best = Some(MpspSolution { pattern, accepted, profit });
        }
    }
    best.expect("at least one multi-stop pattern exists")
}

fn served_profit(instance: &Instance, rewards: &[f64], requests: &[&Request], pattern: &StoppingPattern) -> (f64, Vec<usize>) {
    let accepted: Vec<usize> = requests.iter().filter(|r| pattern.serves(r)).map(|r| r.id).collect();
    (pattern_profit(instance, rewards, pattern, &accepted), accepted)
}

fn enumerate_uncapacitated(instance: &Instance, rewards: &[f64], dir: Direction) -> MpspSolution {
    let n = instance.stations();
    let requests: Vec<&Request> = instance.requests_in(dir).collect();
    let mut best: Option<MpspSolution> = None;
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let pattern = StoppingPattern::from_mask(n, mask).expect("mask within range");
        let (profit, accepted) = served_profit(instance, rewards, &requests, &pattern);
        if best.as_ref().is_none_or(|b| profit > b.profit) {
            best = Some(MpspSolution { pattern, accepted, profit });
        }
    }
    best.expect("at least one multi-stop pattern exists")
}

struct Search<'a> {
    n: usize,
    dist: Vec<f64>,
    /// Per axis station: (earlier endpoint, reward) of requests ending there.
    ending: Vec<Vec<(usize, f64)>>,
    chosen: Vec<bool>,
    best_profit: f64,
    best: Vec<bool>,
    instance: &'a Instance,
}

impl Search<'_> {
    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    fn bound(&self, f: usize, last: Option<usize>) -> f64 {
        let mut total = 0.0;
        let mut slack: f64 = 0.0;
        for g in f..self.n {
            let gain: f64 = self.ending[g]
                .iter()
                .filter(|(a, _)| *a >= f || self.chosen[*a])
                .map(|(_, v)| v)
                .sum();
            let mut min_in = match last {
                Some(l) => self.d(l, g),
                None => 0.0,
            };
            for u in f..g {
                min_in = min_in.min(self.d(u, g));
            }
            let min_out = (g + 1..self.n).map(|u| self.d(g, u)).fold(f64::INFINITY, f64::min);
            let min_out = if min_out.is_finite() { min_out } else { 0.0 };
            slack = slack.max(min_out / 2.0);
            total += (gain - (min_in + min_out) / 2.0).max(0.0);
        }
        total + slack
    }

    fn run(&mut self, f: usize, last: Option<usize>, count: usize, profit: f64) {
        if f == self.n {
            if count >= 2 && profit > self.best_profit {
                self.best_profit = profit;
                self.best.clone_from(&self.chosen);
            }
            return;
        }
        if profit + self.bound(f, last) <= self.best_profit {
            return;
        }
        let gain: f64 = self.ending[f].iter().filter(|(a, _)| self.chosen[*a]).map(|(_, v)| v).sum();
        let step = last.map_or(0.0, |l| self.d(l, f));
        self.chosen[f] = true;
        self.run(f + 1, Some(f), count + 1, profit + gain - step);
        self.chosen[f] = false;
        self.run(f + 1, last, count, profit);
    }
}

fn search_uncapacitated(instance: &Instance, rewards: &[f64], dir: Direction) -> MpspSolution {
    let n = instance.stations();
    let axis = Axis::new(n, dir);
    let requests: Vec<&Request> = instance.requests_in(dir).collect();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            dist[a * n + b] = instance.distance(axis.map(a), axis.map(b));
        }
    }
    let mut ending = vec![Vec::new(); n];
    for r in &requests {
        ending[axis.map(r.destination)].push((axis.map(r.origin), rewards[r.id]));
    }

    let seed = local_search(instance, rewards, &requests);
    let mut search = Search {
        n,
        dist,
        ending,
        chosen: vec![false; n],
        best_profit: seed.profit,
        best: (0..n).map(|a| seed.pattern.contains(axis.map(a))).collect(),
        instance,
    };
    search.run(0, None, 0, 0.0);
    let stops: Vec<usize> = (0..n).filter(|&a| search.best[a]).map(|a| axis.map(a)).collect();
    let pattern = StoppingPattern::from_stops(n, &stops).expect("best pattern has stops");
    let (profit, accepted) = served_profit(search.instance, rewards, &requests, &pattern);
    MpspSolution { pattern, accepted, profit }
}

/// First-improvement station toggling from the full pattern.
fn local_search(instance: &Instance, rewards: &[f64], requests: &[&Request]) -> MpspSolution {
    let n = instance.stations();
    let mut pattern = StoppingPattern::full(n);
    let (mut profit, _) = served_profit(instance, rewards, requests, &pattern);
    loop {
        let mut improved = false;
        for h in 0..n {
            let stops: Vec<usize> = pattern.stops().filter(|&g| g != h).chain((!pattern.contains(h)).then_some(h)).collect();
            if stops.len() < 2 {
                continue;
            }
            let candidate = StoppingPattern::from_stops(n, &stops).expect("stations in range");
            let (p, _) = served_profit(instance, rewards, requests, &candidate);
            if p > profit + 1e-9 {
                pattern = candidate;
                profit = p;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let (profit, accepted) = served_profit(instance, rewards, requests, &pattern);
    MpspSolution { pattern, accepted, profit }
}
