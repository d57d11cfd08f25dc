//! Column generation, branch-and-price and the root-node heuristic.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::backend::{BackendConfig, SolveStatus, Solver};
use crate::error::{Error, Result};
use crate::explicit::{decode_solution, relative_gap, MasterConfig, MasterVar};
use crate::master::{solve_rmp_integer, solve_rrmp, ColumnPool, InitialPool, RrmpSolution};
use crate::model::{Direction, Instance, Solution, StoppingPattern, TOLERANCE};
use crate::pricing::{build_pricing_graph, solve_pricing, PricedPattern};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnpConfig {
    /// Positions, symmetry toggles and the all-requests switch. Fixings here
    /// are ignored; the tree manages its own.
    pub master: MasterConfig,
    pub backend: BackendConfig,
    /// Upper limit in seconds for one incumbent solve.
    pub incumbent_slice: f64,
    #[serde(default)]
    pub initial_pool: InitialPool,
    /// Stop after this many processed nodes; a reproducible alternative to
    /// a time limit.
    #[serde(default)]
    pub node_limit: Option<usize>,
}

impl BnpConfig {
    pub fn for_instance(instance: &Instance) -> Self {
        BnpConfig {
            master: MasterConfig::for_instance(instance),
            backend: BackendConfig::default(),
            incumbent_slice: 60.0,
            initial_pool: InitialPool::Standard,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnpNode {
    pub fixings: Vec<(MasterVar, u8)>,
    pub parent_bound: f64,
    pub depth: usize,
    pub seq: usize,
}

impl BnpNode {
    pub fn root() -> Self {
        BnpNode {
            fixings: Vec::new(),
            parent_bound: f64::INFINITY,
            depth: 0,
            seq: 0,
        }
    }
}

struct Queued(BnpNode);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    /// Larger parent bound first, then earlier creation.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .parent_bound
            .total_cmp(&other.0.parent_bound)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

/// Result of column generation at one node.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    /// Final relaxation, `None` if the node is infeasible.
    pub lp: Option<RrmpSolution>,
    pub iterations: usize,
    pub new_columns: usize,
    /// Pricing proved that no profitable column is missing.
    pub proven: bool,
    pub pricing_seconds: f64,
}

impl CgOutcome {
    pub fn bound(&self) -> Option<f64> {
        self.lp.as_ref().map(|lp| lp.objective)
    }
}

fn remaining(deadline: Option<Instant>) -> Option<f64> {
    deadline.map(|d| d.saturating_duration_since(Instant::now()).as_secs_f64())
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Bit-exact fingerprint of the prices one pricing problem depends on.
fn price_signature(instance: &Instance, lp: &RrmpSolution, p: usize, k: usize, excluded: &[StoppingPattern]) -> Result<Vec<u64>> {
    let d = &lp.duals;
    let dir = Direction::of_position(p);
    let mut sig = vec![dir as u64, d.convexity(p, k)?.to_bits(), d.length(k)?.to_bits()];
    for r in instance.requests_in(dir) {
        sig.push(d.coverage(r.id, p, k)?.to_bits());
    }
    for h in 0..instance.stations() {
        sig.push(d.start_link(h, p, k)?.to_bits());
        sig.push(d.end_link(h, p, k)?.to_bits());
    }
    let mut ex: Vec<String> = excluded.iter().map(ToString::to_string).collect();
    ex.sort();
    for e in ex {
        sig.push(u64::MAX);
        sig.extend(e.bytes().map(u64::from));
    }
    Ok(sig)
}

/// Runs column generation for the node with `fixings` until pricing finds no
/// profitable column or the deadline passes. New columns go into `pool`.
pub fn column_generation(
    instance: &Instance,
    fixings: &[(MasterVar, u8)],
    pool: &mut ColumnPool,
    config: &MasterConfig,
    solver: &Solver,
    deadline: Option<Instant>,
) -> Result<CgOutcome> {
    let config = MasterConfig {
        fixings: fixings.to_vec(),
        artificial_columns: !fixings.is_empty(),
        relaxed: true,
        ..config.clone()
    };
    let c = instance.vehicles();
    let mut excluded: HashMap<(usize, usize), Vec<StoppingPattern>> = HashMap::new();
    for (key, value) in fixings {
        if let (MasterVar::Pattern { pattern, position, vehicle }, 0) = (key, value) {
            let pat = pool
                .get(*pattern)
                .ok_or_else(|| Error::Contract(format!("fixing on unknown column {pattern}")))?;
            excluded.entry((*position, *vehicle)).or_default().push(pat.clone());
        }
    }

    let mut outcome = CgOutcome {
        lp: None,
        iterations: 0,
        new_columns: 0,
        proven: false,
        pricing_seconds: 0.0,
    };
    let started = Instant::now();
    loop {
        outcome.iterations += 1;
        let Some(lp) = solve_rrmp(instance, pool, &config, solver)? else {
            outcome.lp = None;
            outcome.proven = true;
            return Ok(outcome);
        };
        if expired(deadline) {
            outcome.lp = Some(lp);
            return Ok(outcome);
        }
        if pool_is_complete(pool) {
            outcome.lp = Some(lp);
            outcome.proven = true;
            return Ok(outcome);
        }

        let pricing_started = Instant::now();
        let mut cache: HashMap<Vec<u64>, Option<PricedPattern>> = HashMap::new();
        let mut found: Vec<PricedPattern> = Vec::new();
        let no_exclusions = Vec::new();
        for p in 1..=config.q {
            let dir = Direction::of_position(p);
            for k in 0..c {
                let ex = excluded.get(&(p, k)).unwrap_or(&no_exclusions);
                let sig = price_signature(instance, &lp, p, k, ex)?;
                let priced = match cache.get(&sig) {
                    Some(hit) => hit.clone(),
                    None => {
                        let mut graph = build_pricing_graph(instance, p, k, dir, &lp.duals)?;
                        for pat in ex {
                            graph.exclude(pat.clone());
                        }
                        let zeta = lp.duals.convexity(p, k)?;
                        let res = solve_pricing(&graph, zeta, solver, remaining(deadline))?;
                        cache.insert(sig, res.clone());
                        res
                    }
                };
                found.extend(priced);
            }
        }
        outcome.pricing_seconds += pricing_started.elapsed().as_secs_f64();

        let added = pool.add_columns(found.into_iter().map(|f| f.pattern));
        outcome.new_columns += added.len();
        log::debug!(
            "cg iter {:>3}  pool {:>5}  rrmp {:>14.6}  added {:>3}  {:>8.3}s",
            outcome.iterations,
            pool.len(),
            lp.objective,
            added.len(),
            started.elapsed().as_secs_f64()
        );
        if expired(deadline) {
            outcome.lp = Some(lp);
            return Ok(outcome);
        }
        if added.is_empty() {
            outcome.lp = Some(lp);
            outcome.proven = true;
            return Ok(outcome);
        }
    }
}

/// True when the pool holds every nonempty pattern, so pricing has nothing left to add.
fn pool_is_complete(pool: &ColumnPool) -> bool {
    let n = pool.stations();
    n < usize::BITS as usize && pool.len() == (1usize << n) - 1
}

fn fractional_score(value: f64) -> Option<f64> {
    let frac = value - value.floor();
    (frac > TOLERANCE && frac < 1.0 - TOLERANCE).then(|| (frac - 0.5).abs())
}

/// Most fractional assignment variable, else most fractional pattern
/// variable; ties go to the smallest key.
pub fn branching_variable(lp: &RrmpSolution) -> Option<MasterVar> {
    let mut best_assign: Option<(f64, MasterVar)> = None;
    let mut best_pattern: Option<(f64, MasterVar)> = None;
    for (v, key) in lp.master.model.vars() {
        let slot = match key {
            MasterVar::Assign { .. } => &mut best_assign,
            MasterVar::Pattern { .. } => &mut best_pattern,
            _ => continue,
        };
        if let Some(score) = fractional_score(lp.primal[v.index()]) {
            let better = match slot {
                None => true,
                Some((s, k)) => score < *s - 1e-12 || ((score - *s).abs() <= 1e-12 && key < k),
            };
            if better {
                *slot = Some((score, *key));
            }
        }
    }
    best_assign.or(best_pattern).map(|(_, k)| k)
}

/// Children fixing the branching variable to `0` (left) and `1` (right).
pub fn branch(node: &BnpNode, lp: &RrmpSolution, bound: f64, next_seq: &mut usize) -> Result<(BnpNode, BnpNode)> {
    let key = branching_variable(lp)
        .ok_or_else(|| Error::Contract("branching requested on an integral solution".into()))?;
    let mut child = |value: u8| {
        let mut fixings = node.fixings.clone();
        fixings.push((key, value));
        *next_seq += 1;
        BnpNode {
            fixings,
            parent_bound: bound,
            depth: node.depth + 1,
            seq: *next_seq,
        }
    };
    let left = child(0);
    let right = child(1);
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeOutcome {
    PrunedBound,
    PrunedInfeasible,
    PrunedOptimal,
    Branched,
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub seq: usize,
    pub depth: usize,
    pub parent_bound: f64,
    pub node_bound: Option<f64>,
    /// Best objective known after the node.
    pub incumbent: f64,
    /// Largest bound among open nodes after the node.
    pub global_bound: f64,
    pub pool_size: usize,
    pub outcome: NodeOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Nodes taken from the queue; equals the pruned, branched and
    /// interrupted counts together.
    pub processed: usize,
    pub pruned_bound: usize,
    pub pruned_infeasible: usize,
    pub pruned_optimal: usize,
    pub branched: usize,
    pub interrupted: usize,
    /// Nodes still queued when the search stopped.
    pub open: usize,
    pub cg_iterations: usize,
    pub columns_generated: usize,
    pub pricing_seconds: f64,
    pub incumbent_seconds: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct BnpResult {
    pub solution: Option<Solution>,
    pub bound: f64,
    pub status: SolveStatus,
    pub root_bound: Option<f64>,
    pub stats: SearchStats,
    pub log: Vec<NodeRecord>,
    pub pool: ColumnPool,
    pub seconds: f64,
}

impl BnpResult {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

struct Incumbent {
    solution: Option<Solution>,
    value: f64,
}

impl Incumbent {
    fn offer(&mut self, candidate: Solution) -> bool {
        if candidate.objective > self.value + TOLERANCE || self.solution.is_none() {
            self.value = candidate.objective;
            self.solution = Some(candidate);
            true
        } else {
            false
        }
    }
}

fn is_integral(lp: &RrmpSolution) -> bool {
    !lp.uses_artificial()
        && lp.master.model.vars().all(|(v, key)| match key {
            MasterVar::Assign { .. } | MasterVar::Pattern { .. } => fractional_score(lp.primal[v.index()]).is_none(),
            _ => true,
        })
}

fn incumbent_budget(config: &BnpConfig, deadline: Option<Instant>) -> Option<f64> {
    match remaining(deadline) {
        Some(left) => Some(config.incumbent_slice.min(left / 4.0)),
        None => Some(config.incumbent_slice),
    }
}

/// Best-first branch-and-price starting from the configured pool.
pub fn branch_and_price(instance: &Instance, config: &BnpConfig, time_limit: Option<f64>) -> Result<BnpResult> {
    let started = Instant::now();
    let deadline = time_limit.map(|t| started + Duration::from_secs_f64(t.max(0.0)));
    let solver = Solver::from_config(&config.backend)?;
    let master = MasterConfig { fixings: Vec::new(), artificial_columns: false, relaxed: false, ..config.master.clone() };
    master.validate()?;
    let mut pool = config.initial_pool.build(instance.stations())?;

    let mut best = Incumbent { solution: None, value: f64::NEG_INFINITY };
    if !master.require_all_requests {
        best.offer(Solution::empty(instance));
    }
    let mut stats = SearchStats::default();
    let mut log = Vec::new();
    let mut root_bound = None;
    let mut queue = BinaryHeap::new();
    queue.push(Queued(BnpNode::root()));
    let mut next_seq = 0;
    let mut interrupted_bound: Option<f64> = None;
    let mut node_limited = false;

    while let Some(Queued(node)) = queue.pop() {
        stats.processed += 1;
        let mut record = NodeRecord {
            seq: node.seq,
            depth: node.depth,
            parent_bound: node.parent_bound,
            node_bound: None,
            incumbent: best.value,
            global_bound: f64::INFINITY,
            pool_size: pool.len(),
            outcome: NodeOutcome::PrunedBound,
        };

        if node.parent_bound <= best.value + TOLERANCE {
            stats.pruned_bound += 1;
        } else if expired(deadline) || config.node_limit.is_some_and(|l| stats.processed > l) {
            node_limited = !expired(deadline);
            stats.interrupted += 1;
            record.outcome = NodeOutcome::Interrupted;
            interrupted_bound = Some(node.parent_bound);
        } else {
            let before = pool.len();
            let cg = column_generation(instance, &node.fixings, &mut pool, &master, &solver, deadline)?;
            stats.cg_iterations += cg.iterations;
            stats.columns_generated += cg.new_columns;
            stats.pricing_seconds += cg.pricing_seconds;

            if pool.len() > before {
                let t0 = Instant::now();
                let inc = solve_rmp_integer(instance, &pool, &master, &solver, incumbent_budget(config, deadline))?;
                stats.incumbent_seconds += t0.elapsed().as_secs_f64();
                if let Some(sol) = inc.solution {
                    best.offer(sol);
                }
            }

            match cg.lp {
                None => {
                    stats.pruned_infeasible += 1;
                    record.outcome = NodeOutcome::PrunedInfeasible;
                }
                Some(lp) if lp.uses_artificial() && cg.proven => {
                    stats.pruned_infeasible += 1;
                    record.outcome = NodeOutcome::PrunedInfeasible;
                }
                Some(lp) => {
                    let bound = lp.objective.min(node.parent_bound);
                    record.node_bound = Some(bound);
                    if node.seq == 0 && cg.proven {
                        root_bound = Some(lp.objective);
                    }
                    if !cg.proven {
                        stats.interrupted += 1;
                        record.outcome = NodeOutcome::Interrupted;
                        interrupted_bound = Some(node.parent_bound);
                    } else if bound <= best.value + TOLERANCE {
                        stats.pruned_bound += 1;
                    } else if is_integral(&lp) {
                        let sol = decode_solution(instance, pool.patterns(), &lp.master, &lp.primal)?;
                        best.offer(sol);
                        stats.pruned_optimal += 1;
                        record.outcome = NodeOutcome::PrunedOptimal;
                    } else {
                        let (left, right) = branch(&node, &lp, bound, &mut next_seq)?;
                        queue.push(Queued(left));
                        queue.push(Queued(right));
                        stats.branched += 1;
                        record.outcome = NodeOutcome::Branched;
                    }
                }
            }
        }

        record.incumbent = best.value;
        record.pool_size = pool.len();
        record.global_bound = queue
            .iter()
            .map(|q| q.0.parent_bound)
            .chain(interrupted_bound)
            .fold(best.value, f64::max);
        log::info!(
            "node {:>5}  depth {:>3}  parent {:>12.4}  bound {:>12}  incumbent {:>12.4}  pool {:>5}  {:?}",
            record.seq,
            record.depth,
            record.parent_bound,
            record.node_bound.map_or("-".to_string(), |b| format!("{b:.4}")),
            record.incumbent,
            record.pool_size,
            record.outcome
        );
        log.push(record);
        if interrupted_bound.is_some() {
            break;
        }
    }

    stats.open = queue.len();
    let open_bound = queue.iter().map(|q| q.0.parent_bound).chain(interrupted_bound).fold(f64::NEG_INFINITY, f64::max);
    let finished = interrupted_bound.is_none() && queue.is_empty();
    let (bound, status) = if finished {
        if best.solution.is_some() {
            (best.value, SolveStatus::Optimal)
        } else {
            (f64::NEG_INFINITY, SolveStatus::Infeasible)
        }
    } else if node_limited && best.solution.is_some() {
        (open_bound.max(best.value), SolveStatus::Feasible)
    } else {
        (open_bound.max(best.value), SolveStatus::TimeLimit)
    };
    stats.gap = match best.solution {
        Some(ref s) => relative_gap(bound, s.objective).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    };
    Ok(BnpResult {
        solution: best.solution,
        bound,
        status,
        root_bound,
        stats,
        log,
        pool,
        seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct HeuristicResult {
    pub solution: Option<Solution>,
    /// Relaxation value at the end of root column generation.
    pub bound: f64,
    /// Whether column generation finished, making `bound` a proven bound.
    pub bound_proven: bool,
    pub gap: f64,
    pub status: SolveStatus,
    pub cg_iterations: usize,
    pub pool: ColumnPool,
    pub seconds: f64,
}

impl HeuristicResult {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

/// Column generation at the root, then one integer solve over the pool.
pub fn root_node_heuristic(instance: &Instance, config: &BnpConfig, time_limit: Option<f64>) -> Result<HeuristicResult> {
    let started = Instant::now();
    let deadline = time_limit.map(|t| started + Duration::from_secs_f64(t.max(0.0)));
    let solver = Solver::from_config(&config.backend)?;
    let master = MasterConfig { fixings: Vec::new(), artificial_columns: false, relaxed: false, ..config.master.clone() };
    let mut pool = config.initial_pool.build(instance.stations())?;
    let cg = column_generation(instance, &[], &mut pool, &master, &solver, deadline)?;
    let Some(lp) = cg.lp else {
        return Ok(HeuristicResult {
            solution: None,
            bound: f64::NEG_INFINITY,
            bound_proven: cg.proven,
            gap: f64::INFINITY,
            status: SolveStatus::Infeasible,
            cg_iterations: cg.iterations,
            pool,
            seconds: started.elapsed().as_secs_f64(),
        });
    };
    let inc = solve_rmp_integer(instance, &pool, &master, &solver, remaining(deadline))?;
    let gap = match &inc.solution {
        Some(s) => relative_gap(lp.objective, s.objective).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    };
    let status = if !cg.proven || inc.status == SolveStatus::TimeLimit {
        SolveStatus::TimeLimit
    } else if inc.solution.is_none() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Feasible
    };
    Ok(HeuristicResult {
        solution: inc.solution,
        bound: lp.objective,
        bound_proven: cg.proven,
        gap,
        status,
        cg_iterations: cg.iterations,
        pool,
        seconds: started.elapsed().as_secs_f64(),
    })
}
