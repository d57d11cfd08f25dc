//! Thin interface to the external LP/MIP solver.
//!
//! Models are built against caller-chosen keys for variables and rows so that
//! primal and dual values can be looked up by meaning instead of insertion
//! order. The only backend shipped is HiGHS; any backend used for column
//! generation must report row duals for LPs.

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::io::{self, Write};
use std::num::NonZeroU32;
use std::time::Instant;

use highs::{HighsModelStatus, RowProblem, Sense};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait Key: Clone + Eq + Hash + Debug + Display {}
impl<T: Clone + Eq + Hash + Debug + Display> Key for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl RowId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Variable<V> {
    key: V,
    kind: VarKind,
    lower: f64,
    upper: f64,
    cost: f64,
}

#[derive(Debug, Clone)]
struct Row<C> {
    key: C,
    terms: Vec<(VarId, f64)>,
    sense: RowSense,
    rhs: f64,
}

/// A maximisation model with keyed variables and rows.
#[derive(Debug, Clone)]
pub struct ModelHandle<V: Key, C: Key> {
    vars: Vec<Variable<V>>,
    rows: Vec<Row<C>>,
    var_index: HashMap<V, VarId>,
    row_index: HashMap<C, RowId>,
}

impl<V: Key, C: Key> Default for ModelHandle<V, C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: Key, C: Key> ModelHandle<V, C> {
    pub fn new() -> Self {
        ModelHandle {
            vars: Vec::new(),
            rows: Vec::new(),
            var_index: HashMap::new(),
            row_index: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, key: V, kind: VarKind, lower: f64, upper: f64, cost: f64) -> Result<VarId> {
        if !(lower <= upper) {
            return Err(Error::Backend(format!("variable {key}: bounds [{lower}, {upper}] are empty")));
        }
        if self.var_index.contains_key(&key) {
            return Err(Error::Backend(format!("duplicate variable {key}")));
        }
        let id = VarId(self.vars.len());
        self.var_index.insert(key.clone(), id);
        self.vars.push(Variable { key, kind, lower, upper, cost });
        Ok(id)
    }

    pub fn add_row(&mut self, key: C, terms: Vec<(VarId, f64)>, sense: RowSense, rhs: f64) -> Result<RowId> {
        if let Some((v, _)) = terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(Error::Backend(format!("row {key} references undeclared variable #{}", v.0)));
        }
        if self.row_index.contains_key(&key) {
            return Err(Error::Backend(format!("duplicate row {key}")));
        }
        let id = RowId(self.rows.len());
        self.row_index.insert(key.clone(), id);
        self.rows.push(Row { key, terms, sense, rhs });
        Ok(id)
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<()> {
        let v = self
            .vars
            .get_mut(var.0)
            .ok_or_else(|| Error::Backend(format!("unknown variable #{}", var.0)))?;
        if !(lower <= upper) {
            return Err(Error::Backend(format!("variable {}: bounds [{lower}, {upper}] are empty", v.key)));
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn bounds(&self, var: VarId) -> (f64, f64) {
        (self.vars[var.0].lower, self.vars[var.0].upper)
    }

    pub fn var(&self, key: &V) -> Option<VarId> {
        self.var_index.get(key).copied()
    }

    pub fn row(&self, key: &C) -> Option<RowId> {
        self.row_index.get(key).copied()
    }

    pub fn var_key(&self, var: VarId) -> &V {
        &self.vars[var.0].key
    }

    pub fn row_key(&self, row: RowId) -> &C {
        &self.rows[row.0].key
    }

    pub fn var_kind(&self, var: VarId) -> VarKind {
        self.vars[var.0].kind
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = (VarId, &V)> + '_ {
        self.vars.iter().enumerate().map(|(i, v)| (VarId(i), &v.key))
    }

    pub fn rows(&self) -> impl Iterator<Item = (RowId, &C)> + '_ {
        self.rows.iter().enumerate().map(|(i, r)| (RowId(i), &r.key))
    }

    pub fn is_mip(&self) -> bool {
        self.vars.iter().any(|v| v.kind == VarKind::Binary)
    }

    /// Objective value of a primal vector.
    pub fn evaluate(&self, primal: &[f64]) -> f64 {
        self.vars.iter().zip(primal).map(|(v, x)| v.cost * x).sum()
    }

    /// Largest bound or row violation of a primal vector.
    pub fn max_violation(&self, primal: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.vars.iter().zip(primal) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for r in &self.rows {
            let lhs: f64 = r.terms.iter().map(|(v, a)| a * primal[v.0]).sum();
            let excess = match r.sense {
                RowSense::Le => lhs - r.rhs,
                RowSense::Ge => r.rhs - lhs,
                RowSense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(excess);
        }
        worst
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp(&self, out: &mut impl Write) -> io::Result<()> {
        let name = |s: &str| -> String {
            s.chars()
                .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
                .collect()
        };
        let term = |out: &mut dyn Write, coef: f64, var: &str| -> io::Result<()> {
            if coef < 0.0 {
                write!(out, " - {} {}", -coef, var)
            } else {
                write!(out, " + {coef} {var}")
            }
        };
        let var_names: Vec<String> = self.vars.iter().map(|v| name(&v.key.to_string())).collect();
        writeln!(out, "Maximize")?;
        write!(out, " obj:")?;
        for (v, n) in self.vars.iter().zip(&var_names) {
            if v.cost != 0.0 {
                term(out, v.cost, n)?;
            }
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for r in &self.rows {
            write!(out, " {}:", name(&r.key.to_string()))?;
            if r.terms.is_empty() {
                write!(out, " 0 {}", var_names.first().map_or("x", String::as_str))?;
            }
            for (v, a) in &r.terms {
                term(out, *a, &var_names[v.0])?;
            }
            let op = match r.sense {
                RowSense::Le => "<=",
                RowSense::Ge => ">=",
                RowSense::Eq => "=",
            };
            writeln!(out, " {op} {}", r.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for (v, n) in self.vars.iter().zip(&var_names) {
            let lo = if v.lower.is_infinite() { "-inf".to_string() } else { v.lower.to_string() };
            let hi = if v.upper.is_infinite() { "+inf".to_string() } else { v.upper.to_string() };
            writeln!(out, " {lo} <= {n} <= {hi}")?;
        }
        let binaries: Vec<&String> = self
            .vars
            .iter()
            .zip(&var_names)
            .filter(|(v, _)| v.kind == VarKind::Binary)
            .map(|(_, n)| n)
            .collect();
        if !binaries.is_empty() {
            writeln!(out, "Binaries")?;
            for n in binaries {
                writeln!(out, " {n}")?;
            }
        }
        writeln!(out, "End")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Stopped by a limit other than time with a feasible point at hand.
    Feasible,
    Infeasible,
    /// Time limit reached; an incumbent may or may not exist.
    TimeLimit,
    Unbounded,
}

impl Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    primal: Option<Vec<f64>>,
    duals: Option<Vec<f64>>,
    pub seconds: f64,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        self.primal.is_some()
    }

    pub fn primal(&self) -> Option<&[f64]> {
        self.primal.as_deref()
    }

    pub fn value(&self, var: VarId) -> Option<f64> {
        self.primal.as_ref().map(|p| p[var.0])
    }

    /// Marginal change of the optimal objective per unit increase of the row
    /// right-hand side; nonnegative for binding `<=` rows.
    pub fn dual(&self, row: RowId) -> Option<f64> {
        self.duals.as_ref().map(|d| d[row.0])
    }

    pub fn duals(&self) -> Option<&[f64]> {
        self.duals.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub name: String,
    /// Default time limit in seconds for MIP solves; `None` means unlimited.
    pub time_limit: Option<f64>,
    pub mip_gap: f64,
    pub threads: u32,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            name: "highs".into(),
            time_limit: None,
            mip_gap: 0.0,
            threads: 1,
        }
    }
}

/// Absolute MIP gap accepted as optimal, on top of the relative `mip_gap`.
const MIP_ABS_GAP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BackendKind {
    Highs,
}

#[derive(Debug, Clone)]
pub struct Solver {
    kind: BackendKind,
    config: BackendConfig,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::from_config(&BackendConfig::default()).expect("default backend is available")
    }
}

impl Solver {
    pub fn from_config(config: &BackendConfig) -> Result<Solver> {
        let kind = match config.name.to_ascii_lowercase().as_str() {
            "highs" => BackendKind::Highs,
            other => {
                return Err(Error::Config(format!(
                    "unknown solver backend {other:?}; column generation needs LP duals, available: highs"
                )))
            }
        };
        if config.threads == 0 {
            return Err(Error::Config("solver threads must be at least 1".into()));
        }
        if !(config.mip_gap >= 0.0) {
            return Err(Error::Config("MIP gap tolerance must be nonnegative".into()));
        }
        if let Some(t) = config.time_limit {
            if !(t >= 0.0) {
                return Err(Error::Config("time limit must be nonnegative".into()));
            }
        }
        Ok(Solver {
            kind,
            config: config.clone(),
        })
    }

    pub fn name(&self) -> &str {
        match self.kind {
            BackendKind::Highs => "highs",
        }
    }

    pub fn supports_duals(&self) -> bool {
        true
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    /// Solves the continuous relaxation and reports row duals.
    pub fn solve_lp<V: Key, C: Key>(&self, model: &ModelHandle<V, C>) -> Result<SolveResult> {
        self.run(model, true, None, None)
    }

    /// Solves with integrality. `time_limit` overrides the configured limit.
    pub fn solve_mip<V: Key, C: Key>(&self, model: &ModelHandle<V, C>, time_limit: Option<f64>) -> Result<SolveResult> {
        let limit = time_limit.or(self.config.time_limit);
        if !model.is_mip() {
            let mut res = self.run(model, true, limit, None)?;
            res.duals = None;
            return Ok(res);
        }
        self.run(model, false, limit, None)
    }

    /// Like [`Solver::solve_mip`], but solutions with objective at most
    /// `floor` may be cut off. `Infeasible` then means none is above it.
    pub fn solve_mip_above<V: Key, C: Key>(
        &self,
        model: &ModelHandle<V, C>,
        time_limit: Option<f64>,
        floor: f64,
    ) -> Result<SolveResult> {
        let limit = time_limit.or(self.config.time_limit);
        self.run(model, !model.is_mip(), limit, Some(floor))
    }

    fn run<V: Key, C: Key>(
        &self,
        model: &ModelHandle<V, C>,
        relax: bool,
        time_limit: Option<f64>,
        floor: Option<f64>,
    ) -> Result<SolveResult> {
        let started = Instant::now();
        if model.vars.is_empty() {
            return Ok(trivial_result(model, relax, started));
        }
        if let Some(t) = time_limit {
            if t <= 0.0 {
                return Ok(SolveResult {
                    status: SolveStatus::TimeLimit,
                    objective: None,
                    best_bound: None,
                    primal: None,
                    duals: None,
                    seconds: 0.0,
                });
            }
        }

        let mut problem = RowProblem::default();
        let cols: Vec<highs::Col> = model
            .vars
            .iter()
            .map(|v| {
                let integer = !relax && v.kind == VarKind::Binary;
                problem.add_column_with_integrality(v.cost, v.lower..=v.upper, integer)
            })
            .collect();
        for r in &model.rows {
            let factors = r.terms.iter().map(|(v, a)| (cols[v.0], *a));
            match r.sense {
                RowSense::Le => problem.add_row(..=r.rhs, factors),
                RowSense::Ge => problem.add_row(r.rhs.., factors),
                RowSense::Eq => problem.add_row(r.rhs..=r.rhs, factors),
            }
        }

        let mut highs = problem
            .try_optimise(Sense::Maximise)
            .map_err(|e| Error::Backend(format!("HiGHS rejected the model: {e:?}")))?;
        highs.make_quiet();
        highs.set_threads(NonZeroU32::new(self.config.threads).expect("checked at configuration"));
        highs.set_option("random_seed", 0);
        if let Some(t) = time_limit {
            highs.set_option("time_limit", t);
        }
        if !relax {
            highs.set_option("mip_rel_gap", self.config.mip_gap);
            highs.set_option("mip_abs_gap", MIP_ABS_GAP);
            if let Some(floor) = floor {
                // HiGHS minimises the negated objective, so the cutoff is negated too.
                highs.set_option("objective_bound", -floor);
            }
        }
        let solved = highs
            .try_solve()
            .map_err(|e| Error::Backend(format!("HiGHS failed: {e:?}")))?;

        let has_primal = solved.primal_solution_status() == highs::HighsSolutionStatus::Feasible;
        let status = match solved.status() {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Unbounded,
            HighsModelStatus::ReachedTimeLimit => SolveStatus::TimeLimit,
            HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
                if has_primal =>
            {
                SolveStatus::Feasible
            }
            other => return Err(Error::Backend(format!("HiGHS returned status {other:?}"))),
        };
        let solution = solved.get_solution();
        let primal = (has_primal && status != SolveStatus::Infeasible).then(|| solution.columns().to_vec());
        let objective = primal.as_ref().map(|p| model.evaluate(p));
        let best_bound = if relax {
            (status == SolveStatus::Optimal).then(|| objective.unwrap_or(0.0))
        } else {
            solved
                .double_info_value(c"mip_dual_bound")
                .ok()
                .filter(|b| b.is_finite())
                .or(if status == SolveStatus::Optimal { objective } else { None })
        };
        let duals = (relax && status == SolveStatus::Optimal).then(|| solution.dual_rows().to_vec());
        Ok(SolveResult {
            status,
            objective,
            best_bound,
            primal,
            duals,
            seconds: started.elapsed().as_secs_f64(),
        })
    }
}

/// A model without variables: feasible iff every row accepts `0`.
fn trivial_result<V: Key, C: Key>(model: &ModelHandle<V, C>, relax: bool, started: Instant) -> SolveResult {
    let feasible = model.rows.iter().all(|r| match r.sense {
        RowSense::Le => 0.0 <= r.rhs,
        RowSense::Ge => 0.0 >= r.rhs,
        RowSense::Eq => r.rhs == 0.0,
    });
    SolveResult {
        status: if feasible { SolveStatus::Optimal } else { SolveStatus::Infeasible },
        objective: feasible.then_some(0.0),
        best_bound: feasible.then_some(0.0),
        primal: feasible.then(Vec::new),
        duals: (feasible && relax).then(|| vec![0.0; model.rows.len()]),
        seconds: started.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Model = ModelHandle<&'static str, &'static str>;

    #[test]
    fn lp_dual_of_binding_upper_bound_row() {
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY, 1.0).unwrap();
        let r = m.add_row("cap", vec![(x, 1.0)], RowSense::Le, 1.0).unwrap();
        let res = Solver::default().solve_lp(&m).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective.unwrap() - 1.0).abs() < 1e-9);
        assert!((res.dual(r).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dual_signs_follow_rhs_sensitivity() {
        // max 3x + 2y, x + y <= 4, -x >= -3.5 (slack), y = 1
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY, 3.0).unwrap();
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY, 2.0).unwrap();
        let sum = m.add_row("sum", vec![(x, 1.0), (y, 1.0)], RowSense::Le, 4.0).unwrap();
        let negx = m.add_row("negx", vec![(x, -1.0)], RowSense::Ge, -3.5).unwrap();
        let eq = m.add_row("eq", vec![(y, 1.0)], RowSense::Eq, 1.0).unwrap();
        let res = Solver::default().solve_lp(&m).unwrap();
        assert!((res.objective.unwrap() - 11.0).abs() < 1e-9);
        // raising the rhs of `sum` lets x grow: +3 per unit
        assert!((res.dual(sum).unwrap() - 3.0).abs() < 1e-9);
        assert!(res.dual(negx).unwrap().abs() < 1e-9);
        // raising y's fixed value trades one unit of x (3) for one of y (2)
        assert!((res.dual(eq).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn floor_cuts_off_solutions_at_or_below_it() {
        // max x + 2y + 3z over binaries with x + y + z <= 2: optimum 5
        let mut m = Model::new();
        let vars: Vec<_> = ["x", "y", "z"]
            .iter()
            .zip(1..)
            .map(|(name, c)| m.add_var(*name, VarKind::Binary, 0.0, 1.0, c as f64).unwrap())
            .collect();
        m.add_row("pick", vars.iter().map(|&v| (v, 1.0)).collect(), RowSense::Le, 2.0).unwrap();
        let solver = Solver::default();
        let below = solver.solve_mip_above(&m, None, 4.5).unwrap();
        assert_eq!(below.status, SolveStatus::Optimal);
        assert!((below.objective.unwrap() - 5.0).abs() < 1e-9);
        let above = solver.solve_mip_above(&m, None, 5.5).unwrap();
        assert_eq!(above.status, SolveStatus::Infeasible);
    }

    #[test]
    fn infeasible_lp() {
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY, 1.0).unwrap();
        m.add_row("neg", vec![(x, 1.0)], RowSense::Le, -1.0).unwrap();
        let res = Solver::default().solve_lp(&m).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert!(!res.has_solution());
    }

    #[test]
    fn empty_model() {
        let m = Model::new();
        let res = Solver::default().solve_lp(&m).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.objective, Some(0.0));
        let res = Solver::default().solve_mip(&m, None).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
    }

    #[test]
    fn binary_mips() {
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Binary, 0.0, 1.0, 1.0).unwrap();
        let res = Solver::default().solve_mip(&m, None).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective.unwrap() - 1.0).abs() < 1e-9);
        assert!(res.duals().is_none());

        let y = m.add_var("y", VarKind::Binary, 0.0, 1.0, 1.0).unwrap();
        m.add_row("pick", vec![(x, 1.0), (y, 1.0)], RowSense::Le, 1.0).unwrap();
        let res = Solver::default().solve_mip(&m, None).unwrap();
        assert!((res.objective.unwrap() - 1.0).abs() < 1e-9);
        assert!((res.best_bound.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn relaxation_dominates_integer_optimum() {
        // max x + y, 2x + 2y <= 3: LP 1.5, MIP 1
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Binary, 0.0, 1.0, 1.0).unwrap();
        let y = m.add_var("y", VarKind::Binary, 0.0, 1.0, 1.0).unwrap();
        m.add_row("r", vec![(x, 2.0), (y, 2.0)], RowSense::Le, 3.0).unwrap();
        let s = Solver::default();
        let lp = s.solve_lp(&m).unwrap().objective.unwrap();
        let mip = s.solve_mip(&m, None).unwrap().objective.unwrap();
        assert!((lp - 1.5).abs() < 1e-9);
        assert!((mip - 1.0).abs() < 1e-9);
        let again = s.solve_lp(&m).unwrap().objective.unwrap();
        assert!((again - lp).abs() < 1e-6);
    }

    #[test]
    fn zero_time_limit() {
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Binary, 0.0, 1.0, 1.0).unwrap();
        m.add_row("r", vec![(x, 1.0)], RowSense::Le, 1.0).unwrap();
        let res = Solver::default().solve_mip(&m, Some(0.0)).unwrap();
        assert_eq!(res.status, SolveStatus::TimeLimit);
    }

    #[test]
    fn rejects_malformed_models_and_configs() {
        let mut m = Model::new();
        assert!(m.add_var("x", VarKind::Continuous, 1.0, 0.0, 0.0).is_err());
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0, 0.0).unwrap();
        assert!(m.add_var("x", VarKind::Continuous, 0.0, 1.0, 0.0).is_err());
        assert!(m.add_row("r", vec![(VarId(7), 1.0)], RowSense::Le, 0.0).is_err());
        m.add_row("r", vec![(x, 1.0)], RowSense::Le, 0.0).unwrap();
        assert!(m.add_row("r", vec![(x, 1.0)], RowSense::Le, 0.0).is_err());

        let cfg = BackendConfig { name: "glpk".into(), ..BackendConfig::default() };
        assert!(matches!(Solver::from_config(&cfg), Err(Error::Config(_))));
        let cfg = BackendConfig { threads: 0, ..BackendConfig::default() };
        assert!(Solver::from_config(&cfg).is_err());
    }

    #[test]
    fn lp_export() {
        let mut m = Model::new();
        let x = m.add_var("x", VarKind::Binary, 0.0, 1.0, 2.0).unwrap();
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY, -1.0).unwrap();
        m.add_row("link", vec![(x, 1.0), (y, -1.0)], RowSense::Le, 0.0).unwrap();
        let mut buf = Vec::new();
        m.write_lp(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("Maximize"));
        assert!(text.contains("link: + 1 x - 1 y <= 0"));
        assert!(text.contains("Binaries\n x"));
    }
}
