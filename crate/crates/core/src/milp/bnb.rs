//! Depth-first branch and bound over the parity LP.

use std::time::{Duration, Instant};

use super::cuts::CutSeparator;
use super::repair::repair;
use super::simplex::{LpData, LpStatus, Simplex};
use crate::error::Result;
use crate::ipmodel::{DecodingModel, VarRole};

/// `|v − round(v)| ≤ INT_TOL` counts as integral.
pub const INT_TOL: f64 = 1e-6;
const ROOT_CUT_ROUNDS: usize = 200;
const NODE_CUT_ROUNDS: usize = 10;
/// Cut rows allowed on top of the model rows: twice the model rows plus a
/// little, at most this many.
const MAX_CUT_ROWS: usize = 256;
/// Above this many penalised variables bounds are not lifted.
const MAX_LIFTED_PENALTIES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveBudget {
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    pub gap_tolerance: Option<f64>,
}

impl SolveBudget {
    pub fn seconds(secs: f64) -> Self {
        SolveBudget { time_limit: Duration::from_secs_f64(secs), node_limit: None, gap_tolerance: None }
    }

    /// Node-limited budget; the time limit is left generous so runs are reproducible.
    pub fn nodes(limit: u64) -> Self {
        SolveBudget { time_limit: Duration::from_secs(3600), node_limit: Some(limit), gap_tolerance: None }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = limit;
        self
    }
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget::seconds(60.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// Budget hit with an incumbent in hand.
    Feasible,
    Infeasible,
    /// Budget hit before any incumbent was found.
    NoIncumbent,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NoIncumbent => "no_incumbent",
        }
    }
}

/// Values of all `f` variables followed by all `k` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub f: Vec<f64>,
    pub k: Vec<f64>,
}

impl Assignment {
    /// `f` rounded to bits. Only meaningful for binary or fixed variables.
    pub fn bits(&self) -> Vec<u8> {
        self.f.iter().map(|&v| u8::from(v > 0.5)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub incumbent: Option<Assignment>,
    /// Objective of the incumbent, model constant included.
    pub objective: Option<f64>,
    pub dual_bound: f64,
    pub root_bound: Option<f64>,
    pub nodes: u64,
    pub elapsed: Duration,
    /// `(nodes, dual bound, incumbent objective)` recorded whenever either changes.
    pub trace: Vec<(u64, f64, Option<f64>)>,
}

impl SolveOutcome {
    /// `100·(objective − bound)/objective`, or 0 when both are 0.
    pub fn gap_pct(&self) -> Option<f64> {
        self.objective.map(|z| gap_pct(z, self.dual_bound))
    }
}

/// Relative optimality gap in percent.
pub fn gap_pct(objective: f64, dual_bound: f64) -> f64 {
    if objective.abs() < 1e-12 {
        if dual_bound.abs() < 1e-12 {
            0.0
        } else {
            100.0
        }
    } else {
        100.0 * (objective - dual_bound) / objective
    }
}

/// Optional starting point: a value for some `f` variables. Missing entries
/// take their received value; `k` is completed from the row parities. A
/// start that turns out infeasible is dropped.
#[derive(Clone, Debug, Default)]
pub struct WarmStart {
    pub f: Vec<Option<u8>>,
}

struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// LP bound of the parent.
    bound: f64,
}

pub fn solve_bnb(model: &DecodingModel, budget: &SolveBudget, warm_start: Option<&WarmStart>) -> Result<SolveOutcome> {
    solve_bnb_with(model, budget, warm_start, None)
}

/// Branch and bound with an optional tie-break: moving `f_i` away from its
/// received value costs an extra `flip_penalty[i]`. The penalties must sum
/// to less than 1 so the Hamming-distance optimum is unchanged; reported
/// objectives and bounds are on the unpenalised scale.
pub fn solve_bnb_with(
    model: &DecodingModel,
    budget: &SolveBudget,
    warm_start: Option<&WarmStart>,
    flip_penalty: Option<&[f64]>,
) -> Result<SolveOutcome> {
    let start = Instant::now();
    let roles: Vec<VarRole> = model.f_vars.iter().map(|v| v.role).collect();
    let mut lp = LpData::from_model(model, &roles);
    let n_f = lp.n_f;
    let n_struct = lp.n_structural();
    let cut_cap = lp.m0 + (2 * lp.m0 + 32).min(MAX_CUT_ROWS);
    let true_cost = lp.cost[..n_f].to_vec();
    let mut penalty_total = 0.0;
    let mut active = Vec::new();
    if let Some(pen) = flip_penalty {
        for (i, &e) in pen.iter().enumerate().take(n_f) {
            if matches!(roles[i], VarRole::Fixed(_)) || e == 0.0 {
                continue;
            }
            penalty_total += e;
            active.push(e);
            if lp.cost[i] > 0.0 {
                lp.cost[i] += e;
            } else {
                lp.cost[i] -= e;
                lp.objective_constant += e;
            }
        }
    }
    let work_cost = lp.cost[..n_f].to_vec();
    let work_constant = lp.objective_constant;
    let objective = |a: &Assignment| work_constant + a.f.iter().zip(&work_cost).map(|(x, c)| x * c).sum::<f64>();
    let true_objective = |a: &Assignment| lp_objective(model, &true_cost, a);
    // integral objective whenever no continuous f is present
    let integral_objective = roles.iter().all(|r| *r != VarRole::Relaxed);
    // Every working objective value is an integer plus one of these sums, so
    // an LP bound can be lifted to the next such value.
    let offsets: Option<Vec<f64>> = (integral_objective && active.len() <= MAX_LIFTED_PENALTIES).then(|| {
        let mut sums = vec![0.0];
        for &e in &active {
            let shifted: Vec<f64> = sums.iter().map(|s| s + e).collect();
            sums.extend(shifted);
        }
        sums
    });
    let lift = |b: f64| match &offsets {
        Some(q) => q.iter().map(|&o| (b - o - INT_TOL).ceil() + o).fold(f64::INFINITY, f64::min),
        None => b,
    };
    // bound on the working scale to a bound on the Hamming scale
    let round_bound = |b: f64| {
        let b = b - penalty_total;
        if integral_objective {
            (b - INT_TOL).ceil()
        } else {
            b
        }
    };

    let mut incumbent: Option<(Assignment, f64)> = None;
    if let Some(ws) = warm_start {
        if let Some(a) = complete_warm_start(model, ws) {
            let obj = objective(&a);
            incumbent = Some((a, obj));
        }
    }

    let mut trace = Vec::new();
    let root = Node { lower: lp.lower[..n_struct].to_vec(), upper: lp.upper[..n_struct].to_vec(), bound: f64::NEG_INFINITY };
    let mut simplex = Simplex::new(lp);
    let mut separator = CutSeparator::new(model);
    let mut stack = vec![root];
    let mut nodes = 0u64;
    let mut root_bound = None;
    let mut last_dual = f64::NEG_INFINITY;
    let mut budget_hit = false;
    let received_k: Vec<f64> = model
        .rows
        .iter()
        .zip(&model.row_constants)
        .map(|(row, &c)| (row.iter().map(|&v| model.received_value(v) as f64).sum::<f64>() + c as f64) / 2.0)
        .collect();

    // true when no solution below `b` can beat the incumbent
    let pruned = |b: f64, inc: &Option<(Assignment, f64)>| -> bool {
        match inc {
            None => false,
            Some((_, z)) => {
                let tol = budget.gap_tolerance.map_or(0.0, |g| g * z.abs().max(1.0));
                lift(b) >= z - 1e-9 + tol
            }
        }
    };

    while let Some(node) = stack.pop() {
        if budget.node_limit.is_some_and(|l| nodes >= l) || start.elapsed() >= budget.time_limit {
            stack.push(node);
            budget_hit = true;
            break;
        }
        if pruned(node.bound, &incumbent) {
            continue;
        }
        nodes += 1;
        simplex.set_bounds(&node.lower, &node.upper);
        let max_rounds = if nodes == 1 { ROOT_CUT_ROUNDS } else { NODE_CUT_ROUNDS };
        let mut rounds = 0;
        let status = loop {
            let st = simplex.solve()?;
            if st == LpStatus::Infeasible || rounds >= max_rounds || pruned(simplex.objective(), &incumbent) {
                break st;
            }
            let room = cut_cap.saturating_sub(simplex.lp().m);
            let cuts = separator.separate(model, &simplex.values()[..n_f]);
            if cuts.is_empty() || room == 0 {
                break st;
            }
            for cut in cuts.iter().take(room) {
                simplex.add_cut(&cut.coefs, cut.rhs);
            }
            rounds += 1;
        };
        if status == LpStatus::Infeasible {
            continue;
        }
        let bound = simplex.objective();
        let values = simplex.values()[..n_struct].to_vec();
        if root_bound.is_none() {
            root_bound = Some(bound);
        }
        if let Some(a) = repair_heuristic(model, &values[..n_f], &work_cost) {
            let obj = objective(&a);
            if incumbent.as_ref().is_none_or(|(_, z)| obj < *z - 1e-9) {
                incumbent = Some((a, obj));
            }
        }
        if pruned(bound, &incumbent) {
            continue;
        }
        match pick_branch(&roles, &values, n_f) {
            None => {
                let a = Assignment { f: values[..n_f].to_vec(), k: values[n_f..].to_vec() };
                let a = snap(a, &roles);
                let obj = objective(&a);
                if incumbent.as_ref().is_none_or(|(_, z)| obj < *z - 1e-9) {
                    incumbent = Some((a, obj));
                }
            }
            Some(var) => {
                let v = values[var];
                let (fl, cl) = (v.floor(), v.ceil());
                let down_first = if var < n_f {
                    model.received_value(var) == 0
                } else {
                    received_k[var - n_f] <= v
                };
                let mut down = Node { lower: node.lower.clone(), upper: node.upper.clone(), bound };
                down.upper[var] = fl;
                let mut up = Node { lower: node.lower, upper: node.upper, bound };
                up.lower[var] = cl;
                // the child explored first goes on top of the stack
                if down_first {
                    stack.push(up);
                    stack.push(down);
                } else {
                    stack.push(down);
                    stack.push(up);
                }
            }
        }
        let dual = open_bound(&stack, &incumbent).map_or(f64::NEG_INFINITY, round_bound);
        let dual = dual.max(last_dual);
        let inc_obj = incumbent.as_ref().map(|(a, _)| true_objective(a));
        if dual != last_dual || trace.last().map(|t: &(u64, f64, Option<f64>)| t.2) != Some(inc_obj) {
            trace.push((nodes, dual, inc_obj));
            last_dual = dual;
        }
        if let (Some(tol), Some(z)) = (budget.gap_tolerance, inc_obj) {
            if z - dual <= tol * z.abs().max(1.0) {
                budget_hit = !stack.is_empty();
                break;
            }
        }
    }

    let exhausted = stack.iter().all(|n| pruned(n.bound, &incumbent));
    let objective = incumbent.as_ref().map(|(a, _)| true_objective(a));
    let (status, dual_bound) = match (objective, exhausted && !budget_hit || stack.is_empty()) {
        (Some(z), true) => (SolveStatus::Optimal, z),
        (None, true) => (SolveStatus::Infeasible, f64::INFINITY),
        (Some(z), false) => {
            let b = open_bound(&stack, &incumbent).map_or(z, round_bound).max(last_dual).min(z);
            let within_gap = budget.gap_tolerance.is_some_and(|g| z - b <= g * z.abs().max(1.0));
            (if within_gap { SolveStatus::Optimal } else { SolveStatus::Feasible }, b)
        }
        (None, false) => (SolveStatus::NoIncumbent, open_bound(&stack, &incumbent).map_or(f64::NEG_INFINITY, round_bound)),
    };
    if trace.last().map(|t| (t.1, t.2)) != Some((dual_bound, objective)) && dual_bound.is_finite() {
        trace.push((nodes, dual_bound, objective));
    }
    Ok(SolveOutcome {
        status,
        incumbent: incumbent.map(|(a, _)| a),
        objective,
        dual_bound,
        root_bound,
        nodes,
        elapsed: start.elapsed(),
        trace,
    })
}

/// Smallest bound over open nodes, capped by the incumbent.
fn open_bound(stack: &[Node], incumbent: &Option<(Assignment, f64)>) -> Option<f64> {
    let open = stack.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let inc = incumbent.as_ref().map_or(f64::INFINITY, |(_, z)| *z);
    let b = open.min(inc);
    b.is_finite().then_some(b)
}

fn lp_objective(model: &DecodingModel, cost: &[f64], a: &Assignment) -> f64 {
    model.objective_constant as f64 + a.f.iter().zip(cost).map(|(x, c)| x * c).sum::<f64>()
}

fn fractionality(v: f64) -> f64 {
    (v - v.round()).abs()
}

/// Most fractional binary `f`; failing that, most fractional `k`. Lowest index wins ties.
fn pick_branch(roles: &[VarRole], values: &[f64], n_f: usize) -> Option<usize> {
    let most_fractional = |range: std::ops::Range<usize>, eligible: &dyn Fn(usize) -> bool| {
        let mut best: Option<(usize, f64)> = None;
        for j in range {
            let fr = fractionality(values[j]);
            if fr > INT_TOL && eligible(j) && best.is_none_or(|(_, b)| fr > b + 1e-12) {
                best = Some((j, fr));
            }
        }
        best.map(|(j, _)| j)
    };
    most_fractional(0..n_f, &|j| roles[j] == VarRole::Binary).or_else(|| most_fractional(n_f..values.len(), &|_| true))
}

/// Rounds integer-constrained values that are within tolerance.
fn snap(mut a: Assignment, roles: &[VarRole]) -> Assignment {
    for (v, role) in a.f.iter_mut().zip(roles) {
        if *role != VarRole::Relaxed {
            *v = v.round();
        }
    }
    a.k.iter_mut().for_each(|v| *v = v.round());
    a
}

/// Parity-consistent bits near the LP point, with `k` completed.
fn repair_heuristic(model: &DecodingModel, f: &[f64], cost: &[f64]) -> Option<Assignment> {
    let bits = repair(model, f, cost)?;
    let k = model.complete_k(&bits)?;
    Some(Assignment { f: bits.iter().map(|&b| b as f64).collect(), k: k.iter().map(|&k| k as f64).collect() })
}

fn complete_warm_start(model: &DecodingModel, ws: &WarmStart) -> Option<Assignment> {
    let bits: Vec<u8> = (0..model.n_f())
        .map(|i| match model.f_vars[i].role {
            VarRole::Fixed(v) => v,
            _ => ws.f.get(i).copied().flatten().unwrap_or_else(|| model.received_value(i)),
        })
        .collect();
    let k = model.complete_k(&bits)?;
    Some(Assignment { f: bits.iter().map(|&b| b as f64).collect(), k: k.iter().map(|&k| k as f64).collect() })
}
