//! Bounded-variable revised simplex (dual first, primal as a fallback) for
//! the parity LP.
//!
//! Columns are the model's `f` variables (coefficient `+1` in each of their
//! rows) followed by one `k` variable per row (coefficient `−2` in its own
//! row only). The `k` columns form the starting basis, `B = −2·I`, so no
//! artificial variables are needed. Primal infeasibility after bound
//! changes is removed by a composite phase one that minimises the total
//! bound violation of the basic variables.
//!
//! The basis inverse is kept dense and updated in product form; it is
//! rebuilt by Gauss–Jordan elimination every [`REFACTOR_EVERY`] pivots.

use crate::error::{Error, Result};
use crate::ipmodel::{DecodingModel, VarRole};

/// Reduced-cost tolerance.
pub const COST_TOL: f64 = 1e-7;
/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 400;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 30;

#[derive(Clone, Debug)]
pub(crate) struct LpData {
    pub n_f: usize,
    /// Model rows; cut rows follow them.
    pub m0: usize,
    /// All rows, cuts included.
    pub m: usize,
    /// Model rows of each `f` column.
    pub f_rows: Vec<Vec<usize>>,
    /// Cut-row entries of each `f` column.
    pub f_cuts: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective_constant: f64,
}

impl LpData {
    pub fn from_model(model: &DecodingModel, roles: &[VarRole]) -> Self {
        let n_f = model.n_f();
        let m = model.n_rows();
        let mut f_rows = vec![Vec::new(); n_f];
        for (j, row) in model.rows.iter().enumerate() {
            for &v in row {
                f_rows[v].push(j);
            }
        }
        let mut cost: Vec<f64> = model.f_vars.iter().map(|v| v.cost as f64).collect();
        cost.resize(n_f + m, 0.0);
        let mut lower = Vec::with_capacity(n_f + m);
        let mut upper = Vec::with_capacity(n_f + m);
        for role in roles {
            let (lo, hi) = match *role {
                VarRole::Fixed(x) => (x as f64, x as f64),
                _ => (0.0, 1.0),
            };
            lower.push(lo);
            upper.push(hi);
        }
        for k in &model.k_vars {
            lower.push(0.0);
            upper.push(k.upper as f64);
        }
        LpData {
            n_f,
            m0: m,
            m,
            f_rows,
            f_cuts: vec![Vec::new(); n_f],
            rhs: model.row_constants.iter().map(|&c| -c as f64).collect(),
            cost,
            lower,
            upper,
            objective_constant: model.objective_constant as f64,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_f + self.m
    }

    /// `f` and `k` variables; cut slacks come after them.
    pub fn n_structural(&self) -> usize {
        self.n_f + self.m0
    }

    /// Appends `Σ a_j f_j ≤ rhs` as a new row with a slack column.
    fn push_cut(&mut self, coefs: &[(usize, f64)], rhs: f64) {
        let row = self.m;
        for &(j, a) in coefs {
            self.f_cuts[j].push((row, a));
        }
        let slack_hi = rhs - coefs.iter().map(|&(_, a)| a.min(0.0)).sum::<f64>();
        self.rhs.push(rhs);
        self.cost.push(0.0);
        self.lower.push(0.0);
        self.upper.push(slack_hi.max(0.0));
        self.m += 1;
    }

    /// Sparse column `(row, coefficient)` of variable `j`.
    fn column(&self, j: usize) -> ColumnIter<'_> {
        if j < self.n_f {
            ColumnIter::F(self.f_rows[j].iter(), self.f_cuts[j].iter())
        } else if j < self.n_f + self.m0 {
            ColumnIter::Unit(Some((j - self.n_f, -2.0)))
        } else {
            ColumnIter::Unit(Some((j - self.n_f, 1.0)))
        }
    }
}

enum ColumnIter<'a> {
    F(std::slice::Iter<'a, usize>, std::slice::Iter<'a, (usize, f64)>),
    Unit(Option<(usize, f64)>),
}

impl Iterator for ColumnIter<'_> {
    type Item = (usize, f64);
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColumnIter::F(rows, cuts) => rows.next().map(|&r| (r, 1.0)).or_else(|| cuts.next().copied()),
            ColumnIter::Unit(e) => e.take(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
}

const NOT_BASIC: usize = usize::MAX;

/// Simplex state that survives bound changes, so successive solves in a
/// branch-and-bound warm start from the previous basis.
#[derive(Clone, Debug)]
pub(crate) struct Simplex {
    lp: LpData,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    position: Vec<usize>,
    at_upper: Vec<bool>,
    binv: Vec<f64>,
    since_refactor: usize,
    pub pivots: usize,
    /// Solves the dual phase handed to the primal fallback.
    pub fallbacks: usize,
}

impl Simplex {
    pub fn new(lp: LpData) -> Self {
        let (n_f, m) = (lp.n_f, lp.m);
        let n = lp.n_vars();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = -0.5;
        }
        let mut position = vec![NOT_BASIC; n];
        for i in 0..m {
            position[n_f + i] = i;
        }
        // start each f at the bound its cost prefers
        let at_upper = (0..n).map(|j| j < n_f && lp.cost[j] < 0.0).collect();
        let (lower, upper) = (lp.lower.clone(), lp.upper.clone());
        let mut s = Simplex {
            lp,
            lower,
            upper,
            x: vec![0.0; n],
            basis: (n_f..n).collect(),
            position,
            at_upper,
            binv,
            since_refactor: 0,
            pivots: 0,
            fallbacks: 0,
        };
        s.recompute_primal();
        s
    }

    pub fn lp(&self) -> &LpData {
        &self.lp
    }

    /// Sets bounds of the structural variables; cut slacks keep theirs.
    pub fn set_bounds(&mut self, lower: &[f64], upper: &[f64]) {
        let n = lower.len();
        self.lower[..n].copy_from_slice(lower);
        self.upper[..n].copy_from_slice(upper);
        self.recompute_primal();
    }

    /// Adds the row `Σ a_j f_j ≤ rhs`; its slack enters the basis.
    pub fn add_cut(&mut self, coefs: &[(usize, f64)], rhs: f64) {
        let m = self.lp.m;
        let slack = self.lp.n_vars();
        self.lp.push_cut(coefs, rhs);
        let m1 = m + 1;
        let mut binv = vec![0.0; m1 * m1];
        for i in 0..m {
            binv[i * m1..i * m1 + m].copy_from_slice(&self.binv[i * m..(i + 1) * m]);
        }
        // last row of the new inverse: −a_B·B⁻¹, then 1
        for &(j, a) in coefs {
            let i = self.position[j];
            if i != NOT_BASIC {
                for k in 0..m {
                    binv[m * m1 + k] -= a * self.binv[i * m + k];
                }
            }
        }
        binv[m * m1 + m] = 1.0;
        self.binv = binv;
        self.basis.push(slack);
        self.position.push(m);
        self.at_upper.push(false);
        self.x.push(0.0);
        self.lower.push(self.lp.lower[slack]);
        self.upper.push(self.lp.upper[slack]);
        self.recompute_primal();
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn objective(&self) -> f64 {
        self.lp.objective_constant + self.x.iter().zip(&self.lp.cost).map(|(x, c)| x * c).sum::<f64>()
    }

    fn is_basic(&self, j: usize) -> bool {
        self.position[j] != NOT_BASIC
    }

    /// Puts nonbasic variables on their bounds and solves for the basics.
    fn recompute_primal(&mut self) {
        let m = self.lp.m;
        let mut resid = self.lp.rhs.clone();
        for j in 0..self.lp.n_vars() {
            if self.is_basic(j) {
                continue;
            }
            let v = if self.at_upper[j] { self.upper[j] } else { self.lower[j] };
            self.x[j] = v;
            if v != 0.0 {
                for (r, a) in self.lp.column(j) {
                    resid[r] -= a * v;
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&resid).map(|(b, r)| b * r).sum();
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.lp.m;
        let mut dense = vec![0.0; m * m];
        for (i, &j) in self.basis.iter().enumerate() {
            for (r, a) in self.lp.column(j) {
                dense[r * m + i] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&a, &b| dense[a * m + col].abs().total_cmp(&dense[b * m + col].abs()))
                .expect("non-empty range");
            if dense[piv * m + col].abs() < 1e-12 {
                return Err(Error::NumericalFailure("singular basis during refactorization".into()));
            }
            if piv != col {
                for k in 0..m {
                    dense.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let p = dense[col * m + col];
            for k in 0..m {
                dense[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                let f = dense[r * m + col];
                if r != col && f != 0.0 {
                    for k in 0..m {
                        dense[r * m + k] -= f * dense[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        // `inv` is (B)^-1 with rows indexed by basis position
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_primal();
        Ok(())
    }

    fn violation(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lower[j] - FEAS_TOL {
            -1.0
        } else if x > self.upper[j] + FEAS_TOL {
            1.0
        } else {
            0.0
        }
    }

    /// Basis position `r` leaves for its bound, `q` enters; `alpha` is the
    /// entering column in the current basis.
    fn exchange(&mut self, r: usize, q: usize, to_upper: bool, alpha: &[f64]) -> Result<()> {
        let m = self.lp.m;
        let out = self.basis[r];
        self.at_upper[out] = to_upper;
        self.position[out] = NOT_BASIC;
        self.basis[r] = q;
        self.position[q] = r;
        let p = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= p;
        }
        for i in 0..m {
            if i != r && alpha[i] != 0.0 {
                let f = alpha[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Reduced costs of every variable under the true costs.
    fn reduced_costs(&self, d: &mut [f64]) {
        let m = self.lp.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let c = self.lp.cost[self.basis[i]];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                y.iter_mut().zip(row).for_each(|(y, b)| *y += c * b);
            }
        }
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = if self.is_basic(j) { 0.0 } else { self.lp.cost[j] - self.lp.column(j).map(|(r, a)| a * y[r]).sum::<f64>() };
        }
    }

    /// Dual simplex. Every variable is boxed, so moving each nonbasic
    /// variable to the bound its reduced cost prefers makes any basis dual
    /// feasible; bound changes and new cuts then only break primal
    /// feasibility, which this phase repairs in a few pivots. `None` when it
    /// gives up and the primal method should finish.
    fn solve_dual(&mut self) -> Result<Option<LpStatus>> {
        let (m, n) = (self.lp.m, self.lp.n_vars());
        let mut d = vec![0.0; n];
        self.reduced_costs(&mut d);
        let mut moved = false;
        for j in 0..n {
            if self.is_basic(j) || self.lower[j] == self.upper[j] {
                continue;
            }
            let want_upper = if d[j] < -COST_TOL {
                true
            } else if d[j] > COST_TOL {
                false
            } else {
                self.at_upper[j]
            };
            if want_upper != self.at_upper[j] {
                self.at_upper[j] = want_upper;
                moved = true;
            }
        }
        if moved {
            self.recompute_primal();
        }
        let mut rho_a = vec![0.0; n];
        let mut alpha = vec![0.0; m];
        for _ in 0..4 * (m + n) {
            // leaving row: largest bound violation
            let mut leave = None;
            let mut worst = FEAS_TOL;
            for i in 0..m {
                let j = self.basis[i];
                let v = (self.lower[j] - self.x[j]).max(self.x[j] - self.upper[j]);
                if v > worst {
                    worst = v;
                    leave = Some(i);
                }
            }
            let Some(r) = leave else { return Ok(Some(LpStatus::Optimal)) };
            let out = self.basis[r];
            let below = self.x[out] < self.lower[out];
            let rho = &self.binv[r * m..(r + 1) * m];
            let mut enter = None;
            let mut best = f64::INFINITY;
            let mut best_a = 0.0;
            for j in 0..n {
                if self.is_basic(j) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a: f64 = self.lp.column(j).map(|(row, v)| v * rho[row]).sum();
                rho_a[j] = a;
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_out = … − a·x_j: raising x_out needs x_j to move against a
                let helps = if below { (a < 0.0) != self.at_upper[j] } else { (a > 0.0) != self.at_upper[j] };
                if !helps {
                    continue;
                }
                let ratio = d[j].abs() / a.abs();
                if ratio < best - 1e-12 || (ratio <= best + 1e-12 && a.abs() > best_a) {
                    best = ratio;
                    best_a = a.abs();
                    enter = Some(j);
                }
            }
            let Some(q) = enter else { return Ok(Some(LpStatus::Infeasible)) };
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for (row, a) in self.lp.column(q) {
                for i in 0..m {
                    alpha[i] += self.binv[i * m + row] * a;
                }
            }
            if (alpha[r] - rho_a[q]).abs() > 1e-6 * (1.0 + alpha[r].abs()) {
                self.refactor()?;
                self.reduced_costs(&mut d);
                continue;
            }
            let theta = d[q] / alpha[r];
            for j in 0..n {
                if !self.is_basic(j) && j != q {
                    d[j] -= theta * rho_a[j];
                }
            }
            let target = if below { self.lower[out] } else { self.upper[out] };
            let step = (self.x[out] - target) / alpha[r];
            for i in 0..m {
                if alpha[i] != 0.0 {
                    self.x[self.basis[i]] -= alpha[i] * step;
                }
            }
            self.x[q] += step;
            self.x[out] = target;
            self.exchange(r, q, !below, &alpha)?;
            d[q] = 0.0;
            d[out] = -theta;
        }
        Ok(None)
    }

    pub fn solve(&mut self) -> Result<LpStatus> {
        if let Some(status) = self.solve_dual()? {
            return Ok(status);
        }
        self.fallbacks += 1;
        self.solve_primal()
    }

    fn solve_primal(&mut self) -> Result<LpStatus> {
        let (m, n) = (self.lp.m, self.lp.n_vars());
        let max_iter = 50 * (m + n) + 1000;
        let mut degenerate = 0usize;
        let mut cb = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        for _ in 0..max_iter {
            // phase costs on the basics
            let mut infeasible = false;
            for i in 0..m {
                let v = self.violation(self.basis[i]);
                if v != 0.0 {
                    infeasible = true;
                }
                cb[i] = v;
            }
            if !infeasible {
                for i in 0..m {
                    cb[i] = self.lp.cost[self.basis[i]];
                }
            }
            y.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..m {
                if cb[i] != 0.0 {
                    let row = &self.binv[i * m..(i + 1) * m];
                    for r in 0..m {
                        y[r] += cb[i] * row[r];
                    }
                }
            }
            let bland = degenerate > DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..n {
                if self.is_basic(j) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let c = if infeasible { 0.0 } else { self.lp.cost[j] };
                let d = c - self.lp.column(j).map(|(r, a)| a * y[r]).sum::<f64>();
                let gain = if self.at_upper[j] { d } else { -d };
                if gain > COST_TOL {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if gain > best {
                        best = gain;
                        entering = Some(j);
                    }
                }
            }
            let Some(q) = entering else {
                return Ok(if infeasible { LpStatus::Infeasible } else { LpStatus::Optimal });
            };

            alpha.iter_mut().for_each(|v| *v = 0.0);
            for (r, a) in self.lp.column(q) {
                for i in 0..m {
                    alpha[i] += self.binv[i * m + r] * a;
                }
            }
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_alpha = 0.0;
            for i in 0..m {
                if alpha[i].abs() <= PIVOT_TOL {
                    continue;
                }
                let rate = -dir * alpha[i];
                let j = self.basis[i];
                let (x, lo, hi) = (self.x[j], self.lower[j], self.upper[j]);
                let limit = if rate < 0.0 {
                    if x > hi + FEAS_TOL {
                        Some(((x - hi) / -rate, true))
                    } else if x >= lo - FEAS_TOL {
                        Some(((x - lo).max(0.0) / -rate, false))
                    } else {
                        None
                    }
                } else if x < lo - FEAS_TOL {
                    Some(((lo - x) / rate, false))
                } else if x <= hi + FEAS_TOL {
                    Some(((hi - x).max(0.0) / rate, true))
                } else {
                    None
                };
                let Some((t, to_upper)) = limit else { continue };
                let better = match leave {
                    None => t <= theta,
                    Some((cur, _)) => {
                        if bland {
                            t < theta - 1e-12 || (t <= theta + 1e-12 && j < self.basis[cur])
                        } else {
                            t < theta - 1e-12 || (t <= theta + 1e-12 && alpha[i].abs() > leave_alpha)
                        }
                    }
                };
                if better {
                    theta = t;
                    leave = Some((i, to_upper));
                    leave_alpha = alpha[i].abs();
                }
            }
            if !theta.is_finite() {
                return Err(Error::NumericalFailure("unbounded ray in a bounded problem".into()));
            }
            if theta <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.x[q] += dir * theta;
            for i in 0..m {
                if alpha[i] != 0.0 {
                    self.x[self.basis[i]] -= dir * theta * alpha[i];
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.at_upper[q] = !self.at_upper[q];
                    self.x[q] = if self.at_upper[q] { self.upper[q] } else { self.lower[q] };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.upper[out] } else { self.lower[out] };
                    self.exchange(r, q, to_upper, &alpha)?;
                }
            }
        }
        Err(Error::NumericalFailure(format!("no convergence after {max_iter} iterations")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2codes::example_3_6_matrix;
    use crate::ipmodel::build_exact_model;

    #[test]
    fn root_relaxation_of_exact_model_is_zero() {
        let h = example_3_6_matrix();
        let y = vec![1, 0, 1, 0, 0, 0, 1, 0, 0, 0];
        let model = build_exact_model(&h, &y).unwrap();
        let roles: Vec<_> = model.f_vars.iter().map(|v| v.role).collect();
        let lp = LpData::from_model(&model, &roles);
        let mut s = Simplex::new(lp);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!(s.objective().abs() < 1e-9);
    }

    #[test]
    fn fixing_bits_forces_phase_one() {
        // rows: f0 + f1 = 2k0, f1 + f2 = 2k1; received 1 0 0; pin k0 ≥ 1 and f1 = 0
        let h = crate::gf2codes::SparseParityCheck::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let model = build_exact_model(&h, &[1, 0, 0]).unwrap();
        let roles: Vec<_> = model.f_vars.iter().map(|v| v.role).collect();
        let lp = LpData::from_model(&model, &roles);
        let mut s = Simplex::new(lp.clone());
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        lo[3] = 1.0;
        hi[1] = 0.0;
        s.set_bounds(&lo, &hi);
        // f0 + 0 = 2 k0 with k0 ≥ 1 and f0 ≤ 1 is infeasible
        assert_eq!(s.solve().unwrap(), LpStatus::Infeasible);
        hi[1] = 1.0;
        s.set_bounds(&lo, &hi);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        // f0 = f1 = 1 with k0 = 1; row 1 is absorbed by a fractional k1
        assert!((s.objective() - 1.0).abs() < 1e-9, "{}", s.objective());
    }

    #[test]
    fn cuts_tighten_a_solved_relaxation() {
        // f0 + f1 = 2k with received 1 0: the plain relaxation keeps f = (1, 0) at cost 0
        let h = crate::gf2codes::SparseParityCheck::from_dense(&[vec![1, 1]]).unwrap();
        let model = build_exact_model(&h, &[1, 0]).unwrap();
        let roles: Vec<_> = model.f_vars.iter().map(|v| v.role).collect();
        let mut s = Simplex::new(LpData::from_model(&model, &roles));
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!(s.objective().abs() < 1e-9);
        // f0 − f1 ≤ 0 cuts off the odd point
        s.add_cut(&[(0, 1.0), (1, -1.0)], 0.0);
        assert_eq!(s.lp().m, 2);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() - 1.0).abs() < 1e-9, "{}", s.objective());
        s.refactor().unwrap();
        assert!((s.objective() - 1.0).abs() < 1e-9);
    }
}
