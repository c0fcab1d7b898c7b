//! LP relaxation and branch and bound for decoding models.

mod bnb;
mod cuts;
mod repair;
mod simplex;

pub use bnb::{gap_pct, solve_bnb, solve_bnb_with, Assignment, SolveBudget, SolveOutcome, SolveStatus, WarmStart, INT_TOL};

use crate::error::Result;
use crate::ipmodel::DecodingModel;
use simplex::{LpData, LpStatus, Simplex};

/// Solution of the continuous relaxation.
#[derive(Clone, Debug)]
pub struct LpSolution {
    /// `None` when the relaxation is infeasible.
    pub objective: Option<f64>,
    pub values: Assignment,
}

/// Solves the model with every integrality requirement dropped.
pub fn solve_lp(model: &DecodingModel) -> Result<LpSolution> {
    let roles: Vec<_> = model.f_vars.iter().map(|v| v.role).collect();
    let lp = LpData::from_model(model, &roles);
    let n_f = lp.n_f;
    let mut s = Simplex::new(lp);
    let status = s.solve()?;
    let x = s.values();
    Ok(LpSolution {
        objective: (status == LpStatus::Optimal).then(|| s.objective()),
        values: Assignment { f: x[..n_f].to_vec(), k: x[n_f..].to_vec() },
    })
}
