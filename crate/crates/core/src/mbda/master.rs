use serde::{Deserialize, Serialize};

use crate::conic::{solve, ConicProgram, LinExpr, SolverOptions};
use crate::grid::GridCase;

use super::MbdaError;

/// `θ_block ≥ value + slope·(p − anchor)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub iteration: usize,
    pub block: usize,
    pub anchor: Vec<f64>,
    pub value: f64,
    pub slope: Vec<f64>,
}

impl Cut {
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.value
            + self
                .slope
                .iter()
                .zip(p.iter().zip(&self.anchor))
                .map(|(s, (x, a))| s * (x - a))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub dispatch: Vec<f64>,
    pub theta: Vec<f64>,
    /// Lower bound on the two-stage optimum.
    pub objective: f64,
}

/// Minimizes dispatch cost plus the cut model of every block's recourse.
///
/// Recourse costs are non-negative, so `θ ≥ 0` bounds the master before
/// any cut exists.
pub fn solve_master(case: &GridCase, blocks: usize, cuts: &[Cut], opts: &SolverOptions, iteration: usize) -> Result<MasterSolution, MbdaError> {
    let mut prog = ConicProgram::new();
    let p: Vec<_> = case
        .generators
        .iter()
        .map(|g| {
            let v = prog.add_var(format!("pg:{}", g.id), g.p_min, g.p_max);
            prog.add_constant_cost(g.cost_c0);
            prog.add_linear_cost(v, g.cost_c1);
            prog.add_quadratic_cost(v, g.cost_c2);
            v
        })
        .collect();
    let theta: Vec<_> = (0..blocks)
        .map(|n| {
            let v = prog.add_var(format!("theta:{n}"), 0.0, f64::INFINITY);
            prog.add_linear_cost(v, 1.0);
            v
        })
        .collect();
    for (k, cut) in cuts.iter().enumerate() {
        // slope·p − θ ≤ slope·anchor − value
        let mut expr = LinExpr::scaled(theta[cut.block], -1.0);
        for (&v, &s) in p.iter().zip(&cut.slope) {
            expr.add(v, s);
        }
        let rhs = cut.slope.iter().zip(&cut.anchor).map(|(s, a)| s * a).sum::<f64>() - cut.value;
        prog.add_le(format!("cut:{k}"), expr, rhs);
    }
    let sol = solve(&prog, opts)?;
    if !sol.is_optimal() {
        return Err(MbdaError::Master(sol.status, iteration));
    }
    Ok(MasterSolution {
        dispatch: p.iter().map(|&v| sol.value(v)).collect(),
        theta: theta.iter().map(|&v| sol.value(v)).collect(),
        objective: sol.objective_value,
    })
}
