use std::ops::Range;

use crate::acopf::{add_soc_block, name, recover_scenario, BlockConfig, OperatingPoint, RecoverError};
use crate::conic::{solve, ConicProgram, LinExpr, Solution, SolverOptions, VarId};
use crate::grid::GridCase;
use crate::acopf::FarmLimits;

use super::MbdaError;

/// Recourse problem of one scenario at a fixed dispatch.
///
/// The scenario has its own copy `pg:<j>:<gen>` of the dispatch, pinned by
/// an anchor row `anchor:<j>:<gen>` whose right-hand side is the dispatch.
#[derive(Debug, Clone)]
struct ScenarioProgram {
    j: usize,
    pi: f64,
    program: ConicProgram,
    anchors: Vec<usize>,
    shed: Vec<VarId>,
}

/// Recourse problem of one block of scenarios.
///
/// Scenarios inside a block share nothing but the dispatch, so each is
/// solved on its own; the block value and gradient are their sums.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub block: usize,
    pub scenarios: Range<usize>,
    parts: Vec<ScenarioProgram>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub block: usize,
    /// Probability-weighted recourse cost of the block.
    pub value: f64,
    /// Gradient of `value` with respect to the dispatch.
    pub mu: Vec<f64>,
    /// Probability-weighted shed load, pu.
    pub shed: f64,
    /// One per scenario of the block, in order.
    pub solutions: Vec<Solution>,
}

impl Subproblem {
    /// `pis` and `limits` are indexed by global scenario number.
    pub fn new(case: &GridCase, pis: &[f64], limits: &[Vec<FarmLimits>], block: usize, scenarios: Range<usize>) -> Self {
        let idx = case.index();
        let parts = scenarios
            .clone()
            .map(|j| {
                let pi = pis[j];
                let mut program = ConicProgram::new();
                let pg: Vec<_> = case
                    .generators
                    .iter()
                    .map(|g| program.free_var(name("pg", j, &g.id)))
                    .collect();
                let vars = add_soc_block(
                    &mut program,
                    case,
                    &idx,
                    &pg,
                    &BlockConfig {
                        scenario: j,
                        weight: pi,
                        wind: &limits[j],
                        voll: Some(case.voll),
                    },
                );
                let anchors = case
                    .generators
                    .iter()
                    .zip(&pg)
                    .map(|(g, &v)| program.add_eq(name("anchor", j, &g.id), LinExpr::var(v), 0.0))
                    .collect();
                ScenarioProgram {
                    j,
                    pi,
                    program,
                    anchors,
                    shed: vars.shed.into_iter().flatten().collect(),
                }
            })
            .collect();
        Subproblem { block, scenarios, parts }
    }

    /// Solves the block at `dispatch` (pu, case generator order).
    pub fn solve_at(&mut self, dispatch: &[f64], opts: &SolverOptions, iteration: usize) -> Result<SubproblemResult, MbdaError> {
        let mut value = 0.0;
        let mut shed = 0.0;
        let mut mu = vec![0.0; dispatch.len()];
        let mut solutions = Vec::with_capacity(self.parts.len());
        for part in &mut self.parts {
            for (&r, &p) in part.anchors.iter().zip(dispatch) {
                part.program.eq_constraints[r].rhs = p;
            }
            let sol = solve(&part.program, opts)?;
            if !sol.is_optimal() {
                return Err(MbdaError::Subproblem {
                    block: self.block,
                    iteration,
                    status: sol.status,
                });
            }
            value += sol.objective_value;
            for (m, &r) in mu.iter_mut().zip(&part.anchors) {
                *m += sol.eq_duals[r];
            }
            shed += part.pi * part.shed.iter().map(|&v| sol.value(v)).sum::<f64>();
            solutions.push(sol);
        }
        Ok(SubproblemResult {
            block: self.block,
            value,
            mu,
            shed,
            solutions,
        })
    }

    /// Operating points of the block's scenarios from a previous result.
    pub fn recover(&self, case: &GridCase, result: &SubproblemResult) -> Result<Vec<OperatingPoint>, RecoverError> {
        self.parts
            .iter()
            .zip(&result.solutions)
            .map(|(part, sol)| recover_scenario(case, &part.program, sol, part.j))
            .collect()
    }
}
