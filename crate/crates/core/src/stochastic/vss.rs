use serde::{Deserialize, Serialize};

use crate::conic::SolverOptions;
use crate::grid::GridCase;
use crate::wind::ScenarioSet;

use super::{build_two_stage, build_two_stage_fixed, solve_single_stage, StochasticError};

/// Value of the stochastic solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VssReport {
    /// Expected cost of the dispatch chosen against the mean scenario.
    pub deterministic_cost: f64,
    /// Expected cost of the stochastic dispatch.
    pub stochastic_cost: f64,
    pub vss: f64,
    pub deterministic_dispatch: Vec<f64>,
    pub stochastic_dispatch: Vec<f64>,
    pub expected_shed_deterministic: f64,
    pub expected_shed_stochastic: f64,
}

/// Solves the mean-value problem, evaluates its dispatch against every
/// scenario with shedding allowed, and compares with the stochastic optimum.
pub fn compute_vss(case: &GridCase, scenarios: &ScenarioSet, opts: &SolverOptions) -> Result<VssReport, StochasticError> {
    let mean = build_two_stage(case, &scenarios.expected_value())?;
    let mean_sol = solve_single_stage(&mean, opts).map_err(|e| relabel(e, "mean-value"))?;
    let fixed = build_two_stage_fixed(case, scenarios, &mean_sol.dispatch())?;
    let det = solve_single_stage(&fixed, opts).map_err(|e| relabel(e, "fixed-dispatch"))?;
    let sto = solve_single_stage(&build_two_stage(case, scenarios)?, opts)?;
    let shed = |s: &super::StochasticSolution| s.scenarios.iter().map(|x| x.pi * x.shed).sum();
    Ok(VssReport {
        deterministic_cost: det.objective,
        stochastic_cost: sto.objective,
        vss: det.objective - sto.objective,
        deterministic_dispatch: det.dispatch(),
        stochastic_dispatch: sto.dispatch(),
        expected_shed_deterministic: shed(&det),
        expected_shed_stochastic: shed(&sto),
    })
}

fn relabel(e: StochasticError, stage: &'static str) -> StochasticError {
    match e {
        StochasticError::SolverFailed { status, scenarios, size, .. } => StochasticError::SolverFailed {
            stage,
            status,
            scenarios,
            size,
        },
        other => other,
    }
}
