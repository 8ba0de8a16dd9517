//! Two-stage stochastic SOC-ACOPF: thermal dispatch is fixed before the wind
//! is known, every scenario gets its own copy of the network.

mod model;
mod size;
mod solution;
mod vss;

pub use model::{build_two_stage, build_two_stage_fixed, build_two_stage_with, TwoStageModel};
pub use size::{model_size, model_size_of, ModelSize, SizeParameters};
pub use solution::{solve_single_stage, summarize, Bounds, DispatchEntry, Method, ScenarioSummary, StochasticSolution};
pub use vss::{compute_vss, VssReport};

use crate::acopf::{AcopfError, RecoverError};
use crate::conic::{ProgramError, ProgramSize, SolveStatus};
use crate::wind::WindError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StochasticError {
    #[error(transparent)]
    Case(#[from] AcopfError),
    #[error(transparent)]
    Scenarios(#[from] WindError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Recover(#[from] RecoverError),
    #[error("dispatch has {given} entries for {expected} generators")]
    DispatchMismatch { given: usize, expected: usize },
    #[error("{stage}: solver returned {status:?} on {scenarios} scenarios ({} variables, {} constraints)", size.variables, size.constraints())]
    SolverFailed {
        stage: &'static str,
        status: SolveStatus,
        scenarios: usize,
        size: ProgramSize,
    },
}

#[cfg(test)]
mod tests;
