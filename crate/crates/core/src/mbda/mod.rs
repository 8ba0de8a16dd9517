//! Scenario-partitioned Benders decomposition.
//!
//! Scenarios are split into contiguous blocks, each solved as one
//! subproblem at the master's dispatch. Load shedding keeps every
//! subproblem feasible, so only optimality cuts are needed; each block adds
//! one cut per iteration.

mod master;
mod partition;
mod run;
mod subproblem;

pub use master::{solve_master, Cut, MasterSolution};
pub use partition::partition_scenarios;
pub use run::{run_mbda, write_trace_csv, MbdaOptions, MbdaResult, TraceRow};
pub use subproblem::{Subproblem, SubproblemResult};

use crate::acopf::RecoverError;
use crate::conic::{ProgramError, SolveStatus};
use crate::stochastic::StochasticError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MbdaError {
    #[error(transparent)]
    Model(#[from] StochasticError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Recover(#[from] RecoverError),
    #[error("master problem returned {0:?} at iteration {1}")]
    Master(SolveStatus, usize),
    #[error("subproblem {block} returned {status:?} at iteration {iteration}")]
    Subproblem {
        block: usize,
        iteration: usize,
        status: SolveStatus,
    },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("no scenarios to decompose")]
    NoScenarios,
}
