//! Conic program container and solver adapters.
//!
//! A [`ConicProgram`] holds linear rows, variable bounds, rotated second-order
//! cones and a separable convex quadratic objective. [`solve`] hands it to one
//! of the compiled backends; both report duals with the same sign convention.

mod cbf;
mod clarabel_backend;
mod dense_ipm;
mod program;
mod solution;

pub use cbf::{to_cbf_string, write_cbf};
pub use program::{ConicProgram, LinExpr, Objective, ProgramError, ProgramSize, RotatedCone, Row, VarId, Variable};
pub use solution::{
    check_solution, BackendKind, CheckError, ResidualReport, Solution, SolveStatus, SolverOptions,
};

/// Validates `program` and solves it with the backend chosen in `opts`.
pub fn solve(program: &ConicProgram, opts: &SolverOptions) -> Result<Solution, ProgramError> {
    program.validate()?;
    let sol = match opts.backend {
        BackendKind::Clarabel => clarabel_backend::solve(program, opts),
        BackendKind::DenseIpm => dense_ipm::solve(program, opts),
    };
    log::trace!(
        "{} solve: {:?} after {} iterations, objective {}",
        sol.backend.name(),
        sol.status,
        sol.iterations,
        sol.objective_value
    );
    Ok(sol)
}

#[cfg(test)]
mod tests;
