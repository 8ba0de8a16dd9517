use serde::{Deserialize, Serialize};

use super::program::{ConicProgram, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

/// Which conic backend runs a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BackendKind {
    /// Sparse homogeneous interior point method (clarabel).
    #[default]
    Clarabel,
    /// Dense primal-dual path-following method; small programs only.
    DenseIpm,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Clarabel => "clarabel",
            BackendKind::DenseIpm => "dense-ipm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clarabel" => Some(BackendKind::Clarabel),
            "dense" | "dense-ipm" => Some(BackendKind::DenseIpm),
            _ => None,
        }
    }

    /// Reads `WINDFLOW_SOLVER`, falling back to the default backend.
    pub fn from_env() -> Self {
        std::env::var("WINDFLOW_SOLVER")
            .ok()
            .and_then(|s| Self::parse(&s))
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Primal/dual feasibility tolerance.
    pub feas_tol: f64,
    /// Relative and absolute duality-gap tolerance.
    pub gap_tol: f64,
    pub max_iter: u32,
    pub backend: BackendKind,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: 1e-8,
            gap_tol: 1e-8,
            max_iter: 200,
            backend: BackendKind::Clarabel,
            verbose: false,
        }
    }
}

/// Outcome of a conic solve.
///
/// Dual convention: for an equality row `a·x = b` the reported dual is the
/// rate of change of the optimal objective per unit increase of `b`.
/// Inequality duals `a·x ≤ b` follow the same rule and are therefore ≤ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub eq_duals: Vec<f64>,
    pub ineq_duals: Vec<f64>,
    pub objective_value: f64,
    pub iterations: u32,
    pub backend: BackendKind,
    /// Dual ray for infeasible programs, primal ray for unbounded ones.
    pub certificate: Option<Vec<f64>>,
}

impl Solution {
    pub fn failed(status: SolveStatus, backend: BackendKind, iterations: u32) -> Self {
        Solution {
            status,
            primal: Vec::new(),
            eq_duals: Vec::new(),
            ineq_duals: Vec::new(),
            objective_value: f64::NAN,
            iterations,
            backend,
            certificate: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.primal[v.0]
    }

    pub fn value_of(&self, program: &ConicProgram, name: &str) -> Option<f64> {
        program.var_id(name).and_then(|v| self.primal.get(v.0).copied())
    }

    pub fn eq_dual_of(&self, program: &ConicProgram, name: &str) -> Option<f64> {
        program.eq_index(name).and_then(|i| self.eq_duals.get(i).copied())
    }

    /// Variable name to value.
    pub fn primal_map(&self, program: &ConicProgram) -> std::collections::BTreeMap<String, f64> {
        program
            .variables
            .iter()
            .zip(&self.primal)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("solution has {given} values for {expected} variables")]
    MissingValues { given: usize, expected: usize },
}

/// Largest violation per constraint class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub eq: f64,
    pub ineq: f64,
    pub cone: f64,
    pub bounds: f64,
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.eq.max(self.ineq).max(self.cone).max(self.bounds)
    }

    pub fn within_tolerance(&self) -> bool {
        self.max() <= self.tolerance
    }
}

/// Evaluates every row, bound and cone at `values`.
pub fn check_solution(program: &ConicProgram, values: &[f64], tol: f64) -> Result<ResidualReport, CheckError> {
    let n = program.num_vars();
    if values.len() < n {
        return Err(CheckError::MissingValues {
            given: values.len(),
            expected: n,
        });
    }
    let eq = program
        .eq_constraints
        .iter()
        .map(|r| (r.activity(values) - r.rhs).abs())
        .fold(0.0, f64::max);
    let ineq = program
        .ineq_constraints
        .iter()
        .map(|r| (r.activity(values) - r.rhs).max(0.0))
        .fold(0.0, f64::max);
    let cone = program
        .rsoc_cones
        .iter()
        .map(|c| c.violation(values))
        .fold(0.0, f64::max);
    let bounds = program
        .variables
        .iter()
        .zip(values)
        .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
        .fold(0.0, f64::max);
    Ok(ResidualReport {
        eq,
        ineq,
        cone,
        bounds,
        tolerance: tol,
    })
}
