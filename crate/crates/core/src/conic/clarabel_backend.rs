//! Adapter onto clarabel's `min ½xᵀPx + qᵀx  s.t.  Ax + s = b, s ∈ K`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::program::{ConicProgram, LinExpr};
use super::solution::{BackendKind, Solution, SolveStatus, SolverOptions};

/// Standard-form data shared by the sparse and dense backends.
///
/// Rows are ordered: zero cone (equalities, then fixed variables),
/// nonnegative cone (inequalities, lower bounds, upper bounds), then one
/// Lorentz cone per rotated cone.
pub(crate) struct StandardForm {
    pub n: usize,
    pub rows: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
    pub zero_rows: usize,
    pub nonneg_rows: usize,
    pub soc_dims: Vec<usize>,
    pub p_diag: Vec<f64>,
    pub q: Vec<f64>,
}

impl StandardForm {
    pub fn build(program: &ConicProgram) -> Self {
        let n = program.num_vars();
        let mut triplets = Vec::new();
        let mut b = Vec::new();
        let mut row = 0usize;

        for r in &program.eq_constraints {
            for &(v, c) in &r.terms {
                triplets.push((row, v.0, c));
            }
            b.push(r.rhs);
            row += 1;
        }
        for (j, v) in program.variables.iter().enumerate() {
            if v.lower == v.upper {
                triplets.push((row, j, 1.0));
                b.push(v.lower);
                row += 1;
            }
        }
        let zero_rows = row;

        for r in &program.ineq_constraints {
            for &(v, c) in &r.terms {
                triplets.push((row, v.0, c));
            }
            b.push(r.rhs);
            row += 1;
        }
        for (j, v) in program.variables.iter().enumerate() {
            if v.lower != v.upper && v.lower.is_finite() {
                triplets.push((row, j, -1.0));
                b.push(-v.lower);
                row += 1;
            }
        }
        for (j, v) in program.variables.iter().enumerate() {
            if v.lower != v.upper && v.upper.is_finite() {
                triplets.push((row, j, 1.0));
                b.push(v.upper);
                row += 1;
            }
        }
        let nonneg_rows = row - zero_rows;

        // s = b - A x must equal the affine member, so A = -coef and b = constant.
        let mut soc_dims = Vec::with_capacity(program.rsoc_cones.len());
        let push_member = |expr: &LinExpr, scale: f64, row: &mut usize, triplets: &mut Vec<(usize, usize, f64)>, b: &mut Vec<f64>| {
            for &(v, c) in &expr.terms {
                triplets.push((*row, v.0, -c * scale));
            }
            b.push(expr.constant * scale);
            *row += 1;
        };
        let sqrt2 = std::f64::consts::SQRT_2;
        for cone in &program.rsoc_cones {
            let mut sum = cone.u.clone();
            sum.add_expr(&cone.w, 1.0);
            let mut diff = cone.u.clone();
            diff.add_expr(&cone.w, -1.0);
            push_member(&sum, 1.0, &mut row, &mut triplets, &mut b);
            push_member(&diff, 1.0, &mut row, &mut triplets, &mut b);
            for z in &cone.z {
                push_member(z, sqrt2, &mut row, &mut triplets, &mut b);
            }
            soc_dims.push(2 + cone.z.len());
        }

        StandardForm {
            n,
            rows: row,
            triplets,
            b,
            zero_rows,
            nonneg_rows,
            soc_dims,
            p_diag: program.objective.quadratic.iter().map(|d| 2.0 * d).collect(),
            q: program.objective.linear.clone(),
        }
    }
}

pub(crate) fn solve(program: &ConicProgram, opts: &SolverOptions) -> Solution {
    let sf = StandardForm::build(program);
    let n = sf.n;

    let (pi, pj, pv): (Vec<usize>, Vec<usize>, Vec<f64>) = sf
        .p_diag
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0.0)
        .map(|(j, &d)| (j, j, d))
        .fold((vec![], vec![], vec![]), |mut acc, (i, j, v)| {
            acc.0.push(i);
            acc.1.push(j);
            acc.2.push(v);
            acc
        });
    let p = CscMatrix::new_from_triplets(n, n, pi, pj, pv);
    let (ai, aj, av) = sf.triplets.iter().fold(
        (Vec::with_capacity(sf.triplets.len()), Vec::with_capacity(sf.triplets.len()), Vec::with_capacity(sf.triplets.len())),
        |mut acc, &(i, j, v)| {
            acc.0.push(i);
            acc.1.push(j);
            acc.2.push(v);
            acc
        },
    );
    let a = CscMatrix::new_from_triplets(sf.rows, n, ai, aj, av);

    let mut cones = Vec::new();
    if sf.zero_rows > 0 {
        cones.push(SupportedConeT::ZeroConeT(sf.zero_rows));
    }
    if sf.nonneg_rows > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(sf.nonneg_rows));
    }
    for &d in &sf.soc_dims {
        cones.push(SupportedConeT::SecondOrderConeT(d));
    }

    let run = |regularization: f64| {
        let settings = DefaultSettingsBuilder::default()
            .verbose(opts.verbose)
            .max_iter(opts.max_iter)
            .tol_feas(opts.feas_tol)
            .tol_gap_abs(opts.gap_tol)
            .tol_gap_rel(opts.gap_tol)
            .static_regularization_constant(regularization)
            .build()
            .expect("solver settings are statically valid");
        let mut solver = DefaultSolver::new(&p, &sf.q, &a, &sf.b, &cones, settings).ok()?;
        solver.solve();
        Some(solver)
    };
    // The default regularization of 1e-8 perturbs programs whose penalty
    // prices dwarf the generator costs enough to stall at reduced accuracy,
    // but rank-deficient programs need it to factor at all.
    let usable = |s: &DefaultSolver| !matches!(s.solution.status, SolverStatus::NumericalError | SolverStatus::InsufficientProgress);
    let solver = match run(1e-11).filter(|s| usable(s)).or_else(|| run(1e-8)) {
        Some(s) => s,
        None => {
            log::error!("clarabel rejected the program");
            return Solution::failed(SolveStatus::NumericalFailure, BackendKind::Clarabel, 0);
        }
    };
    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
        _ => SolveStatus::NumericalFailure,
    };
    if sol.status == SolverStatus::AlmostSolved {
        log::warn!("clarabel returned a reduced-accuracy solution");
    }
    match status {
        SolveStatus::Optimal => {
            let primal = sol.x.clone();
            let m_eq = program.eq_constraints.len();
            let m_in = program.ineq_constraints.len();
            let eq_duals = sol.z[..m_eq].iter().map(|z| -z).collect();
            let ineq_duals = sol.z[sf.zero_rows..sf.zero_rows + m_in].iter().map(|z| -z).collect();
            Solution {
                status,
                objective_value: program.objective_value(&primal),
                primal,
                eq_duals,
                ineq_duals,
                iterations: sol.iterations,
                backend: BackendKind::Clarabel,
                certificate: None,
            }
        }
        SolveStatus::Infeasible => Solution {
            certificate: Some(sol.z.clone()),
            ..Solution::failed(status, BackendKind::Clarabel, sol.iterations)
        },
        SolveStatus::Unbounded => Solution {
            certificate: Some(sol.x.clone()),
            ..Solution::failed(status, BackendKind::Clarabel, sol.iterations)
        },
        SolveStatus::NumericalFailure => Solution::failed(status, BackendKind::Clarabel, sol.iterations),
    }
}
