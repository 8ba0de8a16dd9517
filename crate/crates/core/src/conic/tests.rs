use super::*;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn opts(backend: BackendKind) -> SolverOptions {
    SolverOptions {
        backend,
        ..SolverOptions::default()
    }
}

const BACKENDS: [BackendKind; 2] = [BackendKind::Clarabel, BackendKind::DenseIpm];

fn fixed_three() -> (ConicProgram, VarId) {
    let mut p = ConicProgram::new();
    let x = p.free_var("x");
    p.add_linear_cost(x, 1.0);
    p.add_eq("fix:0:x", LinExpr::var(x), 3.0);
    (p, x)
}

#[test]
fn equality_program_reports_unit_dual() {
    for b in BACKENDS {
        let (p, x) = fixed_three();
        let sol = solve(&p, &opts(b)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "{b:?}");
        assert_relative_eq!(sol.value(x), 3.0, epsilon = 1e-7);
        assert_relative_eq!(sol.objective_value, 3.0, epsilon = 1e-7);
        assert_relative_eq!(sol.eq_dual_of(&p, "fix:0:x").unwrap(), 1.0, epsilon = 1e-6);
    }
}

/// Minimizes `u + z²/(2u)` by grid search with refinement.
fn cone_oracle(z: f64) -> (f64, f64) {
    let f = |u: f64| u + z * z / (2.0 * u);
    let (mut lo, mut hi) = (1e-3, 10.0);
    let mut best = lo;
    for _ in 0..8 {
        let step = (hi - lo) / 1000.0;
        best = (0..=1000)
            .map(|k| lo + step * k as f64)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        lo = (best - 2.0 * step).max(1e-6);
        hi = best + 2.0 * step;
    }
    (best, f(best))
}

#[test]
fn rotated_cone_minimum_is_symmetric() {
    let (u_star, obj_star) = cone_oracle(2.0);
    for b in BACKENDS {
        let mut p = ConicProgram::new();
        let u = p.add_var("u", 0.0, f64::INFINITY);
        let w = p.add_var("w", 0.0, f64::INFINITY);
        let z = p.free_var("z");
        p.add_linear_cost(u, 1.0);
        p.add_linear_cost(w, 1.0);
        p.add_eq("fix:0:z", LinExpr::var(z), 2.0);
        p.add_rotated_cone("cone:0:uw", LinExpr::var(u), LinExpr::var(w), vec![LinExpr::var(z)]);
        let sol = solve(&p, &opts(b)).unwrap();
        assert!(sol.is_optimal());
        assert_relative_eq!(sol.objective_value, obj_star, epsilon = 1e-6);
        assert_relative_eq!(sol.value(u), u_star, epsilon = 1e-5);
        assert_relative_eq!(sol.value(w), sol.value(u), epsilon = 1e-5);
        assert_relative_eq!(2.0 * sol.value(u) * sol.value(w), 4.0, epsilon = 1e-5);
    }
}

#[test]
fn contradictory_equalities_are_infeasible() {
    let (mut p, x) = fixed_three();
    p.add_eq("fix:1:x", LinExpr::var(x), 4.0);
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    assert!(sol.certificate.is_some());
}

#[test]
fn unbounded_program_is_reported() {
    let mut p = ConicProgram::new();
    let x = p.add_var("x", f64::NEG_INFINITY, 1.0);
    p.add_linear_cost(x, 1.0);
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Unbounded);
}

#[test]
fn invalid_programs_are_rejected_before_solving() {
    let mut p = ConicProgram::new();
    let x = p.add_var("x", 1.0, 0.0);
    p.add_quadratic_cost(x, 1.0);
    assert!(matches!(solve(&p, &SolverOptions::default()), Err(ProgramError::EmptyBounds { .. })));

    let mut p = ConicProgram::new();
    let x = p.free_var("x");
    p.add_quadratic_cost(x, -1.0);
    assert!(matches!(
        solve(&p, &SolverOptions::default()),
        Err(ProgramError::NonConvexObjective { .. })
    ));

    let mut p = ConicProgram::new();
    p.free_var("x");
    p.add_eq("bad", LinExpr::var(VarId(7)), 0.0);
    assert!(matches!(
        solve(&p, &SolverOptions::default()),
        Err(ProgramError::UnknownVariable { index: 7, .. })
    ));
}

#[test]
fn residuals_vanish_at_exact_point_and_track_perturbation() {
    let (p, _) = fixed_three();
    let r = check_solution(&p, &[3.0], 1e-9).unwrap();
    assert_eq!(r.max(), 0.0);
    assert!(r.within_tolerance());
    let r = check_solution(&p, &[3.0 + 1e-6], 1e-9).unwrap();
    assert_relative_eq!(r.eq, 1e-6, epsilon = 1e-15);
    assert!(!r.within_tolerance());
    assert!(matches!(
        check_solution(&p, &[], 1e-9),
        Err(CheckError::MissingValues { given: 0, expected: 1 })
    ));
}

/// A random program stored both as a `ConicProgram` and as dense arrays.
#[derive(Debug, Clone)]
struct DenseMirror {
    eq: Vec<(Vec<f64>, f64)>,
    le: Vec<(Vec<f64>, f64)>,
    bounds: Vec<(f64, f64)>,
    cones: Vec<([f64; 5], [f64; 5], [f64; 5])>,
}

fn dense_program() -> impl Strategy<Value = DenseMirror> {
    let row = (prop::collection::vec(-3.0f64..3.0, 5), -5.0f64..5.0);
    let bound = (-2.0f64..0.0, 0.0f64..2.0);
    let coef = prop::array::uniform5(-1.0f64..1.0);
    (
        prop::collection::vec(row.clone(), 0..4),
        prop::collection::vec(row, 0..4),
        prop::collection::vec(bound, 5),
        prop::collection::vec((coef.clone(), coef.clone(), coef), 0..3),
    )
        .prop_map(|(eq, le, bounds, cones)| DenseMirror { eq, le, bounds, cones })
}

fn build(m: &DenseMirror) -> ConicProgram {
    let mut p = ConicProgram::new();
    let vars: Vec<VarId> = m
        .bounds
        .iter()
        .enumerate()
        .map(|(j, &(l, u))| p.add_var(format!("x{j}"), l, u))
        .collect();
    let expr = |a: &[f64]| {
        let mut e = LinExpr::new();
        for (j, &c) in a.iter().enumerate() {
            e.add(vars[j], c);
        }
        e
    };
    for (k, (a, b)) in m.eq.iter().enumerate() {
        p.add_eq(format!("eq:{k}"), expr(a), *b);
    }
    for (k, (a, b)) in m.le.iter().enumerate() {
        p.add_le(format!("le:{k}"), expr(a), *b);
    }
    for (k, (u, w, z)) in m.cones.iter().enumerate() {
        p.add_rotated_cone(format!("cone:{k}"), expr(u), expr(w), vec![expr(z)]);
    }
    p
}

proptest! {
    #[test]
    fn residuals_match_row_by_row_evaluation(m in dense_program(), x in prop::array::uniform5(-3.0f64..3.0)) {
        let p = build(&m);
        let r = check_solution(&p, &x, 1e-9).unwrap();
        let dot = |a: &[f64]| a.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        let mut eq = 0.0f64;
        for (a, b) in &m.eq {
            eq = eq.max((dot(a) - b).abs());
        }
        let mut le = 0.0f64;
        for (a, b) in &m.le {
            le = le.max(dot(a) - b);
        }
        let mut bounds = 0.0f64;
        for (j, &(l, u)) in m.bounds.iter().enumerate() {
            bounds = bounds.max(l - x[j]).max(x[j] - u);
        }
        let mut cone = 0.0f64;
        for (u, w, z) in &m.cones {
            let (u, w, z) = (dot(u), dot(w), dot(z));
            let lorentz = ((u - w).powi(2) + 2.0 * z * z).sqrt() - (u + w);
            cone = cone.max(lorentz);
        }
        prop_assert!((r.eq - eq).abs() <= 1e-12);
        prop_assert!((r.ineq - le.max(0.0)).abs() <= 1e-12);
        prop_assert!((r.bounds - bounds.max(0.0)).abs() <= 1e-12);
        prop_assert!((r.cone - cone.max(0.0)).abs() <= 1e-12);
    }
}

/// `min Σ c_k x_k + d_k x_k²` over a small convex set with one cone.
fn parametric(rhs: f64, seed: &[f64; 6]) -> ConicProgram {
    let mut p = ConicProgram::new();
    let x = p.add_var("x", -5.0, 5.0);
    let y = p.add_var("y", -5.0, 5.0);
    let t = p.add_var("t", 0.0, f64::INFINITY);
    p.add_linear_cost(x, seed[0]);
    p.add_linear_cost(y, seed[1]);
    p.add_quadratic_cost(x, 0.5 + seed[2].abs());
    p.add_quadratic_cost(y, 0.5 + seed[3].abs());
    p.add_linear_cost(t, 1.0 + seed[4].abs());
    p.add_eq("bal:0:xy", LinExpr::var(x).term(y, 1.0 + seed[5].abs()), rhs);
    // t ≥ (x − y)² / 2 keeps the cone active.
    p.add_rotated_cone(
        "cone:0:t",
        LinExpr::var(t),
        LinExpr::constant(1.0),
        vec![LinExpr::var(x).term(y, -1.0)],
    );
    p.add_le("cap:0:x", LinExpr::var(x), 4.0);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equality_duals_are_objective_sensitivities(seed in prop::array::uniform6(-2.0f64..2.0), rhs in -2.0f64..2.0) {
        let o = SolverOptions { feas_tol: 1e-10, gap_tol: 1e-10, ..SolverOptions::default() };
        let p = parametric(rhs, &seed);
        let sol = solve(&p, &o).unwrap();
        prop_assert!(sol.is_optimal());
        let h = 1e-5;
        let up = solve(&parametric(rhs + h, &seed), &o).unwrap().objective_value;
        let down = solve(&parametric(rhs - h, &seed), &o).unwrap().objective_value;
        let fd = (up - down) / (2.0 * h);
        let mu = sol.eq_dual_of(&p, "bal:0:xy").unwrap();
        prop_assert!((fd - mu).abs() <= 1e-4 * mu.abs().max(1.0), "fd {} dual {}", fd, mu);
    }

    #[test]
    fn backends_agree_on_objective(seed in prop::array::uniform6(-2.0f64..2.0), rhs in -2.0f64..2.0) {
        let p = parametric(rhs, &seed);
        let a = solve(&p, &opts(BackendKind::Clarabel)).unwrap();
        let b = solve(&p, &opts(BackendKind::DenseIpm)).unwrap();
        prop_assert!(a.is_optimal() && b.is_optimal());
        let rel = (a.objective_value - b.objective_value).abs() / a.objective_value.abs().max(1.0);
        prop_assert!(rel <= 1e-6, "{} vs {}", a.objective_value, b.objective_value);
        for (da, db) in a.eq_duals.iter().zip(&b.eq_duals) {
            prop_assert!((da - db).abs() <= 1e-4 * da.abs().max(1.0));
        }
    }
}

#[test]
fn inequality_duals_are_nonpositive() {
    let mut p = ConicProgram::new();
    let x = p.free_var("x");
    p.add_linear_cost(x, -1.0);
    p.add_le("cap:0:x", LinExpr::var(x), 2.0);
    for b in BACKENDS {
        let sol = solve(&p, &opts(b)).unwrap();
        assert_relative_eq!(sol.ineq_duals[0], -1.0, epsilon = 1e-6);
    }
}

#[test]
fn cbf_dump_lists_every_block() {
    let p = parametric(1.0, &[1.0, 0.5, 0.2, 0.1, 0.3, 0.4]);
    let text = to_cbf_string(&p);
    assert!(text.starts_with("VER\n3\n"));
    // 3 variables plus 2 quadratic epigraphs.
    assert!(text.contains("VAR\n5 1\nF 5\n"));
    // eq block, nonneg block, one cone from the program and two epigraphs.
    assert!(text.contains("CON\n"));
    let con_header = text.split("CON\n").nth(1).unwrap().lines().next().unwrap();
    let rows = 1 + (1 + 4 + 1) + 3 + 3 + 3;
    assert_eq!(con_header, format!("{rows} 5"));
    assert_eq!(text.matches("QR 3").count(), 3);
    assert!(text.contains("L= 1"));
}

#[test]
fn program_size_counts_rows_by_class() {
    let p = parametric(1.0, &[0.0; 6]);
    let s = p.size();
    assert_eq!(s.variables, 3);
    assert_eq!((s.eq_rows, s.ineq_rows, s.cones), (1, 1, 1));
    assert_eq!(s.constraints(), 3);
    assert_eq!(s.bounded_vars, 3);
}
