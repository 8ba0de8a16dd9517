use std::collections::HashMap;
use std::sync::OnceLock;

/// Index of a decision variable inside a [`ConicProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Affine expression `constant + Σ coef·x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Self {
            terms: vec![(v, 1.0)],
            constant: 0.0,
        }
    }

    pub fn scaled(v: VarId, coef: f64) -> Self {
        Self {
            terms: vec![(v, coef)],
            constant: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(mut self, v: VarId, coef: f64) -> Self {
        self.add(v, coef);
        self
    }

    pub fn plus(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn add(&mut self, v: VarId, coef: f64) {
        if coef != 0.0 {
            self.terms.push((v, coef));
        }
    }

    pub fn add_expr(&mut self, other: &LinExpr, scale: f64) {
        for &(v, c) in &other.terms {
            self.add(v, c * scale);
        }
        self.constant += other.constant * scale;
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * x[v.0]).sum::<f64>() + self.constant
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Linear row `Σ coef·x (= or ≤) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * x[v.0]).sum()
    }
}

/// Rotated cone `2·u·w ≥ Σ z_k²`, `u, w ≥ 0`, over affine members.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedCone {
    pub name: String,
    pub u: LinExpr,
    pub w: LinExpr,
    pub z: Vec<LinExpr>,
}

impl RotatedCone {
    /// Violation measured in the equivalent Lorentz form
    /// `‖(u − w, √2·z)‖ ≤ u + w`; zero when the point is inside.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let u = self.u.eval(x);
        let w = self.w.eval(x);
        let zz: f64 = self.z.iter().map(|z| 2.0 * z.eval(x).powi(2)).sum();
        let norm = ((u - w).powi(2) + zz).sqrt();
        (norm - (u + w)).max(0.0)
    }
}

/// Separable convex quadratic objective `constant + Σ c_k x_k + Σ d_k x_k²`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Objective {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProgramError {
    #[error("{context} references unknown variable #{index}")]
    UnknownVariable { context: String, index: usize },
    #[error("variable {name} has negative quadratic cost {coef}")]
    NonConvexObjective { name: String, coef: f64 },
    #[error("variable {name} has empty bounds [{lower}, {upper}]")]
    EmptyBounds { name: String, lower: f64, upper: f64 },
    #[error("{context} has a non-finite coefficient")]
    NonFinite { context: String },
}

/// A minimization over linear rows, variable bounds and rotated cones.
#[derive(Debug, Clone, Default)]
pub struct ConicProgram {
    pub variables: Vec<Variable>,
    pub objective: Objective,
    pub eq_constraints: Vec<Row>,
    pub ineq_constraints: Vec<Row>,
    pub rsoc_cones: Vec<RotatedCone>,
    var_lookup: OnceLock<HashMap<String, usize>>,
    eq_lookup: OnceLock<HashMap<String, usize>>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.var_lookup.take();
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.linear.push(0.0);
        self.objective.quadratic.push(0.0);
        VarId(self.variables.len() - 1)
    }

    pub fn free_var(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_linear_cost(&mut self, v: VarId, coef: f64) {
        self.objective.linear[v.0] += coef;
    }

    pub fn add_quadratic_cost(&mut self, v: VarId, coef: f64) {
        self.objective.quadratic[v.0] += coef;
    }

    pub fn add_constant_cost(&mut self, c: f64) {
        self.objective.constant += c;
    }

    fn row(name: String, expr: LinExpr, rhs: f64) -> Row {
        let mut terms = expr.terms;
        terms.retain(|&(_, c)| c != 0.0);
        Row {
            name,
            terms,
            rhs: rhs - expr.constant,
        }
    }

    /// Adds `expr = rhs`; returns the row index.
    pub fn add_eq(&mut self, name: impl Into<String>, expr: LinExpr, rhs: f64) -> usize {
        self.eq_lookup.take();
        self.eq_constraints.push(Self::row(name.into(), expr, rhs));
        self.eq_constraints.len() - 1
    }

    /// Adds `expr ≤ rhs`; returns the row index.
    pub fn add_le(&mut self, name: impl Into<String>, expr: LinExpr, rhs: f64) -> usize {
        self.ineq_constraints.push(Self::row(name.into(), expr, rhs));
        self.ineq_constraints.len() - 1
    }

    /// Adds `expr ≥ rhs`.
    pub fn add_ge(&mut self, name: impl Into<String>, expr: LinExpr, rhs: f64) -> usize {
        let mut neg = LinExpr::new();
        neg.add_expr(&expr, -1.0);
        self.add_le(name, neg, -rhs)
    }

    pub fn add_rotated_cone(&mut self, name: impl Into<String>, u: LinExpr, w: LinExpr, z: Vec<LinExpr>) {
        self.rsoc_cones.push(RotatedCone {
            name: name.into(),
            u,
            w,
            z,
        });
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_lookup
            .get_or_init(|| {
                self.variables
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.name.clone(), i))
                    .collect()
            })
            .get(name)
            .map(|&i| VarId(i))
    }

    pub fn eq_index(&self, name: &str) -> Option<usize> {
        self.eq_lookup
            .get_or_init(|| {
                self.eq_constraints
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (r.name.clone(), i))
                    .collect()
            })
            .get(name)
            .copied()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let o = &self.objective;
        o.constant
            + x.iter()
                .zip(o.linear.iter().zip(&o.quadratic))
                .map(|(&xi, (&c, &d))| c * xi + d * xi * xi)
                .sum::<f64>()
    }

    /// Checks the structural invariants a backend relies on.
    pub fn validate(&self) -> Result<(), ProgramError> {
        let n = self.variables.len();
        for (v, &d) in self.variables.iter().zip(&self.objective.quadratic) {
            if v.lower > v.upper || v.lower.is_nan() || v.upper.is_nan() {
                return Err(ProgramError::EmptyBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if d < 0.0 {
                return Err(ProgramError::NonConvexObjective {
                    name: v.name.clone(),
                    coef: d,
                });
            }
        }
        if self
            .objective
            .linear
            .iter()
            .chain(&self.objective.quadratic)
            .any(|c| !c.is_finite())
        {
            return Err(ProgramError::NonFinite {
                context: "objective".into(),
            });
        }
        let check_terms = |context: &str, terms: &[(VarId, f64)], extra: f64| -> Result<(), ProgramError> {
            for &(v, c) in terms {
                if v.0 >= n {
                    return Err(ProgramError::UnknownVariable {
                        context: context.to_string(),
                        index: v.0,
                    });
                }
                if !c.is_finite() {
                    return Err(ProgramError::NonFinite {
                        context: context.to_string(),
                    });
                }
            }
            if !extra.is_finite() {
                return Err(ProgramError::NonFinite {
                    context: context.to_string(),
                });
            }
            Ok(())
        };
        for r in self.eq_constraints.iter().chain(&self.ineq_constraints) {
            check_terms(&r.name, &r.terms, r.rhs)?;
        }
        for c in &self.rsoc_cones {
            check_terms(&c.name, &c.u.terms, c.u.constant)?;
            check_terms(&c.name, &c.w.terms, c.w.constant)?;
            for z in &c.z {
                check_terms(&c.name, &z.terms, z.constant)?;
            }
        }
        Ok(())
    }

    /// Row/variable counts by class.
    pub fn size(&self) -> ProgramSize {
        ProgramSize {
            variables: self.variables.len(),
            eq_rows: self.eq_constraints.len(),
            ineq_rows: self.ineq_constraints.len(),
            cones: self.rsoc_cones.len(),
            bounded_vars: self
                .variables
                .iter()
                .filter(|v| v.lower.is_finite() || v.upper.is_finite())
                .count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ProgramSize {
    pub variables: usize,
    pub eq_rows: usize,
    pub ineq_rows: usize,
    pub cones: usize,
    pub bounded_vars: usize,
}

impl ProgramSize {
    /// Equality, inequality and cone constraints (bounds excluded).
    pub fn constraints(&self) -> usize {
        self.eq_rows + self.ineq_rows + self.cones
    }
}
