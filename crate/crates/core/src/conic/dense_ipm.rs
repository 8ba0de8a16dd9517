//! Dense primal-dual interior point method for small conic QPs.
//!
//! Solves `min ½xᵀPx + qᵀx  s.t.  Ax = b,  Gx + s = h,  s ∈ ℝ₊ᵖ × Q₁ × … × Q_k`
//! with Nesterov–Todd scaling and a Mehrotra predictor–corrector. Every
//! Newton system is assembled and factored densely, so this backend is meant
//! for cross-checking small programs, not for production-size models.

use nalgebra::{DMatrix, DVector};

use super::clarabel_backend::StandardForm;
use super::program::ConicProgram;
use super::solution::{BackendKind, Solution, SolveStatus, SolverOptions};

/// Newton direction `(dx, dy, dz, ds)`.
type Direction = (DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>);

/// Refuse programs whose KKT matrix would exceed this dimension.
const MAX_DIM: usize = 4000;

#[derive(Clone)]
struct Cones {
    nonneg: usize,
    soc: Vec<(usize, usize)>, // (offset, dim) within the inequality block
}

impl Cones {
    fn degree(&self) -> f64 {
        (self.nonneg + self.soc.len()) as f64
    }

    fn identity(&self, m: usize) -> DVector<f64> {
        let mut e = DVector::zeros(m);
        for i in 0..self.nonneg {
            e[i] = 1.0;
        }
        for &(o, _) in &self.soc {
            e[o] = 1.0;
        }
        e
    }

    /// Smallest `t` with `v + t·e` in the cone.
    fn shift_needed(&self, v: &DVector<f64>) -> f64 {
        let mut t = f64::NEG_INFINITY;
        for i in 0..self.nonneg {
            t = t.max(-v[i]);
        }
        for &(o, d) in &self.soc {
            let tail = v.rows(o + 1, d - 1).norm();
            t = t.max(tail - v[o]);
        }
        t
    }

    fn jordan(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(u.len());
        for i in 0..self.nonneg {
            out[i] = u[i] * v[i];
        }
        for &(o, d) in &self.soc {
            out[o] = u.rows(o, d).dot(&v.rows(o, d));
            for k in 1..d {
                out[o + k] = u[o] * v[o + k] + v[o] * u[o + k];
            }
        }
        out
    }

    /// Solves `lambda ∘ x = r` for `x`.
    fn jordan_div(&self, lambda: &DVector<f64>, r: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(r.len());
        for i in 0..self.nonneg {
            out[i] = r[i] / lambda[i];
        }
        for &(o, d) in &self.soc {
            let l0 = lambda[o];
            let l1 = lambda.rows(o + 1, d - 1);
            let r1 = r.rows(o + 1, d - 1);
            let det = l0 * l0 - l1.norm_squared();
            let x0 = (l0 * r[o] - l1.dot(&r1)) / det;
            out[o] = x0;
            for k in 1..d {
                out[o + k] = (r[o + k] - x0 * lambda[o + k]) / l0;
            }
        }
        out
    }

    /// Largest step keeping `v + α·dv` in the cone (may be infinite).
    fn max_step(&self, v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
        let mut alpha = f64::INFINITY;
        for i in 0..self.nonneg {
            if dv[i] < 0.0 {
                alpha = alpha.min(-v[i] / dv[i]);
            }
        }
        for &(o, d) in &self.soc {
            let (x0, d0) = (v[o], dv[o]);
            let x1 = v.rows(o + 1, d - 1);
            let d1 = dv.rows(o + 1, d - 1);
            let a = d0 * d0 - d1.norm_squared();
            let b = x0 * d0 - x1.dot(&d1);
            let c = (x0 * x0 - x1.norm_squared()).max(0.0);
            // g(α) = aα² + 2bα + c; first positive root bounds the step.
            let mut root = f64::INFINITY;
            if a.abs() < 1e-300 {
                if b < 0.0 {
                    root = -c / (2.0 * b);
                }
            } else {
                let disc = b * b - a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    for r in [(-b - sq) / a, (-b + sq) / a] {
                        if r > 0.0 {
                            root = root.min(r);
                        }
                    }
                }
            }
            if d0 < 0.0 {
                root = root.min(-x0 / d0);
            }
            alpha = alpha.min(root);
        }
        alpha
    }

    /// Nesterov–Todd scaling `W` (symmetric, block diagonal) and its inverse.
    fn nt_scaling(&self, s: &DVector<f64>, z: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let m = s.len();
        let mut w = DMatrix::zeros(m, m);
        let mut winv = DMatrix::zeros(m, m);
        for i in 0..self.nonneg {
            let wi = (s[i] / z[i]).sqrt();
            w[(i, i)] = wi;
            winv[(i, i)] = 1.0 / wi;
        }
        for &(o, d) in &self.soc {
            let sv = s.rows(o, d).into_owned();
            let zv = z.rows(o, d).into_owned();
            let jdot = |v: &DVector<f64>| v[0] * v[0] - v.rows(1, d - 1).norm_squared();
            let sn = jdot(&sv).max(1e-300).sqrt();
            let zn = jdot(&zv).max(1e-300).sqrt();
            let sbar = &sv / sn;
            let zbar = &zv / zn;
            let gamma = ((1.0 + sbar.dot(&zbar)) / 2.0).sqrt();
            let mut jz = zbar.clone();
            for k in 1..d {
                jz[k] = -jz[k];
            }
            let wbar = (&sbar + &jz) / (2.0 * gamma);
            let eta = (sn / zn).sqrt();
            // W = η [w̄₀ w̄₁ᵀ; w̄₁ I + w̄₁w̄₁ᵀ/(1+w̄₀)], inverse flips the off-diagonal sign.
            let w1 = wbar.rows(1, d - 1).into_owned();
            let tail = DMatrix::identity(d - 1, d - 1) + &w1 * w1.transpose() / (1.0 + wbar[0]);
            let mut wb = DMatrix::zeros(d, d);
            wb[(0, 0)] = wbar[0];
            wb.view_mut((1, 1), (d - 1, d - 1)).copy_from(&tail);
            let mut wib = wb.clone();
            for k in 1..d {
                wb[(0, k)] = wbar[k];
                wb[(k, 0)] = wbar[k];
                wib[(0, k)] = -wbar[k];
                wib[(k, 0)] = -wbar[k];
            }
            let wb = wb * eta;
            let wib = wib / eta;
            w.view_mut((o, o), (d, d)).copy_from(&wb);
            winv.view_mut((o, o), (d, d)).copy_from(&wib);
        }
        (w, winv)
    }
}

struct Kkt<'a> {
    p: &'a DMatrix<f64>,
    a: &'a DMatrix<f64>,
    g: &'a DMatrix<f64>,
}

impl Kkt<'_> {
    /// Solves
    /// `[P Aᵀ Gᵀ; A 0 0; G 0 −WᵀW] [dx; dy; dz] = [bx; by; bz]`
    /// in the scaled variable `W·dz`, which keeps the matrix well conditioned
    /// as iterates approach the cone boundary.
    fn solve(
        &self,
        winv: &DMatrix<f64>,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> Option<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let n = self.p.nrows();
        let me = self.a.nrows();
        let mi = self.g.nrows();
        let dim = n + me + mi;
        let wg = winv * self.g;
        let mut k = DMatrix::zeros(dim, dim);
        k.view_mut((0, 0), (n, n)).copy_from(self.p);
        k.view_mut((0, n), (n, me)).copy_from(&self.a.transpose());
        k.view_mut((n, 0), (me, n)).copy_from(self.a);
        k.view_mut((0, n + me), (n, mi)).copy_from(&wg.transpose());
        k.view_mut((n + me, 0), (mi, n)).copy_from(&wg);
        for i in 0..mi {
            k[(n + me + i, n + me + i)] = -1.0;
        }
        let scale = k.amax().max(1.0);
        let delta = 1e-12 * scale;
        let mut kreg = k.clone();
        for i in 0..n {
            kreg[(i, i)] += delta;
        }
        for i in n..n + me {
            kreg[(i, i)] -= delta;
        }
        let lu = kreg.lu();
        let mut rhs = DVector::zeros(dim);
        rhs.rows_mut(0, n).copy_from(bx);
        rhs.rows_mut(n, me).copy_from(by);
        rhs.rows_mut(n + me, mi).copy_from(&(winv * bz));
        let mut sol = lu.solve(&rhs)?;
        for _ in 0..5 {
            let resid = &rhs - &k * &sol;
            if resid.amax() <= 1e-15 * rhs.amax().max(1.0) {
                break;
            }
            sol += lu.solve(&resid)?;
        }
        let dx = sol.rows(0, n).into_owned();
        let dy = sol.rows(n, me).into_owned();
        let dz = winv * sol.rows(n + me, mi);
        if dx.iter().chain(dy.iter()).chain(dz.iter()).all(|v| v.is_finite()) {
            Some((dx, dy, dz))
        } else {
            None
        }
    }
}

pub(crate) fn solve(program: &ConicProgram, opts: &SolverOptions) -> Solution {
    let sf = StandardForm::build(program);
    let n = sf.n;
    let me = sf.zero_rows;
    let mi = sf.rows - me;
    if n + me > MAX_DIM || mi > MAX_DIM {
        log::error!("dense backend refuses a program with {n} variables and {} rows", sf.rows);
        return Solution::failed(SolveStatus::NumericalFailure, BackendKind::DenseIpm, 0);
    }

    let mut a = DMatrix::zeros(me, n);
    let mut g = DMatrix::zeros(mi, n);
    for &(i, j, v) in &sf.triplets {
        if i < me {
            a[(i, j)] += v;
        } else {
            g[(i - me, j)] += v;
        }
    }
    let b = DVector::from_iterator(me, sf.b[..me].iter().copied());
    let h = DVector::from_iterator(mi, sf.b[me..].iter().copied());
    let p = DMatrix::from_diagonal(&DVector::from_vec(sf.p_diag.clone()));
    let q = DVector::from_vec(sf.q.clone());
    let mut soc = Vec::new();
    let mut off = sf.nonneg_rows;
    for &d in &sf.soc_dims {
        soc.push((off, d));
        off += d;
    }
    let cones = Cones {
        nonneg: sf.nonneg_rows,
        soc,
    };
    let kkt = Kkt { p: &p, a: &a, g: &g };
    let e = cones.identity(mi);

    // Initial point from the W = I system.
    let ident = DMatrix::identity(mi, mi);
    let Some((mut x, mut y, z0)) = kkt.solve(&ident, &(-&q), &b, &h) else {
        return Solution::failed(SolveStatus::NumericalFailure, BackendKind::DenseIpm, 0);
    };
    let mut s = -&z0;
    let mut z = z0;
    let shift = |v: &mut DVector<f64>| {
        let t = cones.shift_needed(v);
        if t >= -1e-8 {
            *v += &e * (1.0 + t);
        }
    };
    shift(&mut s);
    shift(&mut z);

    let bnorm = b.amax().max(h.amax()).max(1.0);
    let qnorm = q.amax().max(1.0);
    let degree = cones.degree().max(1.0);

    for iter in 0..opts.max_iter {
        let rx = &p * &x + &q + a.transpose() * &y + g.transpose() * &z;
        let ry = &a * &x - &b;
        let rz = &g * &x + &s - &h;
        let gap = s.dot(&z);
        let mu = gap / degree;
        let pobj = 0.5 * x.dot(&(&p * &x)) + q.dot(&x);
        let pres = ry.amax().max(rz.amax()) / bnorm;
        let dres = rx.amax() / qnorm;
        let relgap = gap / pobj.abs().max(1.0);
        if opts.verbose {
            log::debug!("dense-ipm {iter:3}: pobj {pobj:.10e} pres {pres:.2e} dres {dres:.2e} gap {gap:.2e}");
        }
        if pres <= opts.feas_tol && dres <= opts.feas_tol && (gap <= opts.gap_tol || relgap <= opts.gap_tol) {
            let primal: Vec<f64> = x.iter().copied().collect();
            let m_in = program.ineq_constraints.len();
            return Solution {
                status: SolveStatus::Optimal,
                objective_value: program.objective_value(&primal),
                primal,
                eq_duals: y.iter().take(program.eq_constraints.len()).map(|v| -v).collect(),
                ineq_duals: z.iter().take(m_in).map(|v| -v).collect(),
                iterations: iter,
                backend: BackendKind::DenseIpm,
                certificate: None,
            };
        }

        let (w, winv) = cones.nt_scaling(&s, &z);
        let lambda = &w * &z;
        let newton = |rc: &DVector<f64>| -> Option<Direction> {
            let u = cones.jordan_div(&lambda, rc);
            let wu = &w * &u;
            // G dx − WᵀW dz = −rz − Wᵀu
            let (dx, dy, dz) = kkt.solve(&winv, &(-&rx), &(-&ry), &(-&rz - &wu))?;
            let ds = -&rz - &g * &dx;
            Some((dx, dy, dz, ds))
        };

        let lam_sq = cones.jordan(&lambda, &lambda);
        let Some((_, _, dz_a, ds_a)) = newton(&(-&lam_sq)) else {
            break;
        };
        let alpha_a = cones.max_step(&s, &ds_a).min(cones.max_step(&z, &dz_a)).min(1.0);
        let sigma = (1.0 - alpha_a).powi(3).clamp(0.0, 1.0);
        let corr = cones.jordan(&(&winv * &ds_a), &(&w * &dz_a));
        let rc = -&lam_sq + &e * (sigma * mu) - corr;
        let Some((dx, dy, dz, ds)) = newton(&rc) else {
            break;
        };
        let alpha = (0.99 * cones.max_step(&s, &ds).min(cones.max_step(&z, &dz))).min(1.0);
        x += &dx * alpha;
        y += &dy * alpha;
        s += &ds * alpha;
        z += &dz * alpha;
    }
    Solution::failed(SolveStatus::NumericalFailure, BackendKind::DenseIpm, opts.max_iter)
}
