//! Writer for the Conic Benchmark Format (CBF, version 3).
//!
//! Quadratic objective terms `d·x²` become epigraph variables `t ≥ d·x²`
//! expressed as rotated cones `2·t·(1/2d) ≥ x²`, since CBF has no quadratic
//! objective section.

use std::fmt::Write as _;
use std::io;

use super::program::{ConicProgram, LinExpr};

/// Sparse `(column, coefficient)` terms and a constant.
type SparseRow = (Vec<(usize, f64)>, f64);

/// Renders `program` as a CBF document.
pub fn to_cbf_string(program: &ConicProgram) -> String {
    let n = program.num_vars();
    let quad: Vec<(usize, f64)> = program
        .objective
        .quadratic
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(j, &d)| (j, d))
        .collect();
    let total_vars = n + quad.len();

    // Each constraint block: (cone tag, rows of (terms, constant)).
    let mut blocks: Vec<(&str, Vec<SparseRow>)> = Vec::new();
    let eq: Vec<_> = program
        .eq_constraints
        .iter()
        .map(|r| (r.terms.iter().map(|&(v, c)| (v.0, c)).collect(), -r.rhs))
        .collect();
    if !eq.is_empty() {
        blocks.push(("L=", eq));
    }
    let mut nonneg: Vec<(Vec<(usize, f64)>, f64)> = program
        .ineq_constraints
        .iter()
        .map(|r| (r.terms.iter().map(|&(v, c)| (v.0, -c)).collect(), r.rhs))
        .collect();
    for (j, v) in program.variables.iter().enumerate() {
        if v.lower.is_finite() {
            nonneg.push((vec![(j, 1.0)], -v.lower));
        }
        if v.upper.is_finite() {
            nonneg.push((vec![(j, -1.0)], v.upper));
        }
    }
    if !nonneg.is_empty() {
        blocks.push(("L+", nonneg));
    }
    let member = |e: &LinExpr| (e.terms.iter().map(|&(v, c)| (v.0, c)).collect::<Vec<_>>(), e.constant);
    for cone in &program.rsoc_cones {
        let mut rows = vec![member(&cone.u), member(&cone.w)];
        rows.extend(cone.z.iter().map(member));
        blocks.push(("QR", rows));
    }
    for (k, &(j, d)) in quad.iter().enumerate() {
        let t = n + k;
        blocks.push(("QR", vec![(vec![(t, 1.0)], 0.0), (vec![], 1.0 / (2.0 * d)), (vec![(j, 1.0)], 0.0)]));
    }

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "VER\n3\n\nOBJSENSE\nMIN\n");
    let _ = writeln!(w, "VAR\n{total_vars} 1\nF {total_vars}\n");
    let m: usize = blocks.iter().map(|b| b.1.len()).sum();
    let _ = writeln!(w, "CON\n{m} {}", blocks.len());
    for (tag, rows) in &blocks {
        let _ = writeln!(w, "{tag} {}", rows.len());
    }
    let _ = writeln!(w);

    let mut obj: Vec<(usize, f64)> = program
        .objective
        .linear
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    obj.extend((0..quad.len()).map(|k| (n + k, 1.0)));
    if !obj.is_empty() {
        let _ = writeln!(w, "OBJACOORD\n{}", obj.len());
        for (j, c) in obj {
            let _ = writeln!(w, "{j} {c:e}");
        }
        let _ = writeln!(w);
    }
    if program.objective.constant != 0.0 {
        let _ = writeln!(w, "OBJBCOORD\n{:e}\n", program.objective.constant);
    }

    let mut acoord = Vec::new();
    let mut bcoord = Vec::new();
    let mut row = 0usize;
    for (_, rows) in &blocks {
        for (terms, constant) in rows {
            for &(j, c) in terms {
                if c != 0.0 {
                    acoord.push((row, j, c));
                }
            }
            if *constant != 0.0 {
                bcoord.push((row, *constant));
            }
            row += 1;
        }
    }
    if !acoord.is_empty() {
        let _ = writeln!(w, "ACOORD\n{}", acoord.len());
        for (i, j, c) in acoord {
            let _ = writeln!(w, "{i} {j} {c:e}");
        }
        let _ = writeln!(w);
    }
    if !bcoord.is_empty() {
        let _ = writeln!(w, "BCOORD\n{}", bcoord.len());
        for (i, c) in bcoord {
            let _ = writeln!(w, "{i} {c:e}");
        }
    }
    out
}

pub fn write_cbf(program: &ConicProgram, mut writer: impl io::Write) -> io::Result<()> {
    writer.write_all(to_cbf_string(program).as_bytes())
}
