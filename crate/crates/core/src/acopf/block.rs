//! One copy of the convexified network equations.
//!
//! The deterministic OPF uses a single block; the stochastic model and every
//! Benders subproblem stack one block per scenario. Generator active power is
//! passed in so the caller decides whether it is shared across blocks.

use serde::{Deserialize, Serialize};

use crate::conic::{ConicProgram, LinExpr, VarId};
use crate::grid::{BusKind, CaseIndex, GridCase, LineKind};

/// Per-farm wind limits for one scenario, pu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarmLimits {
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
}

impl FarmLimits {
    pub const ZERO: FarmLimits = FarmLimits {
        p_min: 0.0,
        p_max: 0.0,
        q_min: 0.0,
        q_max: 0.0,
    };
}

/// `<kind>:<scenario>:<element>`.
pub(crate) fn name(kind: &str, scenario: usize, element: &str) -> String {
    format!("{kind}:{scenario}:{element}")
}

pub(crate) struct BlockConfig<'a> {
    pub scenario: usize,
    /// Probability weight applied to every cost this block adds.
    pub weight: f64,
    /// Indexed like `case.wind_farms`.
    pub wind: &'a [FarmLimits],
    /// Adds load shedding and generation spill priced at this value, and
    /// balance slacks priced above it.
    pub voll: Option<f64>,
}

/// Variable handles created for one block.
#[derive(Debug, Clone, Default)]
pub(crate) struct BlockVars {
    /// Load-shedding variable per bus, when shedding is enabled.
    pub shed: Vec<Option<VarId>>,
}

/// Emergency slacks cost this multiple of VoLL so shedding is used first.
pub const SLACK_PRICE_FACTOR: f64 = 2.0;

/// Price on reactive loss of zero-resistance branches, $/pu.
///
/// On such branches the coupling row leaves `q_loss` free above its cone
/// bound, so the relaxed optimum is degenerate. A price far below any
/// generation cost selects the tight point without moving the dispatch.
pub(crate) fn loss_tie_break(case: &GridCase) -> f64 {
    let worst = case
        .generators
        .iter()
        .map(|g| g.marginal_cost(g.p_max))
        .fold(0.0_f64, f64::max);
    1e-5 * worst.max(1.0)
}

/// Adds the network equations of one scenario to `prog`.
///
/// Flow convention: the sending end of line `l` withdraws `p_s`, the
/// receiving end receives `p_s − p_loss` (likewise for reactive power).
pub(crate) fn add_soc_block(
    prog: &mut ConicProgram,
    case: &GridCase,
    idx: &CaseIndex,
    gen_p: &[VarId],
    cfg: &BlockConfig,
) -> BlockVars {
    let j = cfg.scenario;
    let nb = case.buses.len();
    let mut pbal: Vec<LinExpr> = vec![LinExpr::new(); nb];
    let mut qbal: Vec<LinExpr> = vec![LinExpr::new(); nb];
    let active = |i: usize| !idx.svc_terminal[i];

    let mut v = vec![None; nb];
    for (i, bus) in case.buses.iter().enumerate() {
        if active(i) {
            let var = prog.add_var(name("V", j, &bus.id), bus.v_min_sq, bus.v_max_sq);
            v[i] = Some(var);
            pbal[i].add(var, -bus.shunt_g);
            if bus.kind.is_ac() {
                qbal[i].add(var, bus.shunt_b);
            }
        }
    }
    let vs = |i: usize| v[i].expect("active bus has a voltage variable");

    for (g, gen) in case.generators.iter().enumerate() {
        let Some(b) = idx.bus(&gen.bus) else { continue };
        pbal[b].add(gen_p[g], 1.0);
        if case.buses[b].kind.is_ac() {
            let q = prog.add_var(name("qg", j, &gen.id), gen.q_min, gen.q_max);
            qbal[b].add(q, 1.0);
        }
    }

    for (e, farm) in case.wind_farms.iter().enumerate() {
        let lim = cfg.wind.get(e).copied().unwrap_or(FarmLimits::ZERO);
        let b = idx.bus(&farm.bus).expect("validated farm bus");
        let p = prog.add_var(name("pw", j, &farm.id), lim.p_min, lim.p_max);
        prog.add_linear_cost(p, cfg.weight * farm.cost_c1);
        pbal[b].add(p, 1.0);
        if case.buses[b].kind.is_ac() {
            let q = prog.add_var(name("qw", j, &farm.id), lim.q_min, lim.q_max);
            qbal[b].add(q, 1.0);
        }
    }

    let mut shed = vec![None; nb];
    if let Some(voll) = cfg.voll {
        for (i, bus) in case.buses.iter().enumerate() {
            if !active(i) {
                continue;
            }
            if bus.p_load > 0.0 {
                let s = prog.add_var(name("shed", j, &bus.id), 0.0, bus.p_load);
                prog.add_linear_cost(s, cfg.weight * voll);
                pbal[i].add(s, 1.0);
                if bus.kind.is_ac() {
                    qbal[i].add(s, bus.q_load / bus.p_load);
                }
                shed[i] = Some(s);
            }
            let s = prog.add_var(name("spill", j, &bus.id), 0.0, f64::INFINITY);
            prog.add_linear_cost(s, cfg.weight * voll);
            pbal[i].add(s, -1.0);
            // Shedding cannot cover losses or absorb surplus reactive power
            // once the load is gone; these slacks keep every dispatch feasible.
            let price = cfg.weight * SLACK_PRICE_FACTOR * voll;
            let short = prog.add_var(name("short", j, &bus.id), 0.0, f64::INFINITY);
            prog.add_linear_cost(short, price);
            pbal[i].add(short, 1.0);
            if bus.kind.is_ac() {
                let up = prog.add_var(name("qshort", j, &bus.id), 0.0, f64::INFINITY);
                let down = prog.add_var(name("qspill", j, &bus.id), 0.0, f64::INFINITY);
                prog.add_linear_cost(up, price);
                prog.add_linear_cost(down, price);
                qbal[i].add(up, 1.0);
                qbal[i].add(down, -1.0);
            }
        }
    }

    // Series resistance of each converter, keyed by PC bus, for the p_cse coupling.
    let r_cse_at_pc = |pc: usize| -> f64 {
        idx.converter_at_pc[pc]
            .and_then(|c| idx.converter_line[c])
            .map(|l| case.lines[l].r)
            .unwrap_or(0.0)
    };
    let mut p_cse_at_pc: Vec<Option<VarId>> = vec![None; nb];
    let tie_break = cfg.weight * loss_tie_break(case);

    for (l, line) in case.lines.iter().enumerate() {
        let (s, r) = (idx.line_from[l], idx.line_to[l]);
        let id = &line.id;
        let k = line.capacity_sq;
        match line.kind {
            LineKind::Ac | LineKind::PcTransformer => {
                let ps = prog.free_var(name("ps", j, id));
                let qs = prog.free_var(name("qs", j, id));
                let pl = prog.add_var(name("pl", j, id), 0.0, f64::INFINITY);
                let ql = prog.add_var(name("ql", j, id), 0.0, k * line.x);
                if line.r == 0.0 {
                    // Nothing else prices reactive loss on a lossless branch.
                    prog.add_linear_cost(ql, tie_break);
                }
                pbal[s].add(ps, -1.0);
                pbal[r].add(ps, 1.0);
                pbal[r].add(pl, -1.0);
                qbal[s].add(qs, -1.0);
                qbal[r].add(qs, 1.0);
                qbal[r].add(ql, -1.0);
                prog.add_eq(
                    name("drop", j, id),
                    LinExpr::var(vs(s))
                        .term(vs(r), -1.0)
                        .term(ps, -2.0 * line.r)
                        .term(qs, -2.0 * line.x)
                        .term(pl, line.r)
                        .term(ql, line.x),
                    0.0,
                );
                prog.add_eq(name("couple", j, id), LinExpr::scaled(pl, line.x).term(ql, -line.r), 0.0);
                prog.add_rotated_cone(
                    name("loss", j, id),
                    LinExpr::var(vs(s)),
                    LinExpr::scaled(ql, 0.5 / line.x),
                    vec![LinExpr::var(ps), LinExpr::var(qs)],
                );
                prog.add_rotated_cone(
                    name("thermal", j, id),
                    LinExpr::constant(0.5 * k),
                    LinExpr::constant(1.0),
                    vec![LinExpr::var(ps), LinExpr::var(qs)],
                );
                if line.kind == LineKind::Ac {
                    let th = prog.free_var(name("th", j, id));
                    prog.add_eq(
                        name("angle", j, id),
                        LinExpr::var(th).term(ps, -line.x).term(qs, line.r),
                        0.0,
                    );
                } else {
                    let cse = prog.add_var(name("pcse", j, id), 0.0, f64::INFINITY);
                    prog.add_eq(
                        name("cse", j, id),
                        LinExpr::scaled(cse, line.x).term(ql, -r_cse_at_pc(s)),
                        0.0,
                    );
                    p_cse_at_pc[s] = Some(cse);
                }
            }
            LineKind::DcMono | LineKind::DcBi => {
                let cap = k.sqrt();
                let ps = prog.add_var(name("ps", j, id), -cap, cap);
                let mono = line.kind == LineKind::DcMono;
                let loss_cap = if mono { k * line.r } else { 0.25 * k * line.r };
                let pl = prog.add_var(name("pl", j, id), 0.0, loss_cap);
                pbal[s].add(ps, -1.0);
                pbal[r].add(ps, 1.0);
                pbal[r].add(pl, -1.0);
                let drop_coef = if mono { 2.0 } else { 1.0 };
                prog.add_eq(
                    name("drop", j, id),
                    LinExpr::var(vs(s))
                        .term(vs(r), -1.0)
                        .term(ps, -drop_coef * line.r)
                        .term(pl, line.r),
                    0.0,
                );
                if line.r > 0.0 {
                    // mono: 2·V·(pl/2R) ≥ p²; bi: 2·V·(2pl/R) ≥ p².
                    let w = if mono { 0.5 / line.r } else { 2.0 / line.r };
                    prog.add_rotated_cone(
                        name("loss", j, id),
                        LinExpr::var(vs(s)),
                        LinExpr::scaled(pl, w),
                        vec![LinExpr::var(ps)],
                    );
                }
            }
            LineKind::Svc => {
                let qs = prog.free_var(name("qs", j, id));
                qbal[s].add(qs, -1.0);
                let (bmin, bmax) = (line.b_min.unwrap_or(0.0), line.b_max.unwrap_or(0.0));
                prog.add_le(name("svcmax", j, id), LinExpr::scaled(qs, -1.0).term(vs(s), -bmax), 0.0);
                prog.add_le(name("svcmin", j, id), LinExpr::var(qs).term(vs(s), bmin), 0.0);
            }
            LineKind::VscConverter => {}
        }
    }

    for (c, conv) in case.converters.iter().enumerate() {
        let pc_bus = idx.bus(&conv.pc_bus).expect("validated converter");
        let dc_bus = idx.bus(&conv.dc_bus).expect("validated converter");
        let line = idx.converter_line[c].map(|l| &case.lines[l]).expect("validated converter line");
        let k = line.capacity_sq;
        let cap = k.sqrt();
        let id = &conv.id;
        let pc = prog.add_var(name("pc", j, id), -cap, cap);
        let qc = prog.add_var(name("qc", j, id), -cap, cap);
        prog.add_rotated_cone(
            name("thermal", j, id),
            LinExpr::constant(0.5 * k),
            LinExpr::constant(1.0),
            vec![LinExpr::var(pc), LinExpr::var(qc)],
        );
        let csh = prog.add_var(name("pcsh", j, id), 0.0, f64::INFINITY);
        prog.add_eq(name("csh", j, id), LinExpr::var(csh).term(vs(dc_bus), -1.0 / conv.r_shunt), 0.0);
        pbal[dc_bus].add(pc, -1.0);
        pbal[pc_bus].add(pc, 1.0);
        pbal[pc_bus].add(csh, -1.0);
        if let Some(r_sw) = conv.r_sw {
            let sw = prog.add_var(name("psw", j, id), 0.0, f64::INFINITY);
            prog.add_eq(name("sw", j, id), LinExpr::var(sw).term(vs(dc_bus), -1.0 / r_sw), 0.0);
            pbal[pc_bus].add(sw, -1.0);
        }
        if let Some(cse) = p_cse_at_pc[pc_bus] {
            pbal[pc_bus].add(cse, -1.0);
        }
        qbal[pc_bus].add(qc, 1.0);
        // m² = 8·V_pc / V_dc within [m²_min, m²_max].
        prog.add_le(
            name("modmax", j, id),
            LinExpr::scaled(vs(pc_bus), 8.0).term(vs(dc_bus), -conv.m_sq_max),
            0.0,
        );
        prog.add_le(
            name("modmin", j, id),
            LinExpr::scaled(vs(dc_bus), conv.m_sq_min).term(vs(pc_bus), -8.0),
            0.0,
        );
    }

    for (i, bus) in case.buses.iter().enumerate() {
        if !active(i) {
            continue;
        }
        let p = std::mem::take(&mut pbal[i]);
        prog.add_eq(name("pbal", j, &bus.id), p, bus.p_load);
        if bus.kind != BusKind::Dc {
            let q = std::mem::take(&mut qbal[i]);
            prog.add_eq(name("qbal", j, &bus.id), q, bus.q_load);
        }
    }

    BlockVars { shed }

}
