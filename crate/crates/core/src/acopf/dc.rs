//! Lossless B-θ dispatch used as the comparison baseline.

use crate::conic::{ConicProgram, LinExpr};
use crate::grid::{GridCase, LineKind};

use super::block::{name, FarmLimits};
use super::soc::{add_generators, check_case, check_wind};
use super::AcopfError;

/// DC-OPF with every wind farm held at zero output.
pub fn build_dc_opf(case: &GridCase) -> Result<ConicProgram, AcopfError> {
    build_dc_opf_with_wind(case, &vec![FarmLimits::ZERO; case.wind_farms.len()])
}

/// Flows `p = (θ_s − θ_r)/X` on AC branches, unit voltages, no reactive
/// power; DC lines and converters move power without loss.
pub fn build_dc_opf_with_wind(case: &GridCase, wind: &[FarmLimits]) -> Result<ConicProgram, AcopfError> {
    check_case(case)?;
    check_wind(case, wind)?;
    let idx = case.index();
    let slack = case.slack_bus();
    let mut prog = ConicProgram::new();
    let pg = add_generators(&mut prog, case);
    let nb = case.buses.len();
    let mut bal = vec![LinExpr::new(); nb];

    let mut va = vec![None; nb];
    for (i, bus) in case.buses.iter().enumerate() {
        if bus.kind.is_ac() && !idx.svc_terminal[i] {
            let (lo, hi) = if Some(i) == slack {
                (0.0, 0.0)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            };
            va[i] = Some(prog.add_var(name("va", 0, &bus.id), lo, hi));
        }
    }
    for (g, gen) in case.generators.iter().enumerate() {
        if let Some(b) = idx.bus(&gen.bus) {
            bal[b].add(pg[g], 1.0);
        }
    }
    for (e, farm) in case.wind_farms.iter().enumerate() {
        let b = idx.bus(&farm.bus).expect("validated farm bus");
        let p = prog.add_var(name("pw", 0, &farm.id), wind[e].p_min, wind[e].p_max);
        prog.add_linear_cost(p, farm.cost_c1);
        bal[b].add(p, 1.0);
    }
    for (l, line) in case.lines.iter().enumerate() {
        let (s, r) = (idx.line_from[l], idx.line_to[l]);
        let cap = line.capacity();
        match line.kind {
            LineKind::Ac | LineKind::PcTransformer | LineKind::DcMono | LineKind::DcBi => {
                let ps = prog.add_var(name("ps", 0, &line.id), -cap, cap);
                bal[s].add(ps, -1.0);
                bal[r].add(ps, 1.0);
                if line.kind.is_ac_branch() {
                    let (vs, vr) = (va[s].expect("AC bus angle"), va[r].expect("AC bus angle"));
                    prog.add_eq(
                        name("flow", 0, &line.id),
                        LinExpr::scaled(ps, line.x).term(vs, -1.0).term(vr, 1.0),
                        0.0,
                    );
                }
            }
            LineKind::VscConverter | LineKind::Svc => {}
        }
    }
    for (c, conv) in case.converters.iter().enumerate() {
        let cap = idx.converter_line[c].map(|l| case.lines[l].capacity()).unwrap_or(0.0);
        let pc = prog.add_var(name("pc", 0, &conv.id), -cap, cap);
        bal[idx.bus(&conv.dc_bus).expect("validated")].add(pc, -1.0);
        bal[idx.bus(&conv.pc_bus).expect("validated")].add(pc, 1.0);
    }
    for (i, bus) in case.buses.iter().enumerate() {
        if idx.svc_terminal[i] {
            continue;
        }
        let e = std::mem::take(&mut bal[i]);
        prog.add_eq(name("pbal", 0, &bus.id), e, bus.p_load + bus.shunt_g);
    }
    Ok(prog)
}
