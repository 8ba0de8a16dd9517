use std::io;

use serde::{Deserialize, Serialize};

use crate::grid::{BusKind, GridCase, LineKind};

use super::point::OperatingPoint;

/// Largest absolute residual of each exact AC equation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub case: String,
    pub model: String,
    /// Active power balance.
    #[serde(rename = "1a")]
    pub balance_p: f64,
    /// Reactive power balance.
    #[serde(rename = "1b")]
    pub balance_q: f64,
    /// Active loss `p_loss = (p² + q²)/v² · R`.
    #[serde(rename = "1c")]
    pub loss_p: f64,
    /// Reactive loss `q_loss = (p² + q²)/v² · X`.
    #[serde(rename = "1d")]
    pub loss_q: f64,
    /// Voltage drop.
    #[serde(rename = "1e")]
    pub voltage_drop: f64,
    /// Angle relation `v_s v_r sin θ = X p − R q`.
    #[serde(rename = "1f")]
    pub angle: f64,
}

impl GapReport {
    pub const FAMILIES: [&'static str; 6] = ["1a", "1b", "1c", "1d", "1e", "1f"];

    pub fn families(&self) -> [(&'static str, f64); 6] {
        [
            ("1a", self.balance_p),
            ("1b", self.balance_q),
            ("1c", self.loss_p),
            ("1d", self.loss_q),
            ("1e", self.voltage_drop),
            ("1f", self.angle),
        ]
    }

    pub fn get(&self, family: &str) -> Option<f64> {
        self.families().into_iter().find(|(f, _)| *f == family).map(|(_, v)| v)
    }
}

/// Evaluates the exact nonconvex AC equations at `point`.
///
/// Balances cover AC and PC buses; loss, drop and angle families cover AC
/// lines and coupling transformers.
pub fn feasibility_gap(case: &GridCase, point: &OperatingPoint, model: &str) -> GapReport {
    let idx = case.index();
    let nb = case.buses.len();
    let mut p_net = vec![0.0; nb];
    let mut q_net = vec![0.0; nb];

    for (i, bus) in case.buses.iter().enumerate() {
        let st = &point.buses[i];
        let v2 = st.v * st.v;
        let shed_q = if bus.p_load > 0.0 { st.shed * bus.q_load / bus.p_load } else { 0.0 };
        p_net[i] += st.shed + st.shortfall - st.spill - bus.p_load - bus.shunt_g * v2;
        q_net[i] += shed_q + st.q_slack - bus.q_load + bus.shunt_b * v2;
    }
    for (g, gen) in case.generators.iter().enumerate() {
        if let Some(b) = idx.bus(&gen.bus) {
            p_net[b] += point.generators[g].p;
            q_net[b] += point.generators[g].q;
        }
    }
    for (e, farm) in case.wind_farms.iter().enumerate() {
        if let Some(b) = idx.bus(&farm.bus) {
            p_net[b] += point.wind_farms[e].p;
            q_net[b] += point.wind_farms[e].q;
        }
    }
    for (l, line) in case.lines.iter().enumerate() {
        let st = &point.lines[l];
        let (s, r) = (idx.line_from[l], idx.line_to[l]);
        match line.kind {
            LineKind::Ac | LineKind::PcTransformer | LineKind::DcMono | LineKind::DcBi => {
                p_net[s] -= st.p_s;
                p_net[r] += st.p_s - st.p_loss;
                q_net[s] -= st.q_s;
                q_net[r] += st.q_s - st.q_loss;
                if line.kind == LineKind::PcTransformer {
                    p_net[s] -= st.p_cse;
                }
            }
            LineKind::Svc => q_net[s] -= st.q_s,
            LineKind::VscConverter => {}
        }
    }
    for (c, conv) in case.converters.iter().enumerate() {
        let st = &point.converters[c];
        let pc = idx.bus(&conv.pc_bus).expect("validated");
        p_net[pc] += st.p - st.p_shunt - st.p_switch;
        q_net[pc] += st.q;
    }

    let mut report = GapReport {
        case: case.name.clone(),
        model: model.to_string(),
        balance_p: 0.0,
        balance_q: 0.0,
        loss_p: 0.0,
        loss_q: 0.0,
        voltage_drop: 0.0,
        angle: 0.0,
    };
    for (i, bus) in case.buses.iter().enumerate() {
        if bus.kind == BusKind::Dc || idx.svc_terminal[i] {
            continue;
        }
        report.balance_p = report.balance_p.max(p_net[i].abs());
        report.balance_q = report.balance_q.max(q_net[i].abs());
    }
    for (l, line) in case.lines.iter().enumerate() {
        if !line.kind.is_ac_branch() {
            continue;
        }
        let st = &point.lines[l];
        let vs = point.buses[idx.line_from[l]].v;
        let vr = point.buses[idx.line_to[l]].v;
        let s2 = st.p_s * st.p_s + st.q_s * st.q_s;
        let flow = if vs > 0.0 { s2 / (vs * vs) } else { f64::INFINITY };
        report.loss_p = report.loss_p.max((st.p_loss - flow * line.r).abs());
        report.loss_q = report.loss_q.max((st.q_loss - flow * line.x).abs());
        let drop = vs * vs - vr * vr - (2.0 * (line.r * st.p_s + line.x * st.q_s) - line.r * st.p_loss - line.x * st.q_loss);
        report.voltage_drop = report.voltage_drop.max(drop.abs());
        let angle = vs * vr * st.theta.sin() - (line.x * st.p_s - line.r * st.q_s);
        report.angle = report.angle.max(angle.abs());
    }
    report
}

/// Writes one `case,model,family,gap` row per family and report.
pub fn write_gap_csv<W: io::Write>(reports: &[GapReport], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["case", "model", "family", "gap"])?;
    for r in reports {
        for (family, gap) in r.families() {
            w.write_record([r.case.as_str(), r.model.as_str(), family, &format!("{gap:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
