// Checks are written as `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Element the check failed on, e.g. `"line SVC9"`.
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            subject: subject.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.subject, v.message)?;
        }
        Ok(())
    }
}

fn check_unique<'a>(report: &mut ValidationReport, what: &str, ids: impl Iterator<Item = &'a str>) {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            report.push(format!("{what} {id}"), "duplicate id");
        }
    }
}

/// Checks every case invariant and reports all failures.
pub fn validate(case: &GridCase) -> ValidationReport {
    let mut report = ValidationReport::default();
    let idx = case.index();
    let n = case.buses.len();

    if !(case.s_base > 0.0) {
        report.push("case", "s_base must be positive");
    }
    if !(case.voll > 0.0) {
        report.push("case", "voll must be positive");
    }

    check_unique(&mut report, "bus", case.buses.iter().map(|b| b.id.as_str()));
    check_unique(&mut report, "line", case.lines.iter().map(|l| l.id.as_str()));
    check_unique(&mut report, "converter", case.converters.iter().map(|c| c.id.as_str()));
    check_unique(&mut report, "generator", case.generators.iter().map(|g| g.id.as_str()));
    check_unique(&mut report, "wind farm", case.wind_farms.iter().map(|w| w.id.as_str()));

    for b in &case.buses {
        let subject = format!("bus {}", b.id);
        if !(b.v_min_sq > 0.0 && b.v_min_sq <= b.v_max_sq) {
            report.push(&subject, format!("need 0 < v_min_sq <= v_max_sq, got [{}, {}]", b.v_min_sq, b.v_max_sq));
        }
        if b.kind != BusKind::Ac && b.q_load != 0.0 {
            report.push(&subject, format!("{:?} bus must have q_load = 0, got {}", b.kind, b.q_load));
        }
    }

    // converters per PC bus
    let mut pc_pairs: HashMap<usize, usize> = HashMap::new();
    for c in &case.converters {
        if let Some(pc) = idx.bus(&c.pc_bus) {
            *pc_pairs.entry(pc).or_default() += 1;
        }
    }
    for (i, b) in case.buses.iter().enumerate() {
        if b.kind == BusKind::Pc {
            let count = pc_pairs.get(&i).copied().unwrap_or(0);
            if count != 1 {
                report.push(format!("bus {}", b.id), format!("PC bus must pair with exactly one converter, found {count}"));
            }
            let transformers = case
                .lines
                .iter()
                .enumerate()
                .filter(|(l, line)| line.kind == LineKind::PcTransformer && idx.line_from[*l] == i)
                .count();
            if transformers != 1 {
                report.push(
                    format!("bus {}", b.id),
                    format!("PC bus must send exactly one PC_TRANSFORMER line, found {transformers}"),
                );
            }
        }
    }

    let kind_of = |bus: usize| case.buses[bus].kind;
    for (l, line) in case.lines.iter().enumerate() {
        let subject = format!("line {}", line.id);
        let (f, t) = (idx.line_from[l], idx.line_to[l]);
        if f >= n {
            report.push(&subject, format!("unknown from_bus {}", line.from_bus));
        }
        if t >= n {
            report.push(&subject, format!("unknown to_bus {}", line.to_bus));
        }
        if f == t && f < n {
            report.push(&subject, "line endpoints coincide");
        }
        if !(line.r >= 0.0) {
            report.push(&subject, format!("resistance must be >= 0, got {}", line.r));
        }
        if !(line.capacity_sq > 0.0) {
            report.push(&subject, format!("capacity_sq must be > 0, got {}", line.capacity_sq));
        }
        if f >= n || t >= n {
            continue;
        }
        match line.kind {
            LineKind::Ac => {
                if !(line.x > 0.0) {
                    report.push(&subject, format!("AC line needs x > 0, got {}", line.x));
                }
                if !kind_of(f).is_ac() || !kind_of(t).is_ac() {
                    report.push(&subject, "AC line must join AC/PC buses");
                }
            }
            LineKind::DcMono | LineKind::DcBi => {
                if line.x != 0.0 {
                    report.push(&subject, format!("DC line must have x = 0, got {}", line.x));
                }
                if kind_of(f) != BusKind::Dc || kind_of(t) != BusKind::Dc {
                    report.push(&subject, "DC line must join DC buses");
                }
            }
            LineKind::VscConverter => {
                if kind_of(f) != BusKind::Dc || kind_of(t) != BusKind::Pc {
                    report.push(&subject, "converter line must run from a DC bus to a PC bus");
                }
                let owned = case
                    .converters
                    .iter()
                    .any(|c| idx.bus(&c.dc_bus) == Some(f) && idx.bus(&c.pc_bus) == Some(t));
                if !owned {
                    report.push(&subject, "no converter record matches this converter line");
                }
            }
            LineKind::PcTransformer => {
                if !(line.x > 0.0) {
                    report.push(&subject, format!("coupling transformer needs x > 0, got {}", line.x));
                }
                if kind_of(f) != BusKind::Pc || kind_of(t) != BusKind::Ac {
                    report.push(&subject, "PC_TRANSFORMER must run from a PC bus to an AC bus");
                }
            }
            LineKind::Svc => {
                match (line.b_min, line.b_max) {
                    (Some(lo), Some(hi)) if lo <= hi => {}
                    (Some(lo), Some(hi)) => {
                        report.push(&subject, format!("SVC needs b_min <= b_max, got [{lo}, {hi}]"))
                    }
                    _ => report.push(&subject, "SVC needs b_min and b_max"),
                }
                if !kind_of(f).is_ac() {
                    report.push(&subject, "SVC must attach to an AC bus");
                }
                let touches = idx
                    .line_from
                    .iter()
                    .chain(idx.line_to.iter())
                    .filter(|&&b| b == t)
                    .count();
                let terminal = &case.buses[t];
                if touches != 1
                    || !idx.gens_at[t].is_empty()
                    || !idx.farms_at[t].is_empty()
                    || terminal.p_load != 0.0
                    || terminal.q_load != 0.0
                {
                    report.push(&subject, format!("SVC terminal {} must be dangling", terminal.id));
                }
            }
        }
    }

    for (c, conv) in case.converters.iter().enumerate() {
        let subject = format!("converter {}", conv.id);
        match idx.bus(&conv.pc_bus) {
            Some(b) if case.buses[b].kind == BusKind::Pc => {}
            _ => report.push(&subject, format!("pc_bus {} must be a PC bus", conv.pc_bus)),
        }
        match idx.bus(&conv.dc_bus) {
            Some(b) if case.buses[b].kind == BusKind::Dc => {}
            _ => report.push(&subject, format!("dc_bus {} must be a DC bus", conv.dc_bus)),
        }
        if !(conv.r_shunt > 0.0) {
            report.push(&subject, format!("r_shunt must be > 0, got {}", conv.r_shunt));
        }
        if !(0.25 <= conv.m_sq_min && conv.m_sq_min <= conv.m_sq_max && conv.m_sq_max <= 1.0) {
            report.push(
                &subject,
                format!(
                    "squared modulation bounds [{}, {}] violate 0.5 <= m <= 1",
                    conv.m_sq_min, conv.m_sq_max
                ),
            );
        }
        if let Some(r_sw) = conv.r_sw {
            if !(r_sw > 0.0) {
                report.push(&subject, format!("r_sw must be > 0, got {r_sw}"));
            }
        }
        if idx.converter_line[c].is_none() {
            report.push(&subject, "missing VSC_CONVERTER line from dc_bus to pc_bus");
        }
    }

    for g in &case.generators {
        let subject = format!("generator {}", g.id);
        if idx.bus(&g.bus).is_none() {
            report.push(&subject, format!("unknown bus {}", g.bus));
        }
        if !(g.p_min <= g.p_max) {
            report.push(&subject, "p_min > p_max");
        }
        if !(g.q_min <= g.q_max) {
            report.push(&subject, "q_min > q_max");
        }
        if !(g.cost_c2 >= 0.0) {
            report.push(&subject, "cost_c2 must be >= 0");
        }
    }

    for w in &case.wind_farms {
        let subject = format!("wind farm {}", w.id);
        if idx.bus(&w.bus).is_none() {
            report.push(&subject, format!("unknown bus {}", w.bus));
        }
        if !(0.0..1.0).contains(&w.wake_loss) {
            report.push(&subject, format!("wake_loss must lie in [0, 1), got {}", w.wake_loss));
        }
        if w.turbines.is_empty() {
            report.push(&subject, "no turbines");
        }
        if w.turbines.iter().any(|t| t.count == 0) {
            report.push(&subject, "turbine counts must be >= 1");
        }
        if !(w.power_factor_min > 0.0 && w.power_factor_min <= 1.0) {
            report.push(&subject, "power_factor_min must lie in (0, 1]");
        }
    }

    check_ac_connectivity(case, &idx, &mut report);
    check_dc_islands(case, &idx, &mut report);
    report
}

fn components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn check_ac_connectivity(case: &GridCase, idx: &CaseIndex, report: &mut ValidationReport) {
    let n = case.buses.len();
    let edges = case.lines.iter().enumerate().filter_map(|(l, line)| {
        let (f, t) = (idx.line_from[l], idx.line_to[l]);
        (f < n && t < n && (line.kind.is_ac_branch() || line.kind == LineKind::Svc)).then_some((f, t))
    });
    let comp = components(n, edges);
    let ac: Vec<usize> = (0..n).filter(|&i| case.buses[i].kind.is_ac()).collect();
    if let Some(&first) = ac.first() {
        let islands: HashSet<usize> = ac.iter().map(|&i| comp[i]).collect();
        if islands.len() > 1 {
            let stray: Vec<&str> = ac
                .iter()
                .filter(|&&i| comp[i] != comp[first])
                .map(|&i| case.buses[i].id.as_str())
                .collect();
            report.push("case", format!("AC network is not connected; unreachable buses: {}", stray.join(", ")));
        }
    }
}

fn check_dc_islands(case: &GridCase, idx: &CaseIndex, report: &mut ValidationReport) {
    let n = case.buses.len();
    let edges = case.lines.iter().enumerate().filter_map(|(l, line)| {
        let (f, t) = (idx.line_from[l], idx.line_to[l]);
        (f < n && t < n && line.kind.is_dc()).then_some((f, t))
    });
    let comp = components(n, edges);
    let with_converter: HashSet<usize> = (0..n)
        .filter(|&i| !idx.converters_at_dc[i].is_empty())
        .map(|i| comp[i])
        .collect();
    for (i, b) in case.buses.iter().enumerate() {
        if b.kind == BusKind::Dc && !with_converter.contains(&comp[i]) {
            report.push(format!("bus {}", b.id), "DC bus has no path to a converter");
        }
    }
}
