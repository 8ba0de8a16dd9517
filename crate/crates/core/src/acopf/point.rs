use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::conic::{ConicProgram, Solution, SolveStatus};
use crate::grid::{GridCase, LineKind};

use super::block::name;

/// Voltages below this (pu²) are treated as a solver tolerance breach.
const NEGATIVE_V_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusState {
    pub id: String,
    /// Squared voltage magnitude, pu².
    pub v_sq: f64,
    pub v: f64,
    pub theta: f64,
    pub shed: f64,
    pub spill: f64,
    /// Active injection from the balance slack, pu.
    #[serde(default)]
    pub shortfall: f64,
    /// Net reactive injection from the balance slacks, pu.
    #[serde(default)]
    pub q_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineState {
    pub id: String,
    pub kind: LineKind,
    pub p_s: f64,
    pub q_s: f64,
    pub p_loss: f64,
    pub q_loss: f64,
    pub theta: f64,
    /// Converter series loss carried by a coupling transformer.
    pub p_cse: f64,
    /// Sending-end current of a DC line.
    pub current: Option<f64>,
    /// SVC susceptance.
    pub susceptance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionState {
    pub id: String,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverterState {
    pub id: String,
    /// Power drawn from the DC bus.
    pub p: f64,
    /// Reactive output at the PC bus.
    pub q: f64,
    pub p_shunt: f64,
    pub p_switch: f64,
}

/// Physical quantities recovered from one scenario of a solved program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub scenario: usize,
    pub buses: Vec<BusState>,
    pub lines: Vec<LineState>,
    pub generators: Vec<InjectionState>,
    pub wind_farms: Vec<InjectionState>,
    pub converters: Vec<ConverterState>,
    /// Largest `|θ_l − (θ_s − θ_r)|` over AC branches; zero on radial networks.
    pub angle_cycle_residual: f64,
}

impl OperatingPoint {
    pub fn total_shed(&self) -> f64 {
        self.buses.iter().map(|b| b.shed).sum()
    }

    /// Active and reactive slack usage, pu.
    pub fn total_slack(&self) -> f64 {
        self.buses.iter().map(|b| b.shortfall + b.q_slack.abs()).sum()
    }

    pub fn total_wind(&self) -> f64 {
        self.wind_farms.iter().map(|f| f.p).sum()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoverError {
    #[error("solution status is {0:?}, not optimal")]
    NotOptimal(SolveStatus),
    #[error("bus {bus} has negative squared voltage {value:e}")]
    NegativeVoltage { bus: String, value: f64 },
}

/// Recovers the deterministic operating point (scenario 0).
pub fn recover_physical(case: &GridCase, program: &ConicProgram, solution: &Solution) -> Result<OperatingPoint, RecoverError> {
    recover_scenario(case, program, solution, 0)
}

/// Recovers scenario `j` of a solved SOC, DC or stochastic program.
pub fn recover_scenario(
    case: &GridCase,
    program: &ConicProgram,
    solution: &Solution,
    j: usize,
) -> Result<OperatingPoint, RecoverError> {
    if !solution.is_optimal() {
        return Err(RecoverError::NotOptimal(solution.status));
    }
    let idx = case.index();
    let get = |kind: &str, id: &str| solution.value_of(program, &name(kind, j, id));
    let val = |kind: &str, id: &str| get(kind, id).unwrap_or(0.0);
    let dc_model = case
        .buses
        .iter()
        .any(|b| get("va", &b.id).is_some());

    let mut buses = Vec::with_capacity(case.buses.len());
    for bus in &case.buses {
        let v_sq = if dc_model { 1.0 } else { get("V", &bus.id).unwrap_or(1.0) };
        if v_sq < -NEGATIVE_V_TOL {
            return Err(RecoverError::NegativeVoltage {
                bus: bus.id.clone(),
                value: v_sq,
            });
        }
        let v_sq = v_sq.max(0.0);
        buses.push(BusState {
            id: bus.id.clone(),
            v_sq,
            v: v_sq.sqrt(),
            theta: val("va", &bus.id),
            shed: val("shed", &bus.id),
            spill: val("spill", &bus.id),
            shortfall: val("short", &bus.id),
            q_slack: val("qshort", &bus.id) - val("qspill", &bus.id),
        });
    }

    let mut lines = Vec::with_capacity(case.lines.len());
    for (l, line) in case.lines.iter().enumerate() {
        let id = &line.id;
        let mut st = LineState {
            id: id.clone(),
            kind: line.kind,
            p_s: val("ps", id),
            q_s: val("qs", id),
            p_loss: val("pl", id),
            q_loss: val("ql", id),
            theta: 0.0,
            p_cse: val("pcse", id),
            current: None,
            susceptance: None,
        };
        let s = idx.line_from[l];
        let r = idx.line_to[l];
        match line.kind {
            LineKind::Ac => {
                st.theta = if dc_model {
                    buses[s].theta - buses[r].theta
                } else {
                    val("th", id)
                };
            }
            LineKind::PcTransformer => {
                st.theta = if dc_model {
                    buses[s].theta - buses[r].theta
                } else {
                    line.x * st.p_s - line.r * st.q_s
                };
            }
            LineKind::DcMono | LineKind::DcBi => {
                let v = buses[s].v;
                let poles = if line.kind == LineKind::DcBi { 2.0 } else { 1.0 };
                st.current = Some(if v > 0.0 { st.p_s / (poles * v) } else { 0.0 });
            }
            LineKind::Svc => {
                let v_sq = buses[s].v_sq;
                st.susceptance = Some(if v_sq > 0.0 { -st.q_s / v_sq } else { 0.0 });
            }
            LineKind::VscConverter => {}
        }
        lines.push(st);
    }

    // A converter line carries its converter's flows.
    for (c, conv) in case.converters.iter().enumerate() {
        if let Some(l) = idx.converter_line[c] {
            lines[l].p_s = val("pc", &conv.id);
            lines[l].q_s = val("qc", &conv.id);
        }
    }

    let angle_cycle_residual = if dc_model {
        0.0
    } else {
        assign_bus_angles(case, &mut buses, &lines)
    };

    let generators = case
        .generators
        .iter()
        .map(|g| InjectionState {
            id: g.id.clone(),
            p: get("pg", &g.id).or_else(|| solution.value_of(program, &format!("pg:{}", g.id))).unwrap_or(0.0),
            q: val("qg", &g.id),
        })
        .collect();
    let wind_farms = case
        .wind_farms
        .iter()
        .map(|f| InjectionState {
            id: f.id.clone(),
            p: val("pw", &f.id),
            q: val("qw", &f.id),
        })
        .collect();
    let converters = case
        .converters
        .iter()
        .map(|c| ConverterState {
            id: c.id.clone(),
            p: val("pc", &c.id),
            q: val("qc", &c.id),
            p_shunt: val("pcsh", &c.id),
            p_switch: val("psw", &c.id),
        })
        .collect();

    Ok(OperatingPoint {
        scenario: j,
        buses,
        lines,
        generators,
        wind_farms,
        converters,
        angle_cycle_residual,
    })
}

/// Propagates line angles from the slack bus along a BFS spanning tree of AC
/// branches and returns the largest mismatch on the remaining branches.
fn assign_bus_angles(case: &GridCase, buses: &mut [BusState], lines: &[LineState]) -> f64 {
    let idx = case.index();
    let n = buses.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (l, line) in case.lines.iter().enumerate() {
        if line.kind.is_ac_branch() {
            adj[idx.line_from[l]].push((l, idx.line_to[l]));
            adj[idx.line_to[l]].push((l, idx.line_from[l]));
        }
    }
    let mut seen = vec![false; n];
    let mut roots: Vec<usize> = case.slack_bus().into_iter().collect();
    roots.extend(0..n);
    for root in roots {
        if seen[root] || adj[root].is_empty() {
            continue;
        }
        seen[root] = true;
        buses[root].theta = 0.0;
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            for &(l, other) in &adj[b] {
                if seen[other] {
                    continue;
                }
                seen[other] = true;
                let th = lines[l].theta;
                buses[other].theta = if idx.line_from[l] == b {
                    buses[b].theta - th
                } else {
                    buses[b].theta + th
                };
                queue.push_back(other);
            }
        }
    }
    case.lines
        .iter()
        .enumerate()
        .filter(|(_, line)| line.kind.is_ac_branch())
        .map(|(l, _)| (lines[l].theta - (buses[idx.line_from[l]].theta - buses[idx.line_to[l]].theta)).abs())
        .fold(0.0, f64::max)
}
