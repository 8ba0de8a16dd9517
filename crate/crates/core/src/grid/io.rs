//! Case document reading and writing.
//!
//! The document carries powers in MW/MVAr (and MVA² for squared ratings),
//! costs per MWh, impedances in per-unit on the system base and voltage
//! limits in pu². Loading converts everything to per-unit on `s_base_mva`.

use serde::{Deserialize, Serialize};

use super::types::*;
use super::validate::{validate, ValidationReport};

pub const CASE_FORMAT: &str = "windflow-case/1";

#[derive(Debug, thiserror::Error)]
pub enum CaseError {
    #[error("case parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported case format {found:?}, expected {CASE_FORMAT:?}")]
    Format { found: String },
    #[error("invalid case:\n{0}")]
    Invalid(ValidationReport),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDocument {
    pub format: String,
    #[serde(default)]
    pub name: String,
    pub s_base_mva: f64,
    #[serde(default)]
    pub voll: Option<f64>,
    pub buses: Vec<BusDoc>,
    #[serde(default)]
    pub lines: Vec<LineDoc>,
    #[serde(default)]
    pub converters: Vec<ConverterDoc>,
    #[serde(default)]
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub wind_farms: Vec<WindFarmDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusDoc {
    pub id: String,
    pub kind: BusKind,
    pub base_kv: f64,
    pub v_min_sq: f64,
    pub v_max_sq: f64,
    #[serde(default)]
    pub shunt_g: f64,
    #[serde(default)]
    pub shunt_b: f64,
    #[serde(default)]
    pub p_load: f64,
    #[serde(default)]
    pub q_load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDoc {
    pub id: String,
    pub kind: LineKind,
    pub from_bus: String,
    pub to_bus: String,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub x: f64,
    pub capacity_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterDoc {
    pub id: String,
    pub pc_bus: String,
    pub dc_bus: String,
    pub r_shunt: f64,
    pub m_sq_min: f64,
    pub m_sq_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub id: String,
    pub bus: String,
    pub p_min: f64,
    pub p_max: f64,
    #[serde(default)]
    pub q_min: f64,
    #[serde(default)]
    pub q_max: f64,
    #[serde(default)]
    pub cost_c0: f64,
    #[serde(default)]
    pub cost_c1: f64,
    #[serde(default)]
    pub cost_c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindFarmDoc {
    pub id: String,
    pub bus: String,
    pub turbines: Vec<TurbineGroup>,
    pub power_factor_min: f64,
    #[serde(default = "default_wake_loss")]
    pub wake_loss: f64,
    #[serde(default)]
    pub cost_c1: f64,
}

fn default_wake_loss() -> f64 {
    DEFAULT_WAKE_LOSS
}

impl CaseDocument {
    /// Converts to per-unit without validating.
    pub fn to_case(&self) -> GridCase {
        let s = self.s_base_mva;
        let generators: Vec<Generator> = self
            .generators
            .iter()
            .map(|g| Generator {
                id: g.id.clone(),
                bus: g.bus.clone(),
                p_min: g.p_min / s,
                p_max: g.p_max / s,
                q_min: g.q_min / s,
                q_max: g.q_max / s,
                cost_c0: g.cost_c0,
                cost_c1: g.cost_c1 * s,
                cost_c2: g.cost_c2 * s * s,
            })
            .collect();
        let voll = match self.voll {
            Some(v) => v * s,
            None => GridCase::default_voll(&generators),
        };
        GridCase {
            name: self.name.clone(),
            s_base: s,
            voll,
            buses: self
                .buses
                .iter()
                .map(|b| Bus {
                    id: b.id.clone(),
                    kind: b.kind,
                    base_kv: b.base_kv,
                    v_min_sq: b.v_min_sq,
                    v_max_sq: b.v_max_sq,
                    shunt_g: b.shunt_g / s,
                    shunt_b: b.shunt_b / s,
                    p_load: b.p_load / s,
                    q_load: b.q_load / s,
                })
                .collect(),
            lines: self
                .lines
                .iter()
                .map(|l| Line {
                    id: l.id.clone(),
                    kind: l.kind,
                    from_bus: l.from_bus.clone(),
                    to_bus: l.to_bus.clone(),
                    r: l.r,
                    x: l.x,
                    capacity_sq: l.capacity_sq / (s * s),
                    b_min: l.b_min.map(|b| b / s),
                    b_max: l.b_max.map(|b| b / s),
                })
                .collect(),
            converters: self
                .converters
                .iter()
                .map(|c| Converter {
                    id: c.id.clone(),
                    pc_bus: c.pc_bus.clone(),
                    dc_bus: c.dc_bus.clone(),
                    r_shunt: c.r_shunt,
                    m_sq_min: c.m_sq_min,
                    m_sq_max: c.m_sq_max,
                    r_sw: c.r_sw,
                })
                .collect(),
            generators,
            wind_farms: self
                .wind_farms
                .iter()
                .map(|w| WindFarm {
                    id: w.id.clone(),
                    bus: w.bus.clone(),
                    turbines: w.turbines.clone(),
                    power_factor_min: w.power_factor_min,
                    wake_loss: w.wake_loss,
                    cost_c1: w.cost_c1 * s,
                })
                .collect(),
        }
    }

    /// Converts a per-unit case back to physical units.
    pub fn from_case(case: &GridCase) -> Self {
        let s = case.s_base;
        CaseDocument {
            format: CASE_FORMAT.to_string(),
            name: case.name.clone(),
            s_base_mva: s,
            voll: Some(case.voll / s),
            buses: case
                .buses
                .iter()
                .map(|b| BusDoc {
                    id: b.id.clone(),
                    kind: b.kind,
                    base_kv: b.base_kv,
                    v_min_sq: b.v_min_sq,
                    v_max_sq: b.v_max_sq,
                    shunt_g: b.shunt_g * s,
                    shunt_b: b.shunt_b * s,
                    p_load: b.p_load * s,
                    q_load: b.q_load * s,
                })
                .collect(),
            lines: case
                .lines
                .iter()
                .map(|l| LineDoc {
                    id: l.id.clone(),
                    kind: l.kind,
                    from_bus: l.from_bus.clone(),
                    to_bus: l.to_bus.clone(),
                    r: l.r,
                    x: l.x,
                    capacity_sq: l.capacity_sq * s * s,
                    b_min: l.b_min.map(|b| b * s),
                    b_max: l.b_max.map(|b| b * s),
                })
                .collect(),
            converters: case
                .converters
                .iter()
                .map(|c| ConverterDoc {
                    id: c.id.clone(),
                    pc_bus: c.pc_bus.clone(),
                    dc_bus: c.dc_bus.clone(),
                    r_shunt: c.r_shunt,
                    m_sq_min: c.m_sq_min,
                    m_sq_max: c.m_sq_max,
                    r_sw: c.r_sw,
                })
                .collect(),
            generators: case
                .generators
                .iter()
                .map(|g| GeneratorDoc {
                    id: g.id.clone(),
                    bus: g.bus.clone(),
                    p_min: g.p_min * s,
                    p_max: g.p_max * s,
                    q_min: g.q_min * s,
                    q_max: g.q_max * s,
                    cost_c0: g.cost_c0,
                    cost_c1: g.cost_c1 / s,
                    cost_c2: g.cost_c2 / (s * s),
                })
                .collect(),
            wind_farms: case
                .wind_farms
                .iter()
                .map(|w| WindFarmDoc {
                    id: w.id.clone(),
                    bus: w.bus.clone(),
                    turbines: w.turbines.clone(),
                    power_factor_min: w.power_factor_min,
                    wake_loss: w.wake_loss,
                    cost_c1: w.cost_c1 / s,
                })
                .collect(),
        }
    }
}

/// Parses and validates a case document.
pub fn load_case(text: &str) -> Result<GridCase, CaseError> {
    let doc: CaseDocument = serde_json::from_str(text).map_err(|e| CaseError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format != CASE_FORMAT {
        return Err(CaseError::Format { found: doc.format });
    }
    let case = doc.to_case();
    let report = validate(&case);
    if report.is_empty() {
        Ok(case)
    } else {
        Err(CaseError::Invalid(report))
    }
}

pub fn load_case_file(path: impl AsRef<std::path::Path>) -> Result<GridCase, CaseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_case(&text)
}

/// Serializes a case to a pretty-printed document in physical units.
pub fn serialize_case(case: &GridCase) -> String {
    serde_json::to_string_pretty(&CaseDocument::from_case(case)).expect("case documents always serialize")
}
