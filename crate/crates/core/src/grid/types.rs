use serde::{Deserialize, Serialize};

/// Electrical nature of a bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BusKind {
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "DC")]
    Dc,
    /// Converter-side AC bus behind a coupling transformer.
    #[serde(rename = "PC")]
    Pc,
}

impl BusKind {
    /// AC and PC buses both obey the AC balance equations.
    pub fn is_ac(self) -> bool {
        matches!(self, BusKind::Ac | BusKind::Pc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineKind {
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "DC_MONO")]
    DcMono,
    #[serde(rename = "DC_BI")]
    DcBi,
    /// DC bus to PC bus; `r` holds the converter series resistance.
    #[serde(rename = "VSC_CONVERTER")]
    VscConverter,
    /// PC bus to the point of common coupling.
    #[serde(rename = "PC_TRANSFORMER")]
    PcTransformer,
    /// AC bus to a dangling device terminal.
    #[serde(rename = "SVC")]
    Svc,
}

impl LineKind {
    /// Lines carrying complex power with an impedance (AC branches and coupling transformers).
    pub fn is_ac_branch(self) -> bool {
        matches!(self, LineKind::Ac | LineKind::PcTransformer)
    }

    pub fn is_dc(self) -> bool {
        matches!(self, LineKind::DcMono | LineKind::DcBi)
    }
}

/// Bus data in per-unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub kind: BusKind,
    pub base_kv: f64,
    pub v_min_sq: f64,
    pub v_max_sq: f64,
    pub shunt_g: f64,
    pub shunt_b: f64,
    pub p_load: f64,
    pub q_load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub kind: LineKind,
    pub from_bus: String,
    pub to_bus: String,
    pub r: f64,
    pub x: f64,
    /// Squared apparent-power rating, pu².
    pub capacity_sq: f64,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
}

impl Line {
    pub fn capacity(&self) -> f64 {
        self.capacity_sq.sqrt()
    }
}

/// A VSC station (MTDC terminal or STATCOM).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Converter {
    pub id: String,
    pub pc_bus: String,
    pub dc_bus: String,
    pub r_shunt: f64,
    pub m_sq_min: f64,
    pub m_sq_max: f64,
    /// Switching-loss resistance; present only for STATCOMs.
    pub r_sw: Option<f64>,
}

impl Converter {
    pub fn is_statcom(&self) -> bool {
        self.r_sw.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub cost_c0: f64,
    pub cost_c1: f64,
    pub cost_c2: f64,
}

impl Generator {
    pub fn cost(&self, p: f64) -> f64 {
        self.cost_c0 + self.cost_c1 * p + self.cost_c2 * p * p
    }

    pub fn marginal_cost(&self, p: f64) -> f64 {
        self.cost_c1 + 2.0 * self.cost_c2 * p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurbineGroup {
    pub model: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindFarm {
    pub id: String,
    pub bus: String,
    pub turbines: Vec<TurbineGroup>,
    pub power_factor_min: f64,
    pub wake_loss: f64,
    pub cost_c1: f64,
}

impl WindFarm {
    pub fn turbine_count(&self) -> u32 {
        self.turbines.iter().map(|t| t.count).sum()
    }
}

pub const DEFAULT_WAKE_LOSS: f64 = 0.15;

/// A hybrid AC/DC network in per-unit on `s_base`.
///
/// Immutable after loading; builders index it through [`CaseIndex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    pub name: String,
    pub s_base: f64,
    /// Load-shedding penalty, $/pu.
    pub voll: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub converters: Vec<Converter>,
    pub generators: Vec<Generator>,
    pub wind_farms: Vec<WindFarm>,
}

impl GridCase {
    /// Default penalty: 100 times the largest generator marginal cost at `p_max`.
    pub fn default_voll(generators: &[Generator]) -> f64 {
        let worst = generators
            .iter()
            .map(|g| g.marginal_cost(g.p_max))
            .fold(0.0_f64, f64::max);
        100.0 * worst.max(1.0)
    }

    pub fn index(&self) -> CaseIndex {
        CaseIndex::new(self)
    }

    /// Index of the angle reference bus: the first AC bus (in bus order) hosting a generator.
    pub fn slack_bus(&self) -> Option<usize> {
        let idx = self.index();
        let mut hosts: Vec<usize> = self
            .generators
            .iter()
            .filter_map(|g| idx.bus(&g.bus))
            .filter(|&b| self.buses[b].kind == BusKind::Ac)
            .collect();
        hosts.sort_unstable();
        hosts.first().copied()
    }

    pub fn total_load(&self) -> f64 {
        self.buses.iter().map(|b| b.p_load).sum()
    }

    pub fn topology(&self) -> Topology {
        let idx = self.index();
        let svc_terminals = idx.svc_terminal.iter().filter(|t| **t).count();
        let mtdc_terminals = self
            .buses
            .iter()
            .enumerate()
            .filter(|(i, b)| {
                b.kind == BusKind::Dc
                    && self.lines.iter().any(|l| {
                        l.kind.is_dc() && (idx.bus(&l.from_bus) == Some(*i) || idx.bus(&l.to_bus) == Some(*i))
                    })
            })
            .count();
        let count = |k: LineKind| self.lines.iter().filter(|l| l.kind == k).count();
        Topology {
            ac_buses: self
                .buses
                .iter()
                .enumerate()
                .filter(|(i, b)| b.kind == BusKind::Ac && !idx.svc_terminal[*i])
                .count(),
            pc_buses: self.buses.iter().filter(|b| b.kind == BusKind::Pc).count(),
            dc_buses: self.buses.iter().filter(|b| b.kind == BusKind::Dc).count(),
            mtdc_terminals,
            svc_terminals,
            ac_lines: count(LineKind::Ac),
            dc_mono_lines: count(LineKind::DcMono),
            dc_bi_lines: count(LineKind::DcBi),
            converter_lines: count(LineKind::VscConverter),
            pc_transformers: count(LineKind::PcTransformer),
            svcs: count(LineKind::Svc),
            statcoms: self.converters.iter().filter(|c| c.is_statcom()).count(),
            mtdc_stations: self.converters.iter().filter(|c| !c.is_statcom()).count(),
            generators: self.generators.len(),
            wind_farms: self.wind_farms.len(),
        }
    }
}

/// Element counts by category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub ac_buses: usize,
    pub pc_buses: usize,
    pub dc_buses: usize,
    pub mtdc_terminals: usize,
    pub svc_terminals: usize,
    pub ac_lines: usize,
    pub dc_mono_lines: usize,
    pub dc_bi_lines: usize,
    pub converter_lines: usize,
    pub pc_transformers: usize,
    pub svcs: usize,
    pub statcoms: usize,
    pub mtdc_stations: usize,
    pub generators: usize,
    pub wind_farms: usize,
}

/// Integer lookups over a [`GridCase`].
#[derive(Debug, Clone)]
pub struct CaseIndex {
    bus_by_id: std::collections::HashMap<String, usize>,
    /// `line_from[l]`, `line_to[l]`: bus indices of line `l` (`usize::MAX` when unresolved).
    pub line_from: Vec<usize>,
    pub line_to: Vec<usize>,
    /// Buses that are the device end of an SVC line.
    pub svc_terminal: Vec<bool>,
    pub gens_at: Vec<Vec<usize>>,
    pub farms_at: Vec<Vec<usize>>,
    /// Converter index keyed by its PC bus / DC bus.
    pub converter_at_pc: Vec<Option<usize>>,
    pub converters_at_dc: Vec<Vec<usize>>,
    /// The VSC_CONVERTER line belonging to each converter.
    pub converter_line: Vec<Option<usize>>,
}

impl CaseIndex {
    pub fn new(case: &GridCase) -> Self {
        let n = case.buses.len();
        let mut bus_by_id = std::collections::HashMap::with_capacity(n);
        for (i, b) in case.buses.iter().enumerate() {
            bus_by_id.entry(b.id.clone()).or_insert(i);
        }
        let resolve = |id: &str| bus_by_id.get(id).copied().unwrap_or(usize::MAX);
        let line_from: Vec<usize> = case.lines.iter().map(|l| resolve(&l.from_bus)).collect();
        let line_to: Vec<usize> = case.lines.iter().map(|l| resolve(&l.to_bus)).collect();
        let mut svc_terminal = vec![false; n];
        for (l, line) in case.lines.iter().enumerate() {
            if line.kind == LineKind::Svc && line_to[l] < n {
                svc_terminal[line_to[l]] = true;
            }
        }
        let mut gens_at = vec![Vec::new(); n];
        for (g, gen) in case.generators.iter().enumerate() {
            if let Some(&b) = bus_by_id.get(&gen.bus) {
                gens_at[b].push(g);
            }
        }
        let mut farms_at = vec![Vec::new(); n];
        for (e, farm) in case.wind_farms.iter().enumerate() {
            if let Some(&b) = bus_by_id.get(&farm.bus) {
                farms_at[b].push(e);
            }
        }
        let mut converter_at_pc = vec![None; n];
        let mut converters_at_dc = vec![Vec::new(); n];
        let mut converter_line = vec![None; case.converters.len()];
        for (c, conv) in case.converters.iter().enumerate() {
            let pc = resolve(&conv.pc_bus);
            let dc = resolve(&conv.dc_bus);
            if pc < n {
                converter_at_pc[pc].get_or_insert(c);
            }
            if dc < n {
                converters_at_dc[dc].push(c);
            }
            converter_line[c] = case.lines.iter().enumerate().position(|(l, line)| {
                line.kind == LineKind::VscConverter && line_from[l] == dc && line_to[l] == pc
            });
        }
        CaseIndex {
            bus_by_id,
            line_from,
            line_to,
            svc_terminal,
            gens_at,
            farms_at,
            converter_at_pc,
            converters_at_dc,
            converter_line,
        }
    }

    pub fn bus(&self, id: &str) -> Option<usize> {
        self.bus_by_id.get(id).copied()
    }
}
