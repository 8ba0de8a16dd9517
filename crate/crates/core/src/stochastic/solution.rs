use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acopf::{recover_scenario, OperatingPoint, SLACK_PRICE_FACTOR};
use crate::conic::{solve, SolverOptions};
use crate::grid::GridCase;

use super::{StochasticError, TwoStageModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SingleStage,
    SerialBda,
    ParallelBda,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SingleStage => "single",
            Method::SerialBda => "serial-bda",
            Method::ParallelBda => "parallel-bda",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "single" | "single-stage" => Some(Method::SingleStage),
            "serial-bda" | "serial" => Some(Method::SerialBda),
            "parallel-bda" | "parallel" => Some(Method::ParallelBda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchEntry {
    pub id: String,
    pub p_pu: f64,
    pub p_mw: f64,
    pub cost: f64,
}

/// Recourse outcome of one scenario, pu unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub j: usize,
    pub pi: f64,
    pub wind: f64,
    pub wind_available: f64,
    pub shed: f64,
    pub spill: f64,
    /// Active plus absolute reactive balance-slack use.
    pub slack: f64,
    /// Wind and shedding cost of this scenario, $/h, before weighting.
    pub recourse_cost: f64,
}

/// Decomposition bounds at termination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticSolution {
    pub case: String,
    pub method: Method,
    /// Expected total cost, $/h.
    pub objective: f64,
    pub thermal_cost: f64,
    pub expected_recourse: f64,
    pub stage1: Vec<DispatchEntry>,
    pub scenarios: Vec<ScenarioSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<Bounds>,
    /// Kept out of the JSON so repeated runs write identical files.
    #[serde(skip)]
    pub wall_ms: f64,
    #[serde(skip)]
    pub points: Vec<OperatingPoint>,
}

impl StochasticSolution {
    pub fn dispatch(&self) -> Vec<f64> {
        self.stage1.iter().map(|d| d.p_pu).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

/// Assembles a solution from the stage-one dispatch and recovered scenarios.
///
/// `voll` prices shedding, spill and balance slacks in the recourse
/// summary; pass `None` when the model had none of them.
#[allow(clippy::too_many_arguments)]
pub fn summarize(
    case: &GridCase,
    method: Method,
    dispatch: &[f64],
    pis: &[f64],
    available: &[f64],
    points: Vec<OperatingPoint>,
    objective: f64,
    voll: Option<f64>,
) -> StochasticSolution {
    let stage1: Vec<DispatchEntry> = case
        .generators
        .iter()
        .zip(dispatch)
        .map(|(g, &p)| DispatchEntry {
            id: g.id.clone(),
            p_pu: p,
            p_mw: p * case.s_base,
            cost: g.cost(p),
        })
        .collect();
    let thermal_cost = stage1.iter().map(|d| d.cost).sum();
    let scenarios: Vec<ScenarioSummary> = points
        .iter()
        .zip(pis)
        .zip(available)
        .map(|((pt, &pi), &avail)| {
            let shed = pt.total_shed();
            let spill: f64 = pt.buses.iter().map(|b| b.spill).sum();
            let slack = pt.total_slack();
            let wind_cost: f64 = case
                .wind_farms
                .iter()
                .zip(&pt.wind_farms)
                .map(|(f, w)| f.cost_c1 * w.p)
                .sum();
            ScenarioSummary {
                j: pt.scenario,
                pi,
                wind: pt.total_wind(),
                wind_available: avail,
                shed,
                spill,
                slack,
                recourse_cost: wind_cost + voll.map_or(0.0, |v| v * (shed + spill + SLACK_PRICE_FACTOR * slack)),
            }
        })
        .collect();
    let expected_recourse = scenarios.iter().map(|s| s.pi * s.recourse_cost).sum();
    StochasticSolution {
        case: case.name.clone(),
        method,
        objective,
        thermal_cost,
        expected_recourse,
        stage1,
        scenarios,
        bounds: None,
        wall_ms: 0.0,
        points,
    }
}

/// Solves the monolithic two-stage program.
pub fn solve_single_stage(model: &TwoStageModel, opts: &SolverOptions) -> Result<StochasticSolution, StochasticError> {
    let start = Instant::now();
    let sol = solve(&model.program, opts)?;
    if !sol.is_optimal() {
        return Err(StochasticError::SolverFailed {
            stage: "single-stage",
            status: sol.status,
            scenarios: model.blocks(),
            size: model.program.size(),
        });
    }
    let dispatch: Vec<f64> = model.stage1.iter().map(|&v| sol.value(v)).collect();
    let points = (0..model.blocks())
        .map(|j| recover_scenario(&model.case, &model.program, &sol, j))
        .collect::<Result<Vec<_>, _>>()?;
    let pis: Vec<f64> = model.scenarios.scenarios.iter().map(|s| s.pi).collect();
    let available: Vec<f64> = model.limits.iter().map(|l| l.iter().map(|f| f.p_max).sum()).collect();
    let mut out = summarize(
        &model.case,
        Method::SingleStage,
        &dispatch,
        &pis,
        &available,
        points,
        sol.objective_value,
        model.shedding.then_some(model.case.voll),
    );
    out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}
