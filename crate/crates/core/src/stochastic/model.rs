use crate::acopf::{add_generators, add_soc_block, check_case, BlockConfig, FarmLimits};
use crate::conic::{ConicProgram, VarId};
use crate::grid::GridCase;
use crate::wind::ScenarioSet;

use super::StochasticError;

/// The monolithic two-stage program and the data it was built from.
#[derive(Debug, Clone)]
pub struct TwoStageModel {
    pub case: GridCase,
    pub scenarios: ScenarioSet,
    /// Per scenario, wind limits in the case's farm order.
    pub limits: Vec<Vec<FarmLimits>>,
    pub program: ConicProgram,
    /// Shared generator outputs `pg:<gen>`, one per generator.
    pub stage1: Vec<VarId>,
    pub shedding: bool,
}

impl TwoStageModel {
    pub fn blocks(&self) -> usize {
        self.limits.len()
    }
}

/// Two-stage model with load shedding priced at the case's VoLL.
pub fn build_two_stage(case: &GridCase, scenarios: &ScenarioSet) -> Result<TwoStageModel, StochasticError> {
    build_two_stage_with(case, scenarios, true)
}

pub fn build_two_stage_with(
    case: &GridCase,
    scenarios: &ScenarioSet,
    shedding: bool,
) -> Result<TwoStageModel, StochasticError> {
    check_case(case)?;
    let limits = scenarios.limits_for(case)?;
    let idx = case.index();
    let mut program = ConicProgram::new();
    let stage1 = add_generators(&mut program, case);
    for (j, (scenario, wind)) in scenarios.scenarios.iter().zip(&limits).enumerate() {
        add_soc_block(
            &mut program,
            case,
            &idx,
            &stage1,
            &BlockConfig {
                scenario: j,
                weight: scenario.pi,
                wind,
                voll: shedding.then_some(case.voll),
            },
        );
    }
    Ok(TwoStageModel {
        case: case.clone(),
        scenarios: scenarios.clone(),
        limits,
        program,
        stage1,
        shedding,
    })
}

/// Two-stage model with the thermal dispatch pinned to `dispatch` (pu).
pub fn build_two_stage_fixed(
    case: &GridCase,
    scenarios: &ScenarioSet,
    dispatch: &[f64],
) -> Result<TwoStageModel, StochasticError> {
    if dispatch.len() != case.generators.len() {
        return Err(StochasticError::DispatchMismatch {
            given: dispatch.len(),
            expected: case.generators.len(),
        });
    }
    let mut model = build_two_stage(case, scenarios)?;
    for (v, &p) in model.stage1.iter().zip(dispatch) {
        let var = &mut model.program.variables[v.0];
        var.lower = p;
        var.upper = p;
    }
    Ok(model)
}
