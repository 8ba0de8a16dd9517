use crate::conic::{ConicProgram, VarId};
use crate::grid::{validate, GridCase};

use super::block::{add_soc_block, BlockConfig, FarmLimits};
use super::AcopfError;

/// First-stage generator variables `pg:<gen>` with their dispatch cost.
pub(crate) fn add_generators(prog: &mut ConicProgram, case: &GridCase) -> Vec<VarId> {
    case.generators
        .iter()
        .map(|g| {
            let p = prog.add_var(format!("pg:{}", g.id), g.p_min, g.p_max);
            prog.add_constant_cost(g.cost_c0);
            prog.add_linear_cost(p, g.cost_c1);
            prog.add_quadratic_cost(p, g.cost_c2);
            p
        })
        .collect()
}

pub(crate) fn check_case(case: &GridCase) -> Result<(), AcopfError> {
    let report = validate(case);
    if report.is_empty() {
        Ok(())
    } else {
        Err(AcopfError::InvalidCase(report))
    }
}

pub(crate) fn check_wind(case: &GridCase, wind: &[FarmLimits]) -> Result<(), AcopfError> {
    if wind.len() != case.wind_farms.len() {
        return Err(AcopfError::WindMismatch {
            given: wind.len(),
            expected: case.wind_farms.len(),
        });
    }
    Ok(())
}

/// Deterministic SOC-ACOPF with every wind farm held at zero output.
pub fn build_soc_acopf(case: &GridCase) -> Result<ConicProgram, AcopfError> {
    build_soc_acopf_with_wind(case, &vec![FarmLimits::ZERO; case.wind_farms.len()])
}

/// Deterministic SOC-ACOPF with the given per-farm wind limits.
pub fn build_soc_acopf_with_wind(case: &GridCase, wind: &[FarmLimits]) -> Result<ConicProgram, AcopfError> {
    check_case(case)?;
    check_wind(case, wind)?;
    let idx = case.index();
    let mut prog = ConicProgram::new();
    let pg = add_generators(&mut prog, case);
    add_soc_block(
        &mut prog,
        case,
        &idx,
        &pg,
        &BlockConfig {
            scenario: 0,
            weight: 1.0,
            wind,
            voll: None,
        },
    );
    Ok(prog)
}
