use serde::{Deserialize, Serialize};

use crate::conic::ProgramSize;
use crate::grid::{BusKind, GridCase, LineKind};

use crate::wind::ScenarioSet;

use super::{build_two_stage, StochasticError, TwoStageModel};

/// Set cardinalities entering the size formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeParameters {
    pub scenarios: usize,
    /// All branches, including converter and SVC lines.
    pub lines: usize,
    pub generators: usize,
    pub wind_farms: usize,
    /// Buses carrying a voltage variable (SVC terminals excluded).
    pub buses: usize,
    /// AC and PC buses.
    pub ac_buses: usize,
    /// AC lines and coupling transformers.
    pub ac_lines: usize,
    pub dc_buses: usize,
    pub dc_lines: usize,
    pub shunt_losses: usize,
    pub switching_losses: usize,
    pub converters: usize,
    pub svcs: usize,
}

impl SizeParameters {
    pub fn of(case: &GridCase, scenarios: usize) -> Self {
        let idx = case.index();
        let active = |i: usize| !idx.svc_terminal[i];
        let count_lines = |f: fn(LineKind) -> bool| case.lines.iter().filter(|l| f(l.kind)).count();
        SizeParameters {
            scenarios,
            lines: case.lines.len(),
            generators: case.generators.len(),
            wind_farms: case.wind_farms.len(),
            buses: (0..case.buses.len()).filter(|&i| active(i)).count(),
            ac_buses: (0..case.buses.len())
                .filter(|&i| active(i) && case.buses[i].kind.is_ac())
                .count(),
            ac_lines: count_lines(LineKind::is_ac_branch),
            dc_buses: case.buses.iter().filter(|b| b.kind == BusKind::Dc).count(),
            dc_lines: count_lines(LineKind::is_dc),
            shunt_losses: case.converters.len(),
            switching_losses: case.converters.iter().filter(|c| c.is_statcom()).count(),
            converters: case.converters.len(),
            svcs: count_lines(|k| k == LineKind::Svc),
        }
    }

    /// `J(5L + G + 2E + I) + G`.
    pub fn formula_variables(&self) -> usize {
        self.scenarios * (5 * self.lines + self.generators + 2 * self.wind_farms + self.buses) + self.generators
    }

    /// `J(2i_AC + 5l_AC + i_DC + 5l_DC + Csh + sw + 2CONV + 2l_SVC + 2E + 2I) + 2G`.
    pub fn formula_constraints(&self) -> usize {
        self.scenarios
            * (2 * self.ac_buses
                + 5 * self.ac_lines
                + self.dc_buses
                + 5 * self.dc_lines
                + self.shunt_losses
                + self.switching_losses
                + 2 * self.converters
                + 2 * self.svcs
                + 2 * self.wind_farms
                + 2 * self.buses)
            + 2 * self.generators
    }
}

/// Formula and actual sizes side by side.
///
/// The formulas count each two-sided bound as two constraints and treat
/// every branch as carrying five variables. The built program instead keeps
/// bounds on the variables, adds an angle or series-loss variable per AC
/// branch, holds converter flows on the converter records, and counts a
/// cone as one constraint. `actual_with_bounds` adds finite variable bounds
/// back in, which is the closer match to the formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSize {
    pub parameters: SizeParameters,
    pub formula_variables: usize,
    pub formula_constraints: usize,
    pub actual: ProgramSize,
    pub actual_constraints: usize,
    pub actual_with_bounds: usize,
}

fn bound_count(model: &TwoStageModel) -> usize {
    model
        .program
        .variables
        .iter()
        .map(|v| usize::from(v.lower.is_finite()) + usize::from(v.upper.is_finite()))
        .sum()
}

fn report(parameters: SizeParameters, actual: ProgramSize, bounds: usize) -> ModelSize {
    ModelSize {
        parameters,
        formula_variables: parameters.formula_variables(),
        formula_constraints: parameters.formula_constraints(),
        actual,
        actual_constraints: actual.constraints(),
        actual_with_bounds: actual.constraints() + bounds,
    }
}

pub fn model_size(model: &TwoStageModel) -> ModelSize {
    report(
        SizeParameters::of(&model.case, model.blocks()),
        model.program.size(),
        bound_count(model),
    )
}

/// Size of the two-stage model with `scenarios` blocks, computed from a
/// one-block build. Blocks differ only in wind limits, so every count is
/// affine in the block count.
pub fn model_size_of(case: &GridCase, scenarios: usize) -> Result<ModelSize, StochasticError> {
    let one = build_two_stage(case, &ScenarioSet::no_wind(case))?;
    let stage1 = one.stage1.len();
    let stage1_bounded = one
        .stage1
        .iter()
        .filter(|v| {
            let var = &one.program.variables[v.0];
            var.lower.is_finite() || var.upper.is_finite()
        })
        .count();
    let stage1_bounds: usize = one
        .stage1
        .iter()
        .map(|v| {
            let var = &one.program.variables[v.0];
            usize::from(var.lower.is_finite()) + usize::from(var.upper.is_finite())
        })
        .sum();
    let s = one.program.size();
    let actual = ProgramSize {
        variables: stage1 + scenarios * (s.variables - stage1),
        eq_rows: scenarios * s.eq_rows,
        ineq_rows: scenarios * s.ineq_rows,
        cones: scenarios * s.cones,
        bounded_vars: stage1_bounded + scenarios * (s.bounded_vars - stage1_bounded),
    };
    let bounds = stage1_bounds + scenarios * (bound_count(&one) - stage1_bounds);
    Ok(report(SizeParameters::of(case, scenarios), actual, bounds))
}
