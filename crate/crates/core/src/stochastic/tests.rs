use proptest::prelude::*;

use super::*;
use crate::acopf::{build_soc_acopf, build_soc_acopf_with_wind, FarmLimits};
use crate::conic::{solve, SolveStatus, SolverOptions};
use crate::grid::GridCase;
use crate::testing::*;
use crate::wind::ScenarioSet;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn wind(p_max: f64) -> FarmLimits {
    let q = p_max * 0.95_f64.acos().tan();
    FarmLimits {
        p_min: 0.0,
        p_max,
        q_min: -q,
        q_max: q,
    }
}

/// Scenarios for a single-farm case from `(pi, p_max)` pairs.
fn single_farm(case: &GridCase, entries: &[(f64, f64)]) -> ScenarioSet {
    ScenarioSet::from_limits(
        vec![case.wind_farms[0].id.clone()],
        entries.iter().map(|&(pi, p)| (pi, vec![wind(p)])).collect(),
    )
}

/// Two-bus case whose generator cannot cover the load alone.
fn short_two_bus() -> GridCase {
    let mut case = two_bus_wind(1.0);
    case.generators[0].p_max = 0.8;
    case
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn one_scenario_matches_deterministic() {
    for case in [two_bus_wind(1.0), hybrid_wind()] {
        let limits = [wind(0.3)];
        let det = solve(&build_soc_acopf_with_wind(&case, &limits).unwrap(), &opts()).unwrap();
        let set = single_farm(&case, &[(1.0, 0.3)]);
        for shedding in [false, true] {
            let model = build_two_stage_with(&case, &set, shedding).unwrap();
            let sol = solve_single_stage(&model, &opts()).unwrap();
            assert!(rel(sol.objective, det.objective_value) < 1e-6, "{} vs {}", sol.objective, det.objective_value);
        }
    }
}

#[test]
fn zero_wind_matches_no_wind_opf() {
    let case = hybrid_wind();
    let det = solve(&build_soc_acopf(&case).unwrap(), &opts()).unwrap();
    let set = single_farm(&case, &[(0.2, 0.0), (0.5, 0.0), (0.3, 0.0)]);
    let sol = solve_single_stage(&build_two_stage(&case, &set).unwrap(), &opts()).unwrap();
    assert!(rel(sol.objective, det.objective_value) < 1e-6);
}

#[test]
fn objective_is_thermal_plus_expected_recourse() {
    // Resistive lines only, so no tie-break cost enters the objective.
    let case = short_two_bus();
    let set = single_farm(&case, &[(0.25, 0.0), (0.25, 0.1), (0.5, 0.6)]);
    let sol = solve_single_stage(&build_two_stage(&case, &set).unwrap(), &opts()).unwrap();
    let thermal: f64 = case.generators.iter().zip(sol.dispatch()).map(|(g, p)| g.cost(p)).sum();
    let recourse: f64 = sol
        .points
        .iter()
        .zip(&set.scenarios)
        .map(|(pt, s)| {
            let wind = pt.total_wind() * case.wind_farms[0].cost_c1;
            let spill: f64 = pt.buses.iter().map(|b| b.spill).sum();
            s.pi * (wind + case.voll * (pt.total_shed() + spill))
        })
        .sum();
    assert!(rel(sol.objective, thermal + recourse) < 1e-7, "{} vs {}", sol.objective, thermal + recourse);
    assert!(rel(sol.thermal_cost + sol.expected_recourse, sol.objective) < 1e-7);
    // The no-wind scenario cannot be served: 1 pu load, 0.8 pu generator.
    assert!(sol.scenarios[0].shed > 0.2 - 1e-6);
}

#[test]
fn raising_voll_never_lowers_cost_or_raises_shedding() {
    let mut case = short_two_bus();
    case.generators[0].p_max = 1.2;
    let set = single_farm(&case, &[(0.3, 0.0), (0.4, 0.2), (0.3, 0.5)]);
    let mut last = (f64::NEG_INFINITY, f64::INFINITY);
    for voll in [5.0, 12.0, 20.0, 50.0, 500.0, 5000.0] {
        case.voll = voll;
        let sol = solve_single_stage(&build_two_stage(&case, &set).unwrap(), &opts()).unwrap();
        let shed: f64 = sol.scenarios.iter().map(|s| s.pi * s.shed).sum();
        assert!(sol.objective >= last.0 - 1e-6, "voll {voll}");
        assert!(shed <= last.1 + 1e-6, "voll {voll}");
        last = (sol.objective, shed);
    }
    assert!(last.1 < 1e-6, "shedding remains at high VoLL: {}", last.1);
}

#[test]
fn unnormalized_probabilities_are_rejected() {
    let case = two_bus_wind(1.0);
    let set = single_farm(&case, &[(1.0, 0.1), (1.0, 0.2)]);
    assert!(matches!(
        build_two_stage(&case, &set),
        Err(StochasticError::Scenarios(crate::wind::WindError::BadProbabilities(_)))
    ));
}

#[test]
fn stage_one_dispatch_is_shared() {
    let case = hybrid_wind();
    let set = single_farm(&case, &[(0.3, 0.0), (0.4, 0.3), (0.3, 0.7)]);
    let model = build_two_stage(&case, &set).unwrap();
    assert_eq!(model.blocks(), 3);
    let pg = model.stage1[0];
    for j in 0..3 {
        let row = &model.program.eq_constraints[model.program.eq_index(&format!("pbal:{j}:A1")).unwrap()];
        assert!(row.terms.iter().any(|&(v, c)| v == pg && c == 1.0), "scenario {j}");
    }
    let sol = solve_single_stage(&model, &opts()).unwrap();
    for pt in &sol.points {
        assert!((pt.generators[0].p - sol.stage1[0].p_pu).abs() < 1e-12);
    }
    // Scenario-specific reactive output is free to differ.
    assert!(model.program.var_id("qg:0:G").is_some() && model.program.var_id("qg:2:G").is_some());
}

#[test]
fn infeasible_without_shedding() {
    let case = short_two_bus();
    let set = single_farm(&case, &[(0.5, 0.0), (0.5, 0.6)]);
    let model = build_two_stage_with(&case, &set, false).unwrap();
    match solve_single_stage(&model, &opts()) {
        Err(StochasticError::SolverFailed { status, scenarios, size, .. }) => {
            assert_eq!(status, SolveStatus::Infeasible);
            assert_eq!(scenarios, 2);
            assert_eq!(size, model.program.size());
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
    assert!(solve_single_stage(&build_two_stage(&case, &set).unwrap(), &opts()).is_ok());
}

#[test]
fn fixed_dispatch_is_checked_and_pinned() {
    let case = two_bus_wind(1.0);
    let set = single_farm(&case, &[(1.0, 0.2)]);
    assert!(matches!(
        build_two_stage_fixed(&case, &set, &[0.5, 0.5]),
        Err(StochasticError::DispatchMismatch { given: 2, expected: 1 })
    ));
    let sol = solve_single_stage(&build_two_stage_fixed(&case, &set, &[0.5]).unwrap(), &opts()).unwrap();
    assert!((sol.stage1[0].p_pu - 0.5).abs() < 1e-7);
    assert!(sol.scenarios[0].shed > 0.25);
}

#[test]
fn vss_vanishes_for_identical_scenarios() {
    let case = hybrid_wind();
    let set = single_farm(&case, &[(0.25, 0.3); 4]);
    let r = compute_vss(&case, &set, &opts()).unwrap();
    assert!(r.vss.abs() < 1e-6, "{r:?}");
}

#[test]
fn vss_is_positive_when_capacity_is_tight() {
    // The mean scenario promises 0.3 pu of wind; the dispatch chosen for it
    // sheds load whenever the wind falls short.
    let case = two_bus_wind(1.0);
    let set = single_farm(&case, &[(0.5, 0.0), (0.5, 0.6)]);
    let r = compute_vss(&case, &set, &opts()).unwrap();
    assert!(r.vss > 1.0, "{r:?}");
    assert!(r.expected_shed_deterministic > 0.1);
    assert!(r.expected_shed_stochastic < 1e-6);
    assert!(r.stochastic_dispatch[0] > r.deterministic_dispatch[0]);
}

#[test]
fn size_report_counts_sets() {
    let case = hybrid_wind();
    let set = single_farm(&case, &[(0.5, 0.1), (0.5, 0.2)]);
    let size = model_size(&build_two_stage(&case, &set).unwrap());
    let p = size.parameters;
    assert_eq!(
        (p.scenarios, p.lines, p.generators, p.wind_farms, p.buses),
        (2, 6, 1, 1, 6)
    );
    assert_eq!((p.ac_buses, p.ac_lines, p.dc_buses, p.dc_lines, p.converters), (4, 3, 2, 1, 2));
    // J(5L + G + 2E + I) + G = 2(30 + 1 + 2 + 6) + 1.
    assert_eq!(size.formula_variables, 79);
    // J(2·4 + 5·3 + 2 + 5·1 + 2 + 0 + 2·2 + 0 + 2 + 2·6) + 2 = 2·50 + 2.
    assert_eq!(size.formula_constraints, 102);
    assert_eq!(size.actual_constraints, size.actual.constraints());
    assert!(size.actual_with_bounds > size.actual_constraints);
    assert_eq!(model_size_of(&case, 2).unwrap(), size);
}

#[test]
fn solution_json_round_trips_without_points() {
    let case = two_bus_wind(1.0);
    let set = single_farm(&case, &[(0.5, 0.1), (0.5, 0.2)]);
    let sol = solve_single_stage(&build_two_stage(&case, &set).unwrap(), &opts()).unwrap();
    let back: StochasticSolution = serde_json::from_str(&sol.to_json()).unwrap();
    assert!(back.points.is_empty());
    assert_eq!(back.stage1, sol.stage1);
    assert_eq!(back.method, Method::SingleStage);
    assert!(sol.to_json().contains("\"single-stage\""));
    assert_eq!(Method::parse(Method::ParallelBda.name()), Some(Method::ParallelBda));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn normalizing_scaled_probabilities_changes_nothing(
        weights in prop::collection::vec(0.05f64..1.0, 2..4),
        scale in 0.1f64..10.0,
    ) {
        let case = two_bus_wind(1.0);
        let total: f64 = weights.iter().sum();
        let entries: Vec<(f64, f64)> = weights.iter().enumerate().map(|(k, w)| (w / total, 0.15 * k as f64)).collect();
        let scaled: Vec<(f64, f64)> = entries.iter().map(|&(pi, p)| (pi * scale, p)).collect();
        let a = solve_single_stage(&build_two_stage(&case, &single_farm(&case, &entries)).unwrap(), &opts()).unwrap();
        let b = solve_single_stage(&build_two_stage(&case, &single_farm(&case, &scaled).normalized()).unwrap(), &opts()).unwrap();
        prop_assert!(rel(a.objective, b.objective) < 1e-7);
    }

    #[test]
    fn vss_is_never_negative(
        low in 0.0f64..0.4,
        high in 0.4f64..0.9,
        pi in 0.1f64..0.9,
    ) {
        let case = short_two_bus();
        let set = single_farm(&case, &[(pi, low), (1.0 - pi, high)]);
        let r = compute_vss(&case, &set, &opts()).unwrap();
        prop_assert!(r.vss >= -1e-6, "{:?}", r);
    }
}
