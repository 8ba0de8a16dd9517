//! Wind scenario generation: distribution fitting, turbine power curves and
//! the combinatorial scenario set across independent farms.

mod curve;
mod distribution;
mod scenarios;

pub use curve::{load_curve_dir, CurveError, PowerCurve};
pub use distribution::{fit_distribution, synthetic_measurements, Family, FamilyKind, WindDistribution};
pub use scenarios::{
    case_scenarios, combine, farm_scenarios, FarmScenario, FarmScenarios, Scenario, ScenarioFileError, ScenarioSet, SCENARIO_FORMAT,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WindError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("sample {index} is not a positive finite speed: {value}")]
    NonPositiveSample { index: usize, value: f64 },
    #[error("all samples are equal; the distribution is degenerate")]
    DegenerateSample,
    #[error("scenario count must be at least 1")]
    ZeroScenarios,
    #[error("no farm scenario lists to combine")]
    NoFarms,
    #[error("farm {0} has no turbines")]
    NoTurbines(String),
    #[error("no power curve for turbine model {0}")]
    UnknownModel(String),
    #[error("scenario set does not match the case: {0}")]
    Mismatch(String),
    #[error("probabilities sum to {0}, expected 1")]
    BadProbabilities(f64),
}
