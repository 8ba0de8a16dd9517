use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curve::PowerCurve;
use super::distribution::WindDistribution;
use super::WindError;
use crate::acopf::FarmLimits;
use crate::grid::GridCase;

pub const SCENARIO_FORMAT: &str = "windflow-scenarios/1";

/// Relative half-width of the per-turbine speed jitter.
const JITTER: f64 = 0.05;

/// One power-output scenario of a single farm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarmScenario {
    /// Hub speed of every turbine, m/s.
    pub speeds: Vec<f64>,
    /// Sum of turbine outputs before wake losses, MW.
    pub power_mw: f64,
    /// Sum of the speed density over the farm's turbines.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarmScenarios {
    pub farm_id: String,
    pub wake_loss: f64,
    pub power_factor_min: f64,
    pub entries: Vec<FarmScenario>,
}

/// Stratified scenarios for one farm.
///
/// Scenario `k` of `count` starts from the `(k + 0.5)/count` quantile of
/// `dist`; each turbine then draws its own speed within ±5% of it.
pub fn farm_scenarios(
    farm: &crate::grid::WindFarm,
    dist: &WindDistribution,
    curves: &BTreeMap<String, PowerCurve>,
    count: usize,
    seed: u64,
) -> Result<FarmScenarios, WindError> {
    if count == 0 {
        return Err(WindError::ZeroScenarios);
    }
    let mut turbines: Vec<&PowerCurve> = Vec::new();
    for group in &farm.turbines {
        let curve = curves
            .get(&group.model)
            .ok_or_else(|| WindError::UnknownModel(group.model.clone()))?;
        turbines.extend(std::iter::repeat_n(curve, group.count as usize));
    }
    if turbines.is_empty() {
        return Err(WindError::NoTurbines(farm.id.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..count)
        .map(|k| {
            let base = dist.quantile((k as f64 + 0.5) / count as f64);
            let speeds: Vec<f64> = turbines
                .iter()
                .map(|_| base * (1.0 + rng.gen_range(-JITTER..=JITTER)))
                .collect();
            let power_mw = speeds.iter().zip(&turbines).map(|(&u, c)| c.power_output(u)).sum();
            let weight = speeds.iter().map(|&u| dist.pdf(u)).sum();
            FarmScenario {
                speeds,
                power_mw,
                weight,
            }
        })
        .collect();
    Ok(FarmScenarios {
        farm_id: farm.id.clone(),
        wake_loss: farm.wake_loss,
        power_factor_min: farm.power_factor_min,
        entries,
    })
}

/// Joint scenarios for every farm of `case`, all drawn from `dist`.
///
/// `counts[e]` scenarios are generated for farm `e`; farm `e` uses the seed
/// `seed + e` so adding a farm leaves the others unchanged.
pub fn case_scenarios(
    case: &GridCase,
    dist: &WindDistribution,
    curves: &BTreeMap<String, PowerCurve>,
    counts: &[usize],
    seed: u64,
) -> Result<ScenarioSet, WindError> {
    if counts.len() != case.wind_farms.len() {
        return Err(WindError::Mismatch(format!(
            "{} scenario counts for {} farms",
            counts.len(),
            case.wind_farms.len()
        )));
    }
    let lists = case
        .wind_farms
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(e, (farm, &n))| farm_scenarios(farm, dist, curves, n, seed.wrapping_add(e as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    combine(&lists, case.s_base)
}

/// One joint scenario across all farms.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub j: usize,
    pub pi: f64,
    /// Limits in pu, ordered like [`ScenarioSet::farm_ids`].
    pub farms: Vec<FarmLimits>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub farm_ids: Vec<String>,
    pub per_farm_counts: Vec<usize>,
    pub scenarios: Vec<Scenario>,
}

/// Cartesian product of per-farm lists; the last farm varies fastest.
///
/// The probability of a joint scenario is the product over farms of that
/// farm's weight divided by the farm's total weight.
pub fn combine(lists: &[FarmScenarios], s_base: f64) -> Result<ScenarioSet, WindError> {
    if lists.is_empty() {
        return Err(WindError::NoFarms);
    }
    if lists.iter().any(|l| l.entries.is_empty()) {
        return Err(WindError::ZeroScenarios);
    }
    let marginals: Vec<Vec<f64>> = lists
        .iter()
        .map(|l| {
            let total: f64 = l.entries.iter().map(|e| e.weight).sum();
            let n = l.entries.len() as f64;
            l.entries
                .iter()
                .map(|e| if total > 0.0 { e.weight / total } else { 1.0 / n })
                .collect()
        })
        .collect();
    let limits: Vec<Vec<FarmLimits>> = lists
        .iter()
        .map(|l| {
            let tan = l.power_factor_min.acos().tan();
            l.entries
                .iter()
                .map(|e| {
                    let p_max = (1.0 - l.wake_loss) * e.power_mw / s_base;
                    FarmLimits {
                        p_min: 0.0,
                        p_max,
                        q_min: -p_max * tan,
                        q_max: p_max * tan,
                    }
                })
                .collect()
        })
        .collect();
    let counts: Vec<usize> = lists.iter().map(|l| l.entries.len()).collect();
    let total: usize = counts.iter().product();
    let mut scenarios = Vec::with_capacity(total);
    let mut digits = vec![0usize; counts.len()];
    for j in 0..total {
        let pi = digits.iter().enumerate().map(|(e, &k)| marginals[e][k]).product();
        let farms = digits.iter().enumerate().map(|(e, &k)| limits[e][k]).collect();
        scenarios.push(Scenario { j, pi, farms });
        for e in (0..digits.len()).rev() {
            digits[e] += 1;
            if digits[e] < counts[e] {
                break;
            }
            digits[e] = 0;
        }
    }
    Ok(ScenarioSet {
        farm_ids: lists.iter().map(|l| l.farm_id.clone()).collect(),
        per_farm_counts: counts,
        scenarios,
    })
}

impl ScenarioSet {
    /// Builds a set from explicit probabilities and limits.
    pub fn from_limits(farm_ids: Vec<String>, entries: Vec<(f64, Vec<FarmLimits>)>) -> Self {
        let n = entries.len();
        ScenarioSet {
            farm_ids,
            per_farm_counts: vec![n],
            scenarios: entries
                .into_iter()
                .enumerate()
                .map(|(j, (pi, farms))| Scenario { j, pi, farms })
                .collect(),
        }
    }

    /// A single certain scenario with no wind at any farm of `case`.
    pub fn no_wind(case: &GridCase) -> Self {
        Self::from_limits(
            case.wind_farms.iter().map(|f| f.id.clone()).collect(),
            vec![(1.0, vec![FarmLimits::ZERO; case.wind_farms.len()])],
        )
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.scenarios.iter().map(|s| s.pi).sum()
    }

    /// Rescales probabilities to sum to one.
    pub fn normalized(&self) -> Self {
        let total = self.total_probability();
        let mut out = self.clone();
        for s in &mut out.scenarios {
            s.pi /= total;
        }
        out
    }

    /// The probability-weighted mean scenario as a certain single scenario.
    pub fn expected_value(&self) -> Self {
        let mut mean = vec![FarmLimits::ZERO; self.farm_ids.len()];
        for s in &self.scenarios {
            for (m, f) in mean.iter_mut().zip(&s.farms) {
                m.p_min += s.pi * f.p_min;
                m.p_max += s.pi * f.p_max;
                m.q_min += s.pi * f.q_min;
                m.q_max += s.pi * f.q_max;
            }
        }
        Self::from_limits(self.farm_ids.clone(), vec![(1.0, mean)])
    }

    /// Checks the set against `case` and returns each scenario's limits in
    /// the case's farm order.
    pub fn limits_for(&self, case: &GridCase) -> Result<Vec<Vec<FarmLimits>>, WindError> {
        let total = self.total_probability();
        if (total - 1.0).abs() > 1e-9 || self.scenarios.iter().any(|s| s.pi.is_nan() || s.pi < 0.0) {
            return Err(WindError::BadProbabilities(total));
        }
        let mut order = Vec::with_capacity(case.wind_farms.len());
        for farm in &case.wind_farms {
            let pos = self
                .farm_ids
                .iter()
                .position(|id| *id == farm.id)
                .ok_or_else(|| WindError::Mismatch(format!("farm {} has no scenarios", farm.id)))?;
            order.push(pos);
        }
        if let Some(extra) = self.farm_ids.iter().find(|id| !case.wind_farms.iter().any(|f| &&f.id == id)) {
            return Err(WindError::Mismatch(format!("farm {extra} is not in the case")));
        }
        self.scenarios
            .iter()
            .map(|s| {
                if s.farms.len() != self.farm_ids.len() {
                    return Err(WindError::Mismatch(format!(
                        "scenario {} lists {} farms, expected {}",
                        s.j,
                        s.farms.len(),
                        self.farm_ids.len()
                    )));
                }
                Ok(order.iter().map(|&k| s.farms[k]).collect())
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = ScenarioDoc {
            format: SCENARIO_FORMAT.to_string(),
            farms: self.farm_ids.clone(),
            per_farm_counts: self.per_farm_counts.clone(),
            scenarios: self
                .scenarios
                .iter()
                .map(|s| ScenarioEntry {
                    j: s.j,
                    pi: s.pi,
                    farms: self
                        .farm_ids
                        .iter()
                        .zip(&s.farms)
                        .map(|(id, f)| (id.clone(), LimitsDoc::from(*f)))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("scenario documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioFileError> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        if doc.format != SCENARIO_FORMAT {
            return Err(ScenarioFileError::Format(doc.format));
        }
        let scenarios = doc
            .scenarios
            .into_iter()
            .map(|s| {
                let farms = doc
                    .farms
                    .iter()
                    .map(|id| {
                        s.farms
                            .get(id)
                            .map(|l| l.to_limits())
                            .ok_or_else(|| ScenarioFileError::MissingFarm { j: s.j, farm: id.clone() })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Scenario { j: s.j, pi: s.pi, farms })
            })
            .collect::<Result<Vec<_>, ScenarioFileError>>()?;
        Ok(ScenarioSet {
            farm_ids: doc.farms,
            per_farm_counts: doc.per_farm_counts,
            scenarios,
        })
    }

    /// One row per scenario: `j,pi,<farm>_p_max_pu...`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["j".to_string(), "pi".to_string()];
        header.extend(self.farm_ids.iter().map(|id| format!("{id}_p_max_pu")));
        w.write_record(&header)?;
        for s in &self.scenarios {
            let mut row = vec![s.j.to_string(), format!("{:e}", s.pi)];
            row.extend(s.farms.iter().map(|f| format!("{:e}", f.p_max)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("malformed scenario file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scenario format {0:?}")]
    Format(String),
    #[error("scenario {j} has no entry for farm {farm}")]
    MissingFarm { j: usize, farm: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    format: String,
    farms: Vec<String>,
    per_farm_counts: Vec<usize>,
    scenarios: Vec<ScenarioEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    j: usize,
    pi: f64,
    farms: BTreeMap<String, LimitsDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsDoc {
    p_max_pu: f64,
    q_max_pu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_min_pu: Option<f64>,
    #[serde(default)]
    p_min_pu: f64,
}

impl From<FarmLimits> for LimitsDoc {
    fn from(f: FarmLimits) -> Self {
        LimitsDoc {
            p_max_pu: f.p_max,
            q_max_pu: f.q_max,
            q_min_pu: Some(f.q_min),
            p_min_pu: f.p_min,
        }
    }
}

impl LimitsDoc {
    /// A missing `q_min_pu` mirrors `q_max_pu`.
    fn to_limits(&self) -> FarmLimits {
        FarmLimits {
            p_min: self.p_min_pu,
            p_max: self.p_max_pu,
            q_min: self.q_min_pu.unwrap_or(-self.q_max_pu),
            q_max: self.q_max_pu,
        }
    }
}
