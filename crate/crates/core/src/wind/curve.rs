use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error("reading power curve: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing power curve: {0}")]
    Csv(#[from] csv::Error),
    #[error("power curve needs at least two points")]
    TooFewPoints,
    #[error("power curve speeds must increase strictly (point {0})")]
    NotIncreasing(usize),
    #[error("power curve point {0} has a negative or non-finite value")]
    BadPoint(usize),
}

/// Turbine output against hub wind speed, linear between datasheet points.
///
/// Output is zero below the first point and above the last (cut-out).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    /// `(speed m/s, power MW)` with strictly increasing speed.
    pub points: Vec<(f64, f64)>,
    pub rated_mw: f64,
}

#[derive(Deserialize)]
struct Row {
    speed: f64,
    power: f64,
}

impl PowerCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, CurveError> {
        if points.len() < 2 {
            return Err(CurveError::TooFewPoints);
        }
        for (i, &(u, p)) in points.iter().enumerate() {
            if !(u.is_finite() && p.is_finite() && u >= 0.0 && p >= 0.0) {
                return Err(CurveError::BadPoint(i));
            }
            if i > 0 && u <= points[i - 1].0 {
                return Err(CurveError::NotIncreasing(i));
            }
        }
        let rated_mw = points.iter().map(|p| p.1).fold(0.0, f64::max);
        Ok(PowerCurve { points, rated_mw })
    }

    /// Reads a `speed,power` CSV with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, CurveError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let points = rdr
            .deserialize::<Row>()
            .map(|r| r.map(|r| (r.speed, r.power)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CurveError> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn cut_in(&self) -> f64 {
        self.points[0].0
    }

    pub fn cut_out(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Power in MW at `speed` m/s.
    pub fn power_output(&self, speed: f64) -> f64 {
        if !(speed >= self.cut_in() && speed <= self.cut_out()) {
            return 0.0;
        }
        let k = self.points.partition_point(|&(u, _)| u <= speed);
        if k == self.points.len() {
            return self.points[k - 1].1;
        }
        let (u0, p0) = self.points[k - 1];
        let (u1, p1) = self.points[k];
        p0 + (p1 - p0) * (speed - u0) / (u1 - u0)
    }
}

/// Loads every `<model>.csv` in `dir`, keyed by model name.
pub fn load_curve_dir(dir: impl AsRef<Path>) -> Result<BTreeMap<String, PowerCurve>, CurveError> {
    let mut curves = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            curves.insert(stem.to_string(), PowerCurve::load(&path)?);
        }
    }
    Ok(curves)
}
