use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::WindError;

/// Fewest samples a fit accepts.
pub const MIN_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Weibull,
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Weibull { shape: f64, scale: f64 },
    Rayleigh { sigma: f64 },
}

/// A fitted wind-speed distribution, speeds in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindDistribution {
    #[serde(flatten)]
    pub family: Family,
    pub source_sample_size: usize,
}

impl WindDistribution {
    pub fn weibull(shape: f64, scale: f64) -> Self {
        WindDistribution {
            family: Family::Weibull { shape, scale },
            source_sample_size: 0,
        }
    }

    pub fn rayleigh(sigma: f64) -> Self {
        WindDistribution {
            family: Family::Rayleigh { sigma },
            source_sample_size: 0,
        }
    }

    /// Rayleigh(σ) is Weibull(2, σ√2).
    fn as_weibull(&self) -> (f64, f64) {
        match self.family {
            Family::Weibull { shape, scale } => (shape, scale),
            Family::Rayleigh { sigma } => (2.0, sigma * std::f64::consts::SQRT_2),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let (k, lam) = self.as_weibull();
        let z = u / lam;
        if z == 0.0 {
            return if k < 1.0 {
                f64::INFINITY
            } else if k == 1.0 {
                1.0 / lam
            } else {
                0.0
            };
        }
        k / lam * z.powf(k - 1.0) * (-z.powf(k)).exp()
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let (k, lam) = self.as_weibull();
        1.0 - (-(u / lam).powf(k)).exp()
    }

    /// Inverse CDF for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let (k, lam) = self.as_weibull();
        lam * (-(1.0 - p).ln()).powf(1.0 / k)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

fn check_samples(samples: &[f64]) -> Result<(), WindError> {
    if samples.len() < MIN_SAMPLES {
        return Err(WindError::TooFewSamples {
            min: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(WindError::NonPositiveSample { index, value });
    }
    let first = samples[0];
    if samples.iter().all(|&v| v == first) {
        return Err(WindError::DegenerateSample);
    }
    Ok(())
}

/// Maximum-likelihood fit of the chosen family.
pub fn fit_distribution(samples: &[f64], kind: FamilyKind) -> Result<WindDistribution, WindError> {
    check_samples(samples)?;
    let n = samples.len() as f64;
    let family = match kind {
        FamilyKind::Rayleigh => {
            let sigma = (samples.iter().map(|u| u * u).sum::<f64>() / (2.0 * n)).sqrt();
            Family::Rayleigh { sigma }
        }
        FamilyKind::Weibull => {
            let shape = weibull_shape(samples);
            let scale = (samples.iter().map(|u| u.powf(shape)).sum::<f64>() / n).powf(1.0 / shape);
            Family::Weibull { shape, scale }
        }
    };
    Ok(WindDistribution {
        family,
        source_sample_size: samples.len(),
    })
}

/// Root of the profile score `Σu^k ln u / Σu^k − 1/k − mean(ln u)`, which is
/// increasing in `k`.
fn weibull_shape(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    // Scale out the magnitude so u^k stays finite for large k.
    let top = samples.iter().cloned().fold(0.0_f64, f64::max);
    let logs: Vec<f64> = samples.iter().map(|u| (u / top).ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / n;
    let score = |k: f64| {
        let (mut s0, mut s1) = (0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
        }
        s1 / s0 - 1.0 / k - mean_log
    };
    let (mut lo, mut hi) = (1e-3, 1.0);
    while score(hi) < 0.0 && hi < 1e3 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Seeded Weibull speeds standing in for site measurements.
pub fn synthetic_measurements(shape: f64, scale: f64, n: usize, seed: u64) -> Vec<f64> {
    let dist = WindDistribution::weibull(shape, scale);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}
