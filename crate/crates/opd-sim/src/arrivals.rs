//! Non-homogeneous Poisson arrivals sampled by thinning.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::patientgen::DATASET_SIZE;

pub const SESSION_MINUTES: f64 = 360.0;
/// Whole trajectories are redrawn until the count is exact; this bounds it.
pub const MAX_RESAMPLE_ATTEMPTS: usize = 1000;

/// Piecewise-linear intensity λ(t) in patients per minute, given as
/// breakpoints `(t, λ)`. Two breakpoints may share a time to express a step;
/// the rate is right-continuous there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntensityProfile {
    breakpoints: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for IntensityProfile {
    type Error = SimError;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        IntensityProfile::new(v)
    }
}

impl From<IntensityProfile> for Vec<(f64, f64)> {
    fn from(p: IntensityProfile) -> Self {
        p.breakpoints
    }
}

impl IntensityProfile {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(SimError::Validation(format!("intensity profile: {m}")));
        if breakpoints.len() < 2 {
            return bad("need at least two breakpoints");
        }
        if breakpoints[0].0 != 0.0 {
            return bad("first breakpoint must be at t = 0");
        }
        if breakpoints.iter().any(|(t, l)| !t.is_finite() || !l.is_finite() || *l < 0.0) {
            return bad("times and rates must be finite, rates non-negative");
        }
        if breakpoints.windows(2).any(|w| w[1].0 < w[0].0) {
            return bad("breakpoint times must be non-decreasing");
        }
        let p = IntensityProfile { breakpoints };
        if p.horizon() <= 0.0 {
            return bad("horizon must be positive");
        }
        if p.lambda_max() <= 0.0 {
            return bad("lambda_max must be positive");
        }
        Ok(p)
    }

    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        IntensityProfile::new(vec![(0.0, rate), (horizon, rate)])
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn horizon(&self) -> f64 {
        self.breakpoints.last().map(|b| b.0).unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.breakpoints.iter().map(|b| b.1).fold(0.0, f64::max)
    }

    /// λ(t); zero outside `[0, horizon]`.
    pub fn rate(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.horizon() {
            return 0.0;
        }
        // Last segment whose start is <= t, so steps are right-continuous.
        let idx = self.breakpoints.partition_point(|b| b.0 <= t);
        if idx >= self.breakpoints.len() {
            return self.breakpoints.last().unwrap().1;
        }
        let (t0, l0) = self.breakpoints[idx - 1];
        let (t1, l1) = self.breakpoints[idx];
        if t1 == t0 {
            return l1;
        }
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    /// ∫λ(t)dt over the horizon (exact for piecewise-linear λ).
    pub fn integral(&self) -> f64 {
        self.breakpoints.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
    }

    /// Rescale rates so the integral equals `total`.
    pub fn scaled_to(&self, total: f64) -> Result<Self> {
        let k = total / self.integral();
        IntensityProfile::new(self.breakpoints.iter().map(|(t, l)| (*t, l * k)).collect())
    }
}

/// Morning-peaked profile: 0.8x the mean rate at opening, 1.6x at t = 90,
/// 0.4x at close, scaled so expected arrivals equal the dataset size.
pub fn default_profile() -> IntensityProfile {
    let mean = DATASET_SIZE as f64 / SESSION_MINUTES;
    IntensityProfile::new(vec![(0.0, 0.8 * mean), (90.0, 1.6 * mean), (SESSION_MINUTES, 0.4 * mean)])
        .and_then(|p| p.scaled_to(DATASET_SIZE as f64))
        .expect("default profile is valid")
}

/// One thinned trajectory over the profile's horizon.
pub fn thin<R: Rng + ?Sized>(profile: &IntensityProfile, rng: &mut R) -> Vec<f64> {
    let lmax = profile.lambda_max();
    let horizon = profile.horizon();
    let exp = Exp::new(lmax).expect("lambda_max > 0 by construction");
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += exp.sample(rng);
        if t > horizon {
            return out;
        }
        if rng.random::<f64>() * lmax < profile.rate(t) {
            out.push(t);
        }
    }
}

/// Exactly `n` sorted arrival times, redrawing whole trajectories until the
/// thinned count matches.
pub fn sample_arrivals<R: Rng + ?Sized>(profile: &IntensityProfile, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    for _ in 0..MAX_RESAMPLE_ATTEMPTS {
        let times = thin(profile, rng);
        if times.len() == n {
            return Ok(times);
        }
    }
    Err(SimError::Arrivals(format!(
        "no trajectory with exactly {n} arrivals in {MAX_RESAMPLE_ATTEMPTS} attempts (expected count {:.1})",
        profile.integral()
    )))
}
