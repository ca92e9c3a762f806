//! Synthetic series for size and power studies.
//!
//! All generators draw from `ChaCha8Rng::seed_from_u64(seed)`. Per time step
//! the Evans generator consumes one standard normal and then one uniform for
//! the Bernoulli draw, in every regime, so a seed gives the same draws
//! whatever path the process takes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{null_path_values, NullSpec};
use crate::series::TimeSeries;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_len(t: usize) -> Result<()> {
    if t < 2 {
        return Err(Error::TooShort(t));
    }
    Ok(())
}

/// Random walk from the null process.
pub fn gen_random_walk(t: usize, null: &NullSpec, seed: u64) -> Result<TimeSeries> {
    null.validate()?;
    check_len(t)?;
    TimeSeries::from_values(null_path_values(t, null, &mut rng_for(seed)), format!("rw seed={seed}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Spec {
    #[serde(rename = "T")]
    pub t: usize,
    pub rho: f64,
    pub sigma: f64,
    /// First index following `y_t = rho * y_{t-1} + sigma * e_t`.
    pub regime_start: usize,
    /// Level added to the first observation.
    pub y0: f64,
}

/// Driftless random walk up to `regime_start`, explosive AR(1) from there on.
///
/// The innovations are the same normals [`gen_random_walk`] draws for the
/// seed, so `rho -> 1` recovers that walk.
pub fn gen_explosive_ar1(spec: &Ar1Spec, seed: u64) -> Result<TimeSeries> {
    check_len(spec.t)?;
    if spec.regime_start >= spec.t {
        return Err(Error::config("regime start must lie inside the sample"));
    }
    if !(spec.rho > 1.0 && spec.rho.is_finite()) {
        return Err(Error::config("rho must exceed 1"));
    }
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) || !spec.y0.is_finite() {
        return Err(Error::config("sigma must be non-negative and y0 finite"));
    }
    let mut rng = rng_for(seed);
    let mut out = Vec::with_capacity(spec.t);
    let mut y = spec.y0 + spec.sigma * rng.sample::<f64, _>(StandardNormal);
    out.push(y);
    for t in 1..spec.t {
        let e = spec.sigma * rng.sample::<f64, _>(StandardNormal);
        let persistence = if t >= spec.regime_start { spec.rho } else { 1.0 };
        y = persistence * y + e;
        out.push(y);
    }
    TimeSeries::from_values(
        out,
        format!("ar1 rho={} regime_start={} seed={seed}", spec.rho, spec.regime_start),
    )
}

/// Periodically collapsing bubble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansSpec {
    /// Growth rate below the threshold.
    pub r: f64,
    pub b_threshold: f64,
    /// Level the bubble collapses to.
    pub delta: f64,
    /// Probability the bubble survives a period above the threshold.
    pub pi: f64,
    /// Scale of the mean-one lognormal shock.
    pub tau: f64,
    pub b0: f64,
    #[serde(rename = "T")]
    pub t: usize,
}

impl Default for EvansSpec {
    fn default() -> Self {
        EvansSpec {
            r: 0.05,
            b_threshold: 1.0,
            delta: 0.5,
            pi: 0.85,
            tau: 0.05,
            b0: 0.5,
            t: 400,
        }
    }
}

impl EvansSpec {
    pub fn validate(&self) -> Result<()> {
        check_len(self.t)?;
        let ok = self.r > 0.0
            && self.b_threshold > 0.0
            && self.delta > 0.0
            && self.delta < self.b_threshold
            && self.pi > 0.0
            && self.pi <= 1.0
            && self.tau >= 0.0
            && self.b0 > 0.0
            && [self.r, self.b_threshold, self.delta, self.tau, self.b0]
                .iter()
                .all(|v| v.is_finite());
        if !ok {
            return Err(Error::config(
                "Evans parameters need r > 0, 0 < delta < b, 0 < pi <= 1, tau >= 0, B0 > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvansSample {
    pub series: TimeSeries,
    /// `B_t > b_threshold`
    pub regime_mask: Vec<bool>,
    /// Indices `t + 1` whose value followed a collapse draw at `t`.
    pub collapses: Vec<usize>,
}

impl EvansSample {
    /// Half-open index ranges where the mask is set.
    pub fn regimes(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, &m) in self.regime_mask.iter().enumerate() {
            match (m, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(s..self.regime_mask.len());
        }
        out
    }

    /// Number of 1 -> 0 transitions of the regime mask.
    pub fn falling_edges(&self) -> usize {
        self.regime_mask.windows(2).filter(|w| w[0] && !w[1]).count()
    }
}

/// Evans periodically collapsing bubble:
///
/// ```text
/// B_{t+1} = (1 + r) B_t u_{t+1}                                          if B_t <= b
/// B_{t+1} = [delta + (1 + r) / pi * theta_{t+1} (B_t - delta / (1 + r))] u_{t+1}   if B_t > b
/// ```
///
/// with `u = exp(y - tau^2 / 2)`, `y ~ N(0, tau^2)` and `theta ~ Bernoulli(pi)`.
pub fn gen_evans_bubble(spec: &EvansSpec, seed: u64) -> Result<EvansSample> {
    spec.validate()?;
    let mut rng = rng_for(seed);
    let growth = 1.0 + spec.r;
    let mut values = Vec::with_capacity(spec.t);
    let mut collapses = Vec::new();
    let mut b = spec.b0;
    values.push(b);
    for t in 1..spec.t {
        let y = spec.tau * rng.sample::<f64, _>(StandardNormal);
        let survive = rng.gen::<f64>() < spec.pi;
        let u = (y - 0.5 * spec.tau * spec.tau).exp();
        b = if b <= spec.b_threshold {
            growth * b * u
        } else {
            if !survive {
                collapses.push(t);
            }
            let theta = if survive { 1.0 } else { 0.0 };
            (spec.delta + growth / spec.pi * theta * (b - spec.delta / growth)) * u
        };
        values.push(b);
    }
    let regime_mask = values.iter().map(|&v| v > spec.b_threshold).collect();
    let series = TimeSeries::from_values(values, format!("evans seed={seed}"))?;
    Ok(EvansSample {
        series,
        regime_mask,
        collapses,
    })
}

/// Draws `n` mean-one lognormal shocks with scale `tau`.
pub fn lognormal_shocks(n: usize, tau: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| (tau * rng.sample::<f64, _>(StandardNormal) - 0.5 * tau * tau).exp())
        .collect()
}
