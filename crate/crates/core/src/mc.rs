//! Monte Carlo critical values under the unit-root null.
//!
//! Replication `i` draws from its own ChaCha stream `(seed, i)`, and results
//! are gathered in replication order, so output is bit-identical for any
//! number of worker threads.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::adf::Tail;
use crate::error::{Error, Result};
use crate::fmt::{canonical_json, sha256_hex};
use crate::recursive::{self, TestConfig};
use crate::series::TimeSeries;

/// Quantile levels reported by default.
pub const LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

/// `y_t = d * T^(-eta) + y_{t-1} + sigma * e_t`, `y_0 = sigma * e_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullSpec {
    pub drift_scale: f64,
    pub drift_exponent: f64,
    pub innovation_sd: f64,
}

impl Default for NullSpec {
    fn default() -> Self {
        NullSpec {
            drift_scale: 1.0,
            drift_exponent: 1.0,
            innovation_sd: 1.0,
        }
    }
}

impl NullSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.innovation_sd > 0.0 && self.innovation_sd.is_finite()) {
            return Err(Error::config("innovation standard deviation must be positive"));
        }
        if !(self.drift_exponent >= 0.0 && self.drift_exponent.is_finite()) {
            return Err(Error::config("drift exponent must be non-negative"));
        }
        if !self.drift_scale.is_finite() {
            return Err(Error::config("drift scale must be finite"));
        }
        Ok(())
    }
}

/// RNG for replication `index` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn null_path_values<R: Rng + ?Sized>(t: usize, spec: &NullSpec, rng: &mut R) -> Vec<f64> {
    let drift = spec.drift_scale * (t as f64).powf(-spec.drift_exponent);
    let sd = spec.innovation_sd;
    let mut out = Vec::with_capacity(t);
    let mut y = sd * rng.sample::<f64, _>(StandardNormal);
    out.push(y);
    for _ in 1..t {
        y += drift + sd * rng.sample::<f64, _>(StandardNormal);
        out.push(y);
    }
    out
}

/// One path of length `t` from the null process.
pub fn simulate_null_path<R: Rng + ?Sized>(t: usize, spec: &NullSpec, rng: &mut R) -> Result<TimeSeries> {
    spec.validate()?;
    if t < 2 {
        return Err(Error::TooShort(t));
    }
    TimeSeries::from_values(null_path_values(t, spec, rng), "null")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Adf,
    Radf,
    Sadf,
    Gsadf,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [TestKind::Adf, TestKind::Radf, TestKind::Sadf, TestKind::Gsadf];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Adf => "adf",
            TestKind::Radf => "radf",
            TestKind::Sadf => "sadf",
            TestKind::Gsadf => "gsadf",
        }
    }

    /// Scalar statistic of this test on `values`.
    pub fn statistic(self, values: &[f64], cfg: &TestConfig) -> Result<f64> {
        self.statistic_with(values, cfg, true)
    }

    fn statistic_with(self, values: &[f64], cfg: &TestConfig, parallel: bool) -> Result<f64> {
        match self {
            TestKind::Adf => recursive::adf_full_values(values, cfg),
            TestKind::Radf => recursive::radf_values(values, cfg, parallel).map(|r| r.0),
            TestKind::Sadf => recursive::sadf_values(values, cfg, parallel).map(|r| r.0),
            TestKind::Gsadf => recursive::bsadf_values(values, cfg, parallel)
                .map(|s| s.sup().expect("bsadf has a finite entry")),
        }
    }
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown test `{s}`")))
    }
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Type-7 sample quantile (linear interpolation between order statistics) of
/// an ascending slice.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Key under which a level is stored, e.g. `"0.95"`.
pub fn level_key(level: f64) -> String {
    format!("{level:.2}")
}

/// Parses levels given as percentages or fractions (`95` or `0.95`).
pub fn parse_level(text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid level `{text}`")))?;
    let level = if v > 1.0 { v / 100.0 } else { v };
    if !(0.5..1.0).contains(&level) {
        return Err(Error::config(format!("level `{text}` must lie in [50, 100) percent")));
    }
    Ok(level)
}

/// Digest of everything that determines a simulated distribution.
pub fn config_digest(
    test: &str,
    t: usize,
    cfg: &TestConfig,
    null_spec: &NullSpec,
    replications: usize,
    seed: u64,
) -> String {
    let doc = json!({
        "test": test,
        "T": t,
        "test_config": cfg,
        "null": null_spec,
        "replications": replications,
        "seed": seed,
    });
    sha256_hex(canonical_json(&doc).as_bytes())
}

fn check_budget(missing: usize, total: usize) -> Result<()> {
    if missing * 100 > total {
        return Err(Error::MissingReplications { missing, total });
    }
    Ok(())
}

fn check_run(t: usize, cfg: &TestConfig, null: &NullSpec, replications: usize) -> Result<usize> {
    null.validate()?;
    if replications == 0 {
        return Err(Error::config("at least one replication is required"));
    }
    cfg.resolve_min_window(t)
}

fn replicate<T: Send>(
    replications: usize,
    seed: u64,
    t: usize,
    null: &NullSpec,
    f: impl Fn(&[f64]) -> T + Sync + Send,
) -> Vec<T> {
    (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(seed, i as u64);
            f(&null_path_values(t, null, &mut rng))
        })
        .collect()
}

/// Simulated critical values for one scalar test, with the sorted null draws
/// kept for p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub test: TestKind,
    pub tail: Tail,
    /// Level (as `"0.95"`) to critical value.
    pub quantiles: BTreeMap<String, f64>,
    #[serde(rename = "T")]
    pub t: usize,
    pub replications: usize,
    pub missing: usize,
    pub seed: u64,
    pub test_config: TestConfig,
    pub null: NullSpec,
    pub config_digest: String,
    /// Ascending null statistics from non-degenerate replications.
    pub null_stats: Vec<f64>,
}

impl CriticalValues {
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles.get(&level_key(level)).copied()
    }

    /// Critical value at an arbitrary level from the stored draws.
    pub fn critical_value(&self, level: f64) -> f64 {
        match self.tail {
            Tail::Right => quantile_type7(&self.null_stats, level),
            Tail::Left => quantile_type7(&self.null_stats, 1.0 - level),
        }
    }

    /// Share of null draws at least as extreme as `stat` in the test's tail.
    pub fn p_value(&self, stat: f64) -> f64 {
        let n = self.null_stats.len() as f64;
        let extreme = match self.tail {
            Tail::Right => self.null_stats.iter().filter(|&&x| x >= stat).count(),
            Tail::Left => self.null_stats.iter().filter(|&&x| x <= stat).count(),
        };
        extreme as f64 / n
    }

    fn from_draws(
        test: TestKind,
        draws: Vec<Option<f64>>,
        levels: &[f64],
        t: usize,
        cfg: &TestConfig,
        null: &NullSpec,
        seed: u64,
    ) -> Result<Self> {
        let replications = draws.len();
        let mut stats: Vec<f64> = draws.into_iter().flatten().collect();
        let missing = replications - stats.len();
        check_budget(missing, replications)?;
        stats.sort_by(f64::total_cmp);
        let mut cv = CriticalValues {
            test,
            tail: cfg.adf.tail,
            quantiles: BTreeMap::new(),
            t,
            replications,
            missing,
            seed,
            test_config: *cfg,
            null: *null,
            config_digest: config_digest(test.name(), t, cfg, null, replications, seed),
            null_stats: stats,
        };
        for &level in levels {
            let value = cv.critical_value(level);
            cv.quantiles.insert(level_key(level), value);
        }
        Ok(cv)
    }
}

/// Runs `test` on `replications` null paths of length `t` and returns the
/// 90/95/99% critical values.
pub fn critical_values(
    test: TestKind,
    t: usize,
    cfg: &TestConfig,
    null: &NullSpec,
    replications: usize,
    seed: u64,
) -> Result<CriticalValues> {
    critical_values_at(test, &LEVELS, t, cfg, null, replications, seed)
}

pub fn critical_values_at(
    test: TestKind,
    levels: &[f64],
    t: usize,
    cfg: &TestConfig,
    null: &NullSpec,
    replications: usize,
    seed: u64,
) -> Result<CriticalValues> {
    check_run(t, cfg, null, replications)?;
    if test == TestKind::Radf {
        cfg.resolve_rolling_width(t)?;
    }
    let draws = replicate(replications, seed, t, null, |path| {
        test.statistic_with(path, cfg, false).ok()
    });
    CriticalValues::from_draws(test, draws, levels, t, cfg, null, seed)
}

/// Per-end-index BSADF quantiles at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSequence {
    pub end_indices: Vec<usize>,
    pub values: Vec<f64>,
    pub level: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub replications: usize,
    pub seed: u64,
    pub test_config: TestConfig,
    pub null: NullSpec,
    pub config_digest: String,
}

impl CvSequence {
    /// Digest this document's configuration should carry.
    pub fn expected_digest(&self) -> String {
        config_digest("bsadf", self.t, &self.test_config, &self.null, self.replications, self.seed)
    }
}

/// BSADF sequences from every replication of one run. Both the per-date
/// critical values and the scalar GSADF critical values derive from it, so
/// they share draws.
#[derive(Debug, Clone)]
pub struct BsadfDraws {
    pub end_indices: Vec<usize>,
    /// One sequence per replication.
    pub draws: Vec<Vec<Option<f64>>>,
    t: usize,
    cfg: TestConfig,
    null: NullSpec,
    seed: u64,
}

impl BsadfDraws {
    pub fn replications(&self) -> usize {
        self.draws.len()
    }

    pub fn cv_sequence(&self, level: f64) -> Result<CvSequence> {
        let reps = self.draws.len();
        let mut values = Vec::with_capacity(self.end_indices.len());
        let mut column = Vec::with_capacity(reps);
        for j in 0..self.end_indices.len() {
            column.clear();
            column.extend(self.draws.iter().filter_map(|d| d[j]));
            check_budget(reps - column.len(), reps)?;
            column.sort_by(f64::total_cmp);
            values.push(quantile_type7(&column, level));
        }
        Ok(CvSequence {
            end_indices: self.end_indices.clone(),
            values,
            level,
            t: self.t,
            replications: reps,
            seed: self.seed,
            test_config: self.cfg,
            null: self.null,
            config_digest: config_digest("bsadf", self.t, &self.cfg, &self.null, reps, self.seed),
        })
    }

    /// Scalar GSADF critical values: the sup of each replication's sequence.
    pub fn gsadf_critical_values(&self, levels: &[f64]) -> Result<CriticalValues> {
        let sups = self
            .draws
            .iter()
            .map(|d| d.iter().flatten().copied().reduce(f64::max))
            .collect();
        let mut cv = CriticalValues::from_draws(
            TestKind::Gsadf,
            sups,
            levels,
            self.t,
            &self.cfg,
            &self.null,
            self.seed,
        )?;
        // same draws as a plain gsadf run with this seed
        cv.config_digest = config_digest("gsadf", self.t, &self.cfg, &self.null, self.draws.len(), self.seed);
        Ok(cv)
    }
}

/// Simulates full BSADF sequences on `replications` null paths.
pub fn simulate_bsadf(
    t: usize,
    cfg: &TestConfig,
    null: &NullSpec,
    replications: usize,
    seed: u64,
) -> Result<BsadfDraws> {
    let w0 = check_run(t, cfg, null, replications)?;
    let draws = replicate(replications, seed, t, null, |path| {
        recursive::bsadf_values(path, cfg, false)
            .map(|s| s.stats)
            .unwrap_or_else(|_| vec![None; t + 1 - w0])
    });
    Ok(BsadfDraws {
        end_indices: (w0 - 1..t).collect(),
        draws,
        t,
        cfg: *cfg,
        null: *null,
        seed,
    })
}

/// Per-date BSADF critical values at `level`, aligned with
/// [`recursive::bsadf_sequence`] for a series of length `t`.
pub fn bsadf_cv_sequence(
    level: f64,
    t: usize,
    cfg: &TestConfig,
    null: &NullSpec,
    replications: usize,
    seed: u64,
) -> Result<CvSequence> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::config(format!("level {level} must lie in (0, 1)")));
    }
    simulate_bsadf(t, cfg, null, replications, seed)?.cv_sequence(level)
}

/// On-disk cache documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacheDocument {
    CriticalValues(CriticalValues),
    CvSequence(CvSequence),
}

impl CacheDocument {
    pub fn config_digest(&self) -> &str {
        match self {
            CacheDocument::CriticalValues(c) => &c.config_digest,
            CacheDocument::CvSequence(c) => &c.config_digest,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Writes through a temporary sibling and a rename.
    pub fn store(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let tmp = path.with_extension("json.partial");
        std::fs::write(&tmp, self.to_json()?).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }
}

/// Directory of cache documents named by config digest.
#[derive(Debug, Clone)]
pub struct CvCache {
    dir: PathBuf,
}

impl CvCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(CvCache { dir })
    }

    pub fn path_for(&self, digest: &str, level: Option<f64>) -> PathBuf {
        match level {
            None => self.dir.join(format!("{digest}.json")),
            Some(l) => self.dir.join(format!("{digest}-{}.json", level_key(l))),
        }
    }

    /// Loads the matching document or simulates and stores it.
    pub fn critical_values(
        &self,
        test: TestKind,
        t: usize,
        cfg: &TestConfig,
        null: &NullSpec,
        replications: usize,
        seed: u64,
    ) -> Result<CriticalValues> {
        let digest = config_digest(test.name(), t, cfg, null, replications, seed);
        let path = self.path_for(&digest, None);
        if path.exists() {
            if let CacheDocument::CriticalValues(cv) = CacheDocument::load(&path)? {
                if cv.config_digest == digest {
                    return Ok(cv);
                }
            }
        }
        let cv = critical_values(test, t, cfg, null, replications, seed)?;
        CacheDocument::CriticalValues(cv.clone()).store(&path)?;
        Ok(cv)
    }

    pub fn cv_sequence(
        &self,
        level: f64,
        t: usize,
        cfg: &TestConfig,
        null: &NullSpec,
        replications: usize,
        seed: u64,
    ) -> Result<CvSequence> {
        let digest = config_digest("bsadf", t, cfg, null, replications, seed);
        let path = self.path_for(&digest, Some(level));
        if path.exists() {
            if let CacheDocument::CvSequence(cv) = CacheDocument::load(&path)? {
                if cv.config_digest == digest && level_key(cv.level) == level_key(level) {
                    return Ok(cv);
                }
            }
        }
        let cv = bsadf_cv_sequence(level, t, cfg, null, replications, seed)?;
        CacheDocument::CvSequence(cv.clone()).store(&path)?;
        Ok(cv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_limit_is_a_drift_line() {
        let spec = NullSpec {
            innovation_sd: 1e-300,
            ..NullSpec::default()
        };
        let t = 50;
        let s = simulate_null_path(t, &spec, &mut replication_rng(1, 0)).unwrap();
        let step = 1.0 / t as f64;
        for (i, v) in s.values().iter().enumerate() {
            assert!((v - s.values()[0] - i as f64 * step).abs() < 1e-12);
        }
    }

    #[test]
    fn increments_have_unit_moments() {
        let spec = NullSpec {
            drift_scale: 0.0,
            ..NullSpec::default()
        };
        let s = simulate_null_path(10_001, &spec, &mut replication_rng(2, 0)).unwrap();
        let inc: Vec<f64> = s.values().windows(2).map(|w| w[1] - w[0]).collect();
        let n = inc.len() as f64;
        let mean = inc.iter().sum::<f64>() / n;
        let var = inc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let spec = NullSpec::default();
        let a = null_path_values(20, &spec, &mut replication_rng(9, 3));
        let b = null_path_values(20, &spec, &mut replication_rng(9, 3));
        let c = null_path_values(20, &spec, &mut replication_rng(9, 4));
        assert_eq!(a, b);
        assert_ne!(a[..8], c[..8]);
    }

    #[test]
    fn type7_quantiles() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_type7(&x, 0.0), 1.0);
        assert_eq!(quantile_type7(&x, 0.5), 3.0);
        assert_eq!(quantile_type7(&x, 0.9), 4.6);
        assert_eq!(quantile_type7(&x, 1.0), 5.0);
        assert_eq!(quantile_type7(&[7.0], 0.95), 7.0);
    }

    #[test]
    fn levels_parse() {
        assert_eq!(parse_level("95").unwrap(), 0.95);
        assert_eq!(parse_level("0.9").unwrap(), 0.9);
        assert!(parse_level("101").is_err());
        assert!(parse_level("abc").is_err());
        assert_eq!(level_key(0.9), "0.90");
    }

    #[test]
    fn critical_values_are_monotone_and_reproducible() {
        let cfg = TestConfig::default().with_rolling_width(15);
        for test in TestKind::ALL {
            let cv = critical_values(test, 60, &cfg, &NullSpec::default(), 200, 5).unwrap();
            let q: Vec<f64> = LEVELS.iter().map(|&l| cv.quantile(l).unwrap()).collect();
            assert!(q[0] <= q[1] && q[1] <= q[2], "{test}: {q:?}");
            assert_eq!(cv.null_stats.len(), 200);
            let again = critical_values(test, 60, &cfg, &NullSpec::default(), 200, 5).unwrap();
            assert_eq!(cv, again);
        }
    }

    #[test]
    fn p_values() {
        let cv = critical_values(TestKind::Sadf, 50, &TestConfig::default(), &NullSpec::default(), 100, 1).unwrap();
        assert_eq!(cv.p_value(f64::INFINITY), 0.0);
        assert_eq!(cv.p_value(f64::NEG_INFINITY), 1.0);
        let median = cv.null_stats[50];
        assert!((cv.p_value(median) - 0.5).abs() <= 0.01);
    }

    #[test]
    fn left_tail_uses_lower_quantiles() {
        let cfg = TestConfig {
            adf: crate::adf::AdfSpec {
                tail: Tail::Left,
                ..Default::default()
            },
            ..TestConfig::default()
        };
        let cv = critical_values(TestKind::Adf, 100, &cfg, &NullSpec::default(), 300, 3).unwrap();
        let (q90, q99) = (cv.quantile(0.90).unwrap(), cv.quantile(0.99).unwrap());
        assert!(q99 <= q90 && q90 < 0.0, "{q90} {q99}");
    }

    #[test]
    fn sequence_is_aligned_and_dominated_by_scalar() {
        let cfg = TestConfig::default();
        let draws = simulate_bsadf(60, &cfg, &NullSpec::default(), 200, 11).unwrap();
        let seq = draws.cv_sequence(0.95).unwrap();
        let w0 = cfg.resolve_min_window(60).unwrap();
        assert_eq!(seq.values.len(), 60 - w0 + 1);
        assert_eq!(seq.end_indices[0], w0 - 1);
        let scalar = draws.gsadf_critical_values(&LEVELS).unwrap();
        let q95 = scalar.quantile(0.95).unwrap();
        assert!(seq.values.iter().all(|v| *v <= q95));
        // identical draws to a direct gsadf simulation
        let direct = critical_values(TestKind::Gsadf, 60, &cfg, &NullSpec::default(), 200, 11).unwrap();
        assert_eq!(direct, scalar);
    }

    #[test]
    fn digest_tracks_configuration() {
        let cfg = TestConfig::default();
        let null = NullSpec::default();
        let a = config_digest("gsadf", 100, &cfg, &null, 1000, 1);
        assert_eq!(a, config_digest("gsadf", 100, &cfg, &null, 1000, 1));
        assert_ne!(a, config_digest("gsadf", 100, &cfg, &null, 1000, 2));
        assert_ne!(a, config_digest("sadf", 100, &cfg, &null, 1000, 1));
        assert_ne!(a, config_digest("gsadf", 100, &cfg.with_min_window(12), &null, 1000, 1));
        let drifting = NullSpec { drift_scale: 0.0, ..null };
        assert_ne!(a, config_digest("gsadf", 100, &cfg, &drifting, 1000, 1));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn cache_hits_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CvCache::new(dir.path()).unwrap();
        let cfg = TestConfig::default();
        let null = NullSpec::default();
        let first = cache.critical_values(TestKind::Sadf, 50, &cfg, &null, 100, 4).unwrap();
        let path = cache.path_for(&first.config_digest, None);
        let bytes = std::fs::read(&path).unwrap();
        let hit = cache.critical_values(TestKind::Sadf, 50, &cfg, &null, 100, 4).unwrap();
        assert_eq!(first, hit);
        let recomputed = CacheDocument::CriticalValues(
            critical_values(TestKind::Sadf, 50, &cfg, &null, 100, 4).unwrap(),
        );
        assert_eq!(recomputed.to_json().unwrap().into_bytes(), bytes);

        let seq = cache.cv_sequence(0.95, 50, &cfg, &null, 100, 4).unwrap();
        let seq_hit = cache.cv_sequence(0.95, 50, &cfg, &null, 100, 4).unwrap();
        assert_eq!(seq, seq_hit);
    }

    #[test]
    fn invalid_runs_are_rejected() {
        let cfg = TestConfig::default();
        let bad = NullSpec {
            innovation_sd: 0.0,
            ..NullSpec::default()
        };
        assert!(critical_values(TestKind::Adf, 50, &cfg, &bad, 100, 0).is_err());
        assert!(critical_values(TestKind::Adf, 50, &cfg, &NullSpec::default(), 0, 0).is_err());
        assert!(critical_values(TestKind::Radf, 50, &cfg, &NullSpec::default(), 100, 0).is_err());
        assert!(bsadf_cv_sequence(1.5, 50, &cfg, &NullSpec::default(), 100, 0).is_err());
    }
}
