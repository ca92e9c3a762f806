//! Recursive right-tail tests: full-sample ADF, rolling ADF, SADF, GSADF and
//! the backward-sup (BSADF) sequence used for date-stamping.
//!
//! Windows are evaluated from running cross-moments instead of refitting.
//! Each window `[r1, t]` is always accumulated the same way, backwards from
//! `t` with levels centred on `y_t`, so a given window yields the same bits no
//! matter which test asks for it. That keeps the ordering laws
//! (`adf <= sadf <= gsadf`, `radf <= gsadf`) exact, and makes every sequence
//! independent of how end points are split across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adf::{self, AdfSpec, Deterministic, LagPolicy, RSS_TOL};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

const MAX_P: usize = 16;

/// Largest lag (fixed or BIC maximum) the moment engine supports.
pub const MAX_LAG: usize = MAX_P - 3;

/// Squared scaled Cholesky pivot below which a window's regressors are
/// treated as collinear. Moments square the condition number, so this sits
/// at the square of a `1e-6` pivot rather than the QR route's `1e-10`.
const CHOL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinWindow {
    /// `floor(T * (0.01 + 1.8 / sqrt(T)))`
    PsyDefault,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestConfig {
    pub adf: AdfSpec,
    pub min_window: MinWindow,
    /// Window width for the rolling test.
    pub rolling_width: Option<usize>,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            adf: AdfSpec::default(),
            min_window: MinWindow::PsyDefault,
            rolling_width: None,
        }
    }
}

/// The usual minimum-window rule before clamping.
pub fn psy_min_window(t: usize) -> usize {
    let tf = t as f64;
    (tf * (0.01 + 1.8 / tf.sqrt())).floor() as usize
}

impl TestConfig {
    pub fn with_min_window(mut self, w: usize) -> Self {
        self.min_window = MinWindow::Fixed(w);
        self
    }

    pub fn with_rolling_width(mut self, w: usize) -> Self {
        self.rolling_width = Some(w);
        self
    }

    fn check_lag(&self) -> Result<()> {
        if self.adf.max_lag() > MAX_LAG {
            return Err(Error::config(format!(
                "lag {} exceeds the supported maximum {MAX_LAG}",
                self.adf.max_lag()
            )));
        }
        Ok(())
    }

    /// Resolves the minimum window for a sample of `t` observations.
    pub fn resolve_min_window(&self, t: usize) -> Result<usize> {
        self.check_lag()?;
        let floor = self.adf.min_window_len();
        let w0 = match self.min_window {
            MinWindow::PsyDefault => psy_min_window(t).max(floor),
            MinWindow::Fixed(w) if w < floor => {
                return Err(Error::config(format!(
                    "minimum window {w} is below the {floor} observations the regression needs"
                )))
            }
            MinWindow::Fixed(w) => w,
        };
        if t < w0 {
            return Err(Error::WindowTooShort { len: t, needed: w0 });
        }
        Ok(w0)
    }

    /// Resolves and validates the rolling width for a sample of `t` observations.
    pub fn resolve_rolling_width(&self, t: usize) -> Result<usize> {
        self.check_lag()?;
        let width = self
            .rolling_width
            .ok_or_else(|| Error::config("the rolling test requires a rolling width"))?;
        let floor = self.adf.min_window_len();
        if width < floor {
            return Err(Error::config(format!(
                "rolling width {width} is below the {floor} observations the regression needs"
            )));
        }
        if t < width {
            return Err(Error::WindowTooShort { len: t, needed: width });
        }
        Ok(width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    ForwardAdf,
    RollingAdf,
    Bsadf,
}

/// Per-end-index statistics. Degenerate windows are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSequence {
    pub end_indices: Vec<usize>,
    pub stats: Vec<Option<f64>>,
    pub kind: SequenceKind,
}

impl StatSequence {
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Supremum over non-missing entries.
    pub fn sup(&self) -> Option<f64> {
        sup(self.stats.iter().copied())
    }
}

fn sup(stats: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    stats.into_iter().flatten().fold(None, |m, x| Some(m.map_or(x, |m: f64| m.max(x))))
}

/// Cross-moments of one ADF regression. Regressor order is
/// `[1, (trend), dy_{s-1}, .., dy_{s-k}, y_{s-1}]`, so the level coefficient
/// is always last.
#[derive(Clone)]
struct Moments {
    p: usize,
    n: usize,
    xtx: [f64; MAX_P * MAX_P],
    xty: [f64; MAX_P],
    yy: f64,
}

impl Moments {
    fn new(p: usize) -> Self {
        Moments {
            p,
            n: 0,
            xtx: [0.0; MAX_P * MAX_P],
            xty: [0.0; MAX_P],
            yy: 0.0,
        }
    }

    fn add(&mut self, row: &[f64], y: f64) {
        for i in 0..self.p {
            let ri = row[i];
            self.xty[i] += ri * y;
            for j in i..self.p {
                self.xtx[i * MAX_P + j] += ri * row[j];
            }
        }
        self.yy += y * y;
        self.n += 1;
    }

    /// t-ratio of the last selected column and the residual sum of squares,
    /// for the regression on columns `idx` (ascending). `None` if degenerate.
    fn solve(&self, idx: &[usize]) -> Option<(f64, f64)> {
        let m = idx.len();
        let mut d = [0.0; MAX_P];
        for (a, &i) in idx.iter().enumerate() {
            let v = self.xtx[i * MAX_P + i];
            if v <= 0.0 {
                return None;
            }
            d[a] = v.sqrt();
        }
        let scaled = |a: usize, b: usize| {
            let (i, j) = (idx[a.min(b)], idx[a.max(b)]);
            self.xtx[i * MAX_P + j] / (d[a] * d[b])
        };
        let mut l = [0.0; MAX_P * MAX_P];
        for j in 0..m {
            let mut s = scaled(j, j);
            for k in 0..j {
                s -= l[j * MAX_P + k] * l[j * MAX_P + k];
            }
            if s <= CHOL_TOL {
                return None;
            }
            let ljj = s.sqrt();
            l[j * MAX_P + j] = ljj;
            for i in j + 1..m {
                let mut s = scaled(i, j);
                for k in 0..j {
                    s -= l[i * MAX_P + k] * l[j * MAX_P + k];
                }
                l[i * MAX_P + j] = s / ljj;
            }
        }
        let mut z = [0.0; MAX_P];
        let mut explained = 0.0;
        for i in 0..m {
            let mut s = self.xty[idx[i]] / d[i];
            for k in 0..i {
                s -= l[i * MAX_P + k] * z[k];
            }
            z[i] = s / l[i * MAX_P + i];
            explained += z[i] * z[i];
        }
        finish(self.yy, explained, self.n, m, z[m - 1])
    }
}

/// Shared tail of both solvers: with the level column last, its t-ratio is
/// `z_last / sigma`.
#[inline]
fn finish(yy: f64, explained: f64, n: usize, p: usize, z_last: f64) -> Option<(f64, f64)> {
    let rss = yy - explained;
    if yy == 0.0 || rss <= RSS_TOL * yy || n <= p {
        return None;
    }
    let sigma = (rss / (n - p) as f64).sqrt();
    Some((z_last / sigma, rss))
}

/// Scalar moments for the default constant-only, zero-lag regression.
#[derive(Clone, Copy, Default)]
struct SimpleMoments {
    n: f64,
    sx: f64,
    sxx: f64,
    sy: f64,
    sxy: f64,
    syy: f64,
}

impl SimpleMoments {
    #[inline]
    fn add(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sxx += x * x;
        self.sy += y;
        self.sxy += x * y;
        self.syy += y * y;
    }

    #[inline]
    fn t_stat(&self) -> Option<f64> {
        if self.sxx <= 0.0 {
            return None;
        }
        let d0 = self.n.sqrt();
        let d1 = self.sxx.sqrt();
        let rho = self.sx / (d0 * d1);
        let l11sq = 1.0 - rho * rho;
        if l11sq <= CHOL_TOL {
            return None;
        }
        let z0 = self.sy / d0;
        let z1 = (self.sxy / d1 - rho * z0) / l11sq.sqrt();
        finish(self.syy, z0 * z0 + z1 * z1, self.n as usize, 2, z1).map(|(t, _)| t)
    }
}

/// Walks the windows `[r1, end]` for `r1 = end - w_min + 1` down to `stop`,
/// calling `visit(r1, stat)` for each. Implements every lag policy.
struct WindowScan<'a> {
    values: &'a [f64],
    spec: AdfSpec,
}

impl<'a> WindowScan<'a> {
    fn new(values: &'a [f64], spec: AdfSpec) -> Self {
        WindowScan { values, spec }
    }

    fn dy(&self, s: usize) -> f64 {
        self.values[s] - self.values[s - 1]
    }

    fn scan(&self, end: usize, w_min: usize, stop: usize, mut visit: impl FnMut(usize, Option<f64>)) {
        let first = end + 1 - w_min;
        debug_assert!(stop <= first);
        match (self.spec.lag_policy, self.spec.deterministic) {
            (LagPolicy::Fixed(0), Deterministic::Constant) => {
                let anchor = self.values[end];
                let mut m = SimpleMoments::default();
                let mut s = end;
                for r1 in (stop..=first).rev() {
                    while s > r1 {
                        m.add(self.values[s - 1] - anchor, self.dy(s));
                        s -= 1;
                    }
                    visit(r1, m.t_stat());
                }
            }
            (LagPolicy::Fixed(k), det) => {
                let p = adf::regressor_count(k, det);
                let idx: Vec<usize> = (0..p).collect();
                let mut m = Moments::new(p);
                let mut row = [0.0; MAX_P];
                // next differenced observation to add
                let mut s = end;
                for r1 in (stop..=first).rev() {
                    while s > r1 + k {
                        self.fill_row(s, end, k, det, &mut row);
                        m.add(&row[..p], self.dy(s));
                        s -= 1;
                    }
                    visit(r1, m.solve(&idx).map(|(t, _)| t));
                }
            }
            (LagPolicy::Bic(k_max), det) => self.scan_bic(end, first, stop, k_max, det, visit),
        }
    }

    fn scan_bic(
        &self,
        end: usize,
        first: usize,
        stop: usize,
        k_max: usize,
        det: Deterministic,
        mut visit: impl FnMut(usize, Option<f64>),
    ) {
        let dc = det.count();
        let mut accs: Vec<Moments> = (0..=k_max)
            .map(|k| Moments::new(adf::regressor_count(k, det)))
            .collect();
        // Column sets: own-sample regressions, and lag-k sub-blocks of the k_max moments.
        let own: Vec<Vec<usize>> = (0..=k_max)
            .map(|k| (0..adf::regressor_count(k, det)).collect())
            .collect();
        let p_max = adf::regressor_count(k_max, det);
        let sub: Vec<Vec<usize>> = (0..=k_max)
            .map(|k| (0..dc + k).chain(std::iter::once(p_max - 1)).collect())
            .collect();
        let mut next: Vec<usize> = vec![end; k_max + 1];
        let mut row = [0.0; MAX_P];
        for r1 in (stop..=first).rev() {
            for (k, acc) in accs.iter_mut().enumerate() {
                while next[k] > r1 + k {
                    let s = next[k];
                    self.fill_row(s, end, k, det, &mut row);
                    acc.add(&row[..acc.p], self.dy(s));
                    next[k] -= 1;
                }
            }
            let common = &accs[k_max];
            let n = common.n as f64;
            let chosen = adf::argmin_bic(
                sub.iter()
                    .map(|cols| common.solve(cols).map(|(_, rss)| adf::bic(n, rss, cols.len()))),
            );
            let stat = chosen.and_then(|k| accs[k].solve(&own[k]).map(|(t, _)| t));
            visit(r1, stat);
        }
    }

    fn fill_row(&self, s: usize, end: usize, k: usize, det: Deterministic, row: &mut [f64]) {
        let mut c = 0;
        row[c] = 1.0;
        c += 1;
        if det == Deterministic::ConstantAndTrend {
            row[c] = s as f64 - end as f64;
            c += 1;
        }
        for i in 1..=k {
            row[c] = self.dy(s - i);
            c += 1;
        }
        row[c] = self.values[s - 1] - self.values[end];
    }

    /// Statistic of the single window `[r1, end]`.
    fn window(&self, r1: usize, end: usize) -> Option<f64> {
        let mut out = None;
        self.scan(end, end + 1 - r1, r1, |_, s| out = s);
        out
    }

    /// Sup over `r1` in `0..=end + 1 - w_min` for one end point.
    fn backward_sup(&self, end: usize, w_min: usize) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.scan(end, w_min, 0, |_, s| {
            if let Some(s) = s {
                best = Some(best.map_or(s, |b| b.max(s)));
            }
        });
        best
    }
}

/// Statistic of the window `values[r1..=end]` through the moment engine.
///
/// `None` when the window is degenerate or shorter than the regression needs.
pub fn window_adf(values: &[f64], r1: usize, end: usize, spec: &AdfSpec) -> Option<f64> {
    if end >= values.len() || r1 > end || end + 1 - r1 < spec.min_window_len() || spec.max_lag() > MAX_LAG {
        return None;
    }
    WindowScan::new(values, *spec).window(r1, end)
}

fn map_ends(
    ends: std::ops::Range<usize>,
    parallel: bool,
    f: impl Fn(usize) -> Option<f64> + Sync + Send,
) -> Vec<Option<f64>> {
    if parallel {
        ends.into_par_iter().map(f).collect()
    } else {
        ends.map(f).collect()
    }
}

fn sequence(ends: std::ops::Range<usize>, stats: Vec<Option<f64>>, kind: SequenceKind) -> StatSequence {
    StatSequence {
        end_indices: ends.collect(),
        stats,
        kind,
    }
}

pub(crate) fn adf_full_values(values: &[f64], cfg: &TestConfig) -> Result<f64> {
    cfg.resolve_min_window(values.len())?;
    let t = values.len();
    WindowScan::new(values, cfg.adf).window(0, t - 1).ok_or(Error::DegenerateWindow)
}

pub(crate) fn sadf_values(values: &[f64], cfg: &TestConfig, parallel: bool) -> Result<(f64, StatSequence)> {
    let w0 = cfg.resolve_min_window(values.len())?;
    let scan = WindowScan::new(values, cfg.adf);
    let ends = w0 - 1..values.len();
    let stats = map_ends(ends.clone(), parallel, |t| scan.window(0, t));
    let seq = sequence(ends, stats, SequenceKind::ForwardAdf);
    let sup = seq.sup().ok_or(Error::AllDegenerate)?;
    Ok((sup, seq))
}

pub(crate) fn radf_values(values: &[f64], cfg: &TestConfig, parallel: bool) -> Result<(f64, StatSequence)> {
    let width = cfg.resolve_rolling_width(values.len())?;
    let scan = WindowScan::new(values, cfg.adf);
    let ends = width - 1..values.len();
    let stats = map_ends(ends.clone(), parallel, |t| scan.window(t + 1 - width, t));
    let seq = sequence(ends, stats, SequenceKind::RollingAdf);
    let sup = seq.sup().ok_or(Error::AllDegenerate)?;
    Ok((sup, seq))
}

pub(crate) fn bsadf_values(values: &[f64], cfg: &TestConfig, parallel: bool) -> Result<StatSequence> {
    let w0 = cfg.resolve_min_window(values.len())?;
    let scan = WindowScan::new(values, cfg.adf);
    let ends = w0 - 1..values.len();
    let stats = map_ends(ends.clone(), parallel, |t| scan.backward_sup(t, w0));
    let seq = sequence(ends, stats, SequenceKind::Bsadf);
    if seq.sup().is_none() {
        return Err(Error::AllDegenerate);
    }
    Ok(seq)
}

/// Right-tail ADF statistic over the whole sample.
pub fn adf_full(s: &TimeSeries, cfg: &TestConfig) -> Result<f64> {
    adf_full_values(s.values(), cfg)
}

/// Sup of the forward-expanding ADF sequence `ADF(0, t)`, `t = w0-1 .. T-1`.
pub fn sadf(s: &TimeSeries, cfg: &TestConfig) -> Result<(f64, StatSequence)> {
    sadf_values(s.values(), cfg, true)
}

/// Sup of ADF over every window of width `cfg.rolling_width`.
pub fn radf(s: &TimeSeries, cfg: &TestConfig) -> Result<(f64, StatSequence)> {
    radf_values(s.values(), cfg, true)
}

/// `BSADF(t) = sup_{r1 <= t - w0 + 1} ADF(r1, t)` for every end `t >= w0 - 1`.
pub fn bsadf_sequence(s: &TimeSeries, cfg: &TestConfig) -> Result<StatSequence> {
    bsadf_values(s.values(), cfg, true)
}

/// Sup of ADF over every window of at least `w0` observations; the maximum
/// of [`bsadf_sequence`].
pub fn gsadf(s: &TimeSeries, cfg: &TestConfig) -> Result<f64> {
    bsadf_sequence(s, cfg).map(|seq| seq.sup().expect("bsadf has a finite entry"))
}
