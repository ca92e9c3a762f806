//! OLS and the augmented Dickey-Fuller t-ratio on a single window.
//!
//! The regression is
//!
//! ```text
//! dy_t = a (+ g * t) + b * y_{t-1} + sum_{i=1..k} f_i * dy_{t-i} + e_t
//! ```
//!
//! and the statistic is `b_hat / se(b_hat)` with the homoskedastic `n - p`
//! variance estimator. Right- and left-tail tests share the statistic; only
//! the rejection region differs (see [`Tail`]).
//!
//! This module fits every window from scratch with a pivoted Householder QR.
//! The recursive tests use a separate moment-based route and are checked
//! against this one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Relative tolerance on the diagonal of R, after scaling every design column
/// to unit norm, below which the design is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// A fit whose residual sum of squares is at most this fraction of the
/// response's sum of squares is treated as exact (zero residual variance).
pub const RSS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    Constant,
    ConstantAndTrend,
}

impl Deterministic {
    /// Number of deterministic regressors.
    pub fn count(self) -> usize {
        match self {
            Deterministic::Constant => 1,
            Deterministic::ConstantAndTrend => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Explosive alternative: reject for large positive statistics.
    Right,
    /// Stationary alternative: reject for large negative statistics.
    Left,
}

impl Tail {
    pub fn rejects(self, stat: f64, critical_value: f64) -> bool {
        match self {
            Tail::Right => stat > critical_value,
            Tail::Left => stat < critical_value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagPolicy {
    Fixed(usize),
    /// Choose the lag in `0..=k_max` minimising BIC, separately for each window.
    Bic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdfSpec {
    pub lag_policy: LagPolicy,
    pub deterministic: Deterministic,
    pub tail: Tail,
}

impl Default for AdfSpec {
    fn default() -> Self {
        AdfSpec {
            lag_policy: LagPolicy::Fixed(0),
            deterministic: Deterministic::Constant,
            tail: Tail::Right,
        }
    }
}

impl AdfSpec {
    /// Largest lag the policy may use.
    pub fn max_lag(&self) -> usize {
        match self.lag_policy {
            LagPolicy::Fixed(k) | LagPolicy::Bic(k) => k,
        }
    }

    /// Smallest window length that supports estimation at every candidate lag.
    pub fn min_window_len(&self) -> usize {
        min_window_len(self.max_lag(), self.deterministic)
    }
}

/// Regressor count: deterministic terms, the lagged level and `k` lagged differences.
pub fn regressor_count(k: usize, deterministic: Deterministic) -> usize {
    deterministic.count() + 1 + k
}

/// A window of `n` observations supports lag `k` iff `n - 1 - k >= p + 2`.
pub fn min_window_len(k: usize, deterministic: Deterministic) -> usize {
    regressor_count(k, deterministic) + k + 3
}

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Design {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged design rows".into()));
        }
        Ok(Design {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<f64>,
    /// Infinite for coefficients of a rank-deficient design.
    pub standard_errors: Vec<f64>,
    pub residual_variance: f64,
    pub rss: f64,
    pub n_obs: usize,
    pub rank: usize,
    pub degenerate: bool,
}

/// Least squares via pivoted Householder QR.
///
/// Rank-deficient designs return the minimum-norm solution (in unit-norm
/// column scaling) with `degenerate = true`; so do exact fits.
pub fn ols_fit(design: &Design, response: &[f64]) -> Result<RegressionResult> {
    let (n, p) = (design.rows, design.cols);
    if response.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows but response has {} entries",
            response.len()
        )));
    }
    if p == 0 || n <= p {
        return Err(Error::DimensionMismatch(format!(
            "need more rows than columns, got {n}x{p}"
        )));
    }

    // Column-major working copy with unit-norm columns.
    let mut scale = vec![0.0; p];
    let mut a = vec![0.0; n * p];
    for c in 0..p {
        let norm = (0..n).map(|r| design.get(r, c).powi(2)).sum::<f64>().sqrt();
        scale[c] = if norm > 0.0 { norm } else { 1.0 };
        for r in 0..n {
            a[c * n + r] = design.get(r, c) / scale[c];
        }
    }
    let mut qtb = response.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut diag = vec![0.0; p];

    for j in 0..p {
        // pivot on the largest remaining column norm
        let col_norm2 = |a: &[f64], c: usize| a[c * n + j..c * n + n].iter().map(|x| x * x).sum::<f64>();
        let best = (j..p)
            .max_by(|&x, &y| col_norm2(&a, x).total_cmp(&col_norm2(&a, y)))
            .unwrap_or(j);
        if best != j {
            for r in 0..n {
                a.swap(j * n + r, best * n + r);
            }
            perm.swap(j, best);
        }
        let (alpha, v) = householder(&a[j * n + j..j * n + n]);
        diag[j] = alpha;
        if let Some(v) = v {
            for c in j + 1..p {
                reflect(&v, &mut a[c * n + j..c * n + n]);
            }
            reflect(&v, &mut qtb[j..]);
        }
        a[j * n + j] = alpha;
        for r in j + 1..n {
            a[j * n + r] = 0.0;
        }
    }

    let r_at = |row: usize, col: usize| a[col * n + row];
    let lead = diag[0].abs();
    let rank = diag
        .iter()
        .take_while(|d| lead > 0.0 && d.abs() > RANK_TOL * lead)
        .count();

    // Coefficients in pivoted, scaled coordinates.
    let mut z = vec![0.0; p];
    if rank == p {
        back_substitute(p, &r_at, &qtb[..p], &mut z);
    } else if rank > 0 {
        min_norm_trapezoid(rank, p, &r_at, &qtb[..rank], &mut z);
    }

    let mut coefficients = vec![0.0; p];
    for (j, &orig) in perm.iter().enumerate() {
        coefficients[orig] = z[j] / scale[orig];
    }

    let rss: f64 = (0..n)
        .map(|r| {
            let fit: f64 = design.row(r).iter().zip(&coefficients).map(|(x, b)| x * b).sum();
            (response[r] - fit).powi(2)
        })
        .sum();
    let tss: f64 = response.iter().map(|y| y * y).sum();
    let residual_variance = rss / (n - p) as f64;
    let exact = tss == 0.0 || rss <= RSS_TOL * tss;

    let mut standard_errors = vec![f64::INFINITY; p];
    if rank == p {
        // diag((R^T R)^{-1}) = squared row norms of R^{-1}
        let rinv = upper_inverse(p, &r_at);
        for (j, &orig) in perm.iter().enumerate() {
            let row_norm2: f64 = (j..p).map(|c| rinv[j * p + c].powi(2)).sum();
            standard_errors[orig] = (residual_variance * row_norm2).sqrt() / scale[orig];
        }
    }

    Ok(RegressionResult {
        coefficients,
        standard_errors,
        residual_variance,
        rss,
        n_obs: n,
        rank,
        degenerate: rank < p || exact,
    })
}

/// Householder reflector mapping `x` onto `alpha * e1`. Returns `alpha` and
/// the unit vector `v` of `I - 2 v v^T`, or `None` when `x` is already aligned.
fn householder(x: &[f64]) -> (f64, Option<Vec<f64>>) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (0.0, None);
    }
    let alpha = if x[0] > 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return (x[0], None);
    }
    v.iter_mut().for_each(|t| *t /= vnorm);
    (alpha, Some(v))
}

fn reflect(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= 2.0 * dot * vi;
    }
}

fn back_substitute(p: usize, r: &impl Fn(usize, usize) -> f64, rhs: &[f64], out: &mut [f64]) {
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|c| r(i, c) * out[c]).sum();
        out[i] = (rhs[i] - s) / r(i, i);
    }
}

fn upper_inverse(p: usize, r: &impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut inv = vec![0.0; p * p];
    for col in 0..p {
        for i in (0..=col).rev() {
            let e = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=col).map(|c| r(i, c) * inv[c * p + col]).sum();
            inv[i * p + col] = (e - s) / r(i, i);
        }
    }
    inv
}

/// Minimum-norm `z` with `M z = c`, where `M` is the leading `rank x p` block
/// of R. Uses a QR of `M^T` (complete orthogonal decomposition).
fn min_norm_trapezoid(
    rank: usize,
    p: usize,
    r: &impl Fn(usize, usize) -> f64,
    c: &[f64],
    out: &mut [f64],
) {
    // mt is p x rank, column-major
    let mut mt = vec![0.0; p * rank];
    for i in 0..rank {
        for j in i..p {
            mt[i * p + j] = r(i, j);
        }
    }
    let mut reflectors = Vec::with_capacity(rank);
    let mut r2 = vec![0.0; rank * rank];
    for j in 0..rank {
        let (alpha, v) = householder(&mt[j * p + j..j * p + p]);
        if let Some(v) = &v {
            for col in j + 1..rank {
                reflect(v, &mut mt[col * p + j..col * p + p]);
            }
        }
        mt[j * p + j] = alpha;
        for col in j..rank {
            r2[j * rank + col] = mt[col * p + j];
        }
        reflectors.push(v);
    }
    // R2^T w = c
    let mut w = vec![0.0; p];
    for i in 0..rank {
        let s: f64 = (0..i).map(|k| r2[k * rank + i] * w[k]).sum();
        w[i] = (c[i] - s) / r2[i * rank + i];
    }
    // z = H_0 H_1 ... H_{rank-1} [w; 0]
    for j in (0..rank).rev() {
        if let Some(v) = &reflectors[j] {
            reflect(v, &mut w[j..]);
        }
    }
    out.copy_from_slice(&w);
}

/// Builds the ADF design for `values` at lag `k` on the effective sample
/// `first_diff..n`, where `first_diff >= k + 1` indexes the first differenced
/// observation used. Levels are centred on the window's last value.
pub fn adf_design(
    values: &[f64],
    k: usize,
    deterministic: Deterministic,
    first_diff: usize,
) -> Result<(Design, Vec<f64>)> {
    let n = values.len();
    if first_diff < k + 1 || first_diff >= n {
        return Err(Error::WindowTooShort {
            len: n,
            needed: min_window_len(k, deterministic),
        });
    }
    let anchor = values[n - 1];
    let last = (n - 1) as f64;
    let dy = |s: usize| values[s] - values[s - 1];
    let mut rows = Vec::with_capacity(n - first_diff);
    let mut response = Vec::with_capacity(n - first_diff);
    for s in first_diff..n {
        let mut row = Vec::with_capacity(regressor_count(k, deterministic));
        row.push(1.0);
        if deterministic == Deterministic::ConstantAndTrend {
            row.push(s as f64 - last);
        }
        row.push(values[s - 1] - anchor);
        row.extend((1..=k).map(|i| dy(s - i)));
        rows.push(row);
        response.push(dy(s));
    }
    Ok((Design::from_rows(&rows)?, response))
}

/// ADF t-ratio at a fixed lag, on the window's own effective sample.
pub fn adf_stat_at_lag(values: &[f64], k: usize, deterministic: Deterministic) -> Result<f64> {
    let needed = min_window_len(k, deterministic);
    if values.len() < needed {
        return Err(Error::WindowTooShort {
            len: values.len(),
            needed,
        });
    }
    let (design, response) = adf_design(values, k, deterministic, k + 1)?;
    let fit = ols_fit(&design, &response)?;
    if fit.degenerate {
        return Err(Error::DegenerateWindow);
    }
    let b = deterministic.count();
    Ok(fit.coefficients[b] / fit.standard_errors[b])
}

/// The ADF statistic of a raw value window under `spec`.
pub fn adf_stat_values(values: &[f64], spec: &AdfSpec) -> Result<f64> {
    let k = match spec.lag_policy {
        LagPolicy::Fixed(k) => k,
        LagPolicy::Bic(k_max) => select_lag_bic_values(values, k_max, spec.deterministic)?,
    };
    adf_stat_at_lag(values, k, spec.deterministic)
}

/// The ADF statistic of `window` under `spec`.
///
/// Degenerate windows (exact fit or collinear regressors) are an error, never
/// an infinite statistic.
pub fn adf_statistic(window: &TimeSeries, spec: &AdfSpec) -> Result<f64> {
    adf_stat_values(window.values(), spec)
}

/// BIC for each lag `0..=k_max`, all fit on the common sample implied by
/// `k_max`. Degenerate candidates are `None`.
pub fn bic_values(values: &[f64], k_max: usize, deterministic: Deterministic) -> Result<Vec<Option<f64>>> {
    let needed = min_window_len(k_max, deterministic);
    if values.len() < needed {
        return Err(Error::WindowTooShort {
            len: values.len(),
            needed,
        });
    }
    (0..=k_max)
        .map(|k| {
            let (design, response) = adf_design(values, k, deterministic, k_max + 1)?;
            let fit = ols_fit(&design, &response)?;
            let n = fit.n_obs as f64;
            Ok((!fit.degenerate).then(|| bic(n, fit.rss, design.cols())))
        })
        .collect()
}

pub(crate) fn bic(n: f64, rss: f64, p: usize) -> f64 {
    n * (rss / n).ln() + p as f64 * n.ln()
}

/// Index of the smallest BIC, ties to the smaller lag.
pub(crate) fn argmin_bic(bics: impl IntoIterator<Item = Option<f64>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, b) in bics.into_iter().enumerate() {
        if let Some(b) = b {
            if best.is_none_or(|(_, cur)| b < cur) {
                best = Some((k, b));
            }
        }
    }
    best.map(|(k, _)| k)
}

pub fn select_lag_bic_values(values: &[f64], k_max: usize, deterministic: Deterministic) -> Result<usize> {
    argmin_bic(bic_values(values, k_max, deterministic)?).ok_or(Error::DegenerateWindow)
}

/// Lag in `0..=k_max` minimising BIC on a common effective sample.
pub fn select_lag_bic(window: &TimeSeries, k_max: usize, deterministic: Deterministic) -> Result<usize> {
    select_lag_bic_values(window.values(), k_max, deterministic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_walk(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = 0.0;
        (0..n)
            .map(|_| {
                y += rng.sample::<f64, _>(StandardNormal);
                y
            })
            .collect()
    }

    /// Solves `A x = b` by Gauss-Jordan elimination on an explicit inverse.
    fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for i in 0..n {
            let piv = (i..n).max_by(|&x, &y| m[x][i].abs().total_cmp(&m[y][i].abs())).unwrap();
            m.swap(i, piv);
            let d = m[i][i];
            m[i].iter_mut().for_each(|v| *v /= d);
            for r in 0..n {
                if r != i {
                    let f = m[r][i];
                    let pivot_row = m[i].clone();
                    m[r].iter_mut().zip(pivot_row).for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// OLS by explicit normal equations: (X'X)^{-1} X'y.
    fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let p = x[0].len();
        let xtx: Vec<Vec<f64>> = (0..p)
            .map(|i| (0..p).map(|j| x.iter().map(|r| r[i] * r[j]).sum()).collect())
            .collect();
        let xty: Vec<f64> = (0..p).map(|i| x.iter().zip(y).map(|(r, v)| r[i] * v).sum()).collect();
        let inv = invert(&xtx);
        let beta: Vec<f64> = (0..p).map(|i| (0..p).map(|j| inv[i][j] * xty[j]).sum()).collect();
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(r, v)| (v - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
            .sum();
        let s2 = rss / (x.len() - p) as f64;
        let se = (0..p).map(|i| (s2 * inv[i][i]).sqrt()).collect();
        (beta, se)
    }

    #[test]
    fn exact_linear_fit_is_degenerate() {
        let d = Design::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let fit = ols_fit(&d, &[1.0, 2.0, 3.0]).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert!(fit.residual_variance < 1e-25);
        assert!(fit.degenerate);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0, 1.0, rng.gen()]).collect();
        let y: Vec<f64> = (0..10).map(|_| rng.gen()).collect();
        let fit = ols_fit(&Design::from_rows(&rows).unwrap(), &y).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.rank, 2);
        // minimum norm splits the intercept evenly across the duplicate columns
        assert!((fit.coefficients[0] - fit.coefficients[1]).abs() < 1e-10);
        assert!(fit.standard_errors.iter().all(|s| *s >= 0.0));
    }

    #[test]
    fn dimension_errors() {
        let d = Design::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(ols_fit(&d, &[1.0, 2.0]), Err(Error::DimensionMismatch(_))));
        let square = Design::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(ols_fit(&square, &[1.0, 2.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn matches_normal_equation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
        let fit = ols_fit(&Design::from_rows(&rows).unwrap(), &y).unwrap();
        let (beta, se) = normal_equations(&rows, &y);
        assert!(!fit.degenerate);
        for i in 0..3 {
            assert!((fit.coefficients[i] - beta[i]).abs() < 1e-10);
            assert!((fit.standard_errors[i] - se[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn adf_matches_two_regressor_oracle() {
        let y = random_walk(50, 50);
        // Explicit 2x2 inversion on [1, y_{t-1}] -> dy_t.
        let (mut n, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for t in 1..y.len() {
            let (x, d) = (y[t - 1], y[t] - y[t - 1]);
            n += 1.0;
            sx += x;
            sxx += x * x;
            sy += d;
            sxy += x * d;
        }
        let det = n * sxx - sx * sx;
        let (i00, i01, i11) = (sxx / det, -sx / det, n / det);
        let a = i00 * sy + i01 * sxy;
        let b = i01 * sy + i11 * sxy;
        let rss: f64 = (1..y.len())
            .map(|t| (y[t] - y[t - 1] - a - b * y[t - 1]).powi(2))
            .sum();
        let oracle = b / (rss / (n - 2.0) * i11).sqrt();
        let stat = adf_stat_values(&y, &AdfSpec::default()).unwrap();
        assert!((stat - oracle).abs() < 1e-10, "{stat} vs {oracle}");
    }

    #[test]
    fn linear_series_is_degenerate() {
        let y: Vec<f64> = (0..30).map(f64::from).collect();
        assert!(matches!(adf_stat_values(&y, &AdfSpec::default()), Err(Error::DegenerateWindow)));
        let flat = vec![2.5; 30];
        assert!(matches!(adf_stat_values(&flat, &AdfSpec::default()), Err(Error::DegenerateWindow)));
    }

    #[test]
    fn short_window_rejected() {
        let y = random_walk(10, 1);
        let spec = AdfSpec {
            lag_policy: LagPolicy::Fixed(3),
            ..AdfSpec::default()
        };
        // p = 5, so n - 1 - 3 >= 7 needs n >= 11
        assert_eq!(spec.min_window_len(), 11);
        assert!(matches!(adf_stat_values(&y, &spec), Err(Error::WindowTooShort { len: 10, needed: 11 })));
    }

    #[test]
    fn tails_share_the_statistic() {
        let y = random_walk(80, 9);
        let right = adf_stat_values(&y, &AdfSpec::default()).unwrap();
        let left = adf_stat_values(&y, &AdfSpec { tail: Tail::Left, ..AdfSpec::default() }).unwrap();
        assert_eq!(right, left);
        assert!(Tail::Right.rejects(2.0, 1.5) && !Tail::Left.rejects(2.0, 1.5));
        assert!(Tail::Left.rejects(-3.0, -2.9));
    }

    #[test]
    fn reversal_changes_statistic() {
        let y = random_walk(60, 4);
        let mut r = y.clone();
        r.reverse();
        let spec = AdfSpec::default();
        assert_ne!(adf_stat_values(&y, &spec).unwrap(), adf_stat_values(&r, &spec).unwrap());
    }

    #[test]
    fn bic_with_zero_max_is_zero() {
        let s = TimeSeries::from_values(random_walk(40, 2), "w").unwrap();
        assert_eq!(select_lag_bic(&s, 0, Deterministic::Constant).unwrap(), 0);
    }

    #[test]
    fn bic_picks_zero_on_ar1() {
        let mut zero = 0;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let mut y = 0.0;
            let values: Vec<f64> = (0..400)
                .map(|_| {
                    y = 0.9 * y + rng.sample::<f64, _>(StandardNormal);
                    y
                })
                .collect();
            if select_lag_bic_values(&values, 4, Deterministic::Constant).unwrap() == 0 {
                zero += 1;
            }
        }
        assert!(zero >= 90, "BIC chose k=0 in {zero}/100 runs");
    }

    #[test]
    fn bic_matches_independent_refits() {
        // dy_t = 0.6 dy_{t-1} + e_t
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let (mut y, mut d) = (0.0, 0.0);
        let values: Vec<f64> = (0..300)
            .map(|_| {
                d = 0.6 * d + rng.sample::<f64, _>(StandardNormal);
                y += d;
                y
            })
            .collect();
        let k_max = 4;
        let got = bic_values(&values, k_max, Deterministic::Constant).unwrap();
        for k in 0..=k_max {
            let mut x = Vec::new();
            let mut resp = Vec::new();
            for s in k_max + 1..values.len() {
                let mut row = vec![1.0, values[s - 1]];
                row.extend((1..=k).map(|i| values[s - i] - values[s - i - 1]));
                x.push(row);
                resp.push(values[s] - values[s - 1]);
            }
            let (beta, _) = normal_equations(&x, &resp);
            let rss: f64 = x
                .iter()
                .zip(&resp)
                .map(|(r, v)| (v - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
                .sum();
            let n = x.len() as f64;
            let oracle = n * (rss / n).ln() + (k + 2) as f64 * n.ln();
            assert!((got[k].unwrap() - oracle).abs() < 1e-9, "k={k}");
        }
        assert_eq!(select_lag_bic_values(&values, k_max, Deterministic::Constant).unwrap(), 1);
    }

    #[test]
    fn trend_specification_runs() {
        let y = random_walk(60, 5);
        let spec = AdfSpec {
            deterministic: Deterministic::ConstantAndTrend,
            lag_policy: LagPolicy::Fixed(2),
            ..AdfSpec::default()
        };
        let stat = adf_stat_values(&y, &spec).unwrap();
        // oracle: regress on [1, t, y_{t-1}, dy_{t-1}, dy_{t-2}] with raw levels
        let mut x = Vec::new();
        let mut resp = Vec::new();
        for s in 3..y.len() {
            x.push(vec![1.0, s as f64, y[s - 1], y[s - 1] - y[s - 2], y[s - 2] - y[s - 3]]);
            resp.push(y[s] - y[s - 1]);
        }
        let (beta, se) = normal_equations(&x, &resp);
        assert!((stat - beta[2] / se[2]).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_design(seed in any::<u64>(), n in 6usize..40, p in 1usize..5) {
            prop_assume!(n > p + 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let d = Design::from_rows(&rows).unwrap();
            let fit = ols_fit(&d, &y).unwrap();
            prop_assume!(!fit.degenerate);
            let resid: Vec<f64> = (0..n)
                .map(|r| y[r] - d.row(r).iter().zip(&fit.coefficients).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max) * 10.0 * n as f64;
            for c in 0..p {
                let ip: f64 = (0..n).map(|r| d.get(r, c) * resid[r]).sum();
                prop_assert!(ip.abs() < 1e-8 * scale);
            }
        }

        #[test]
        fn affine_invariance(seed in any::<u64>(), a in 1e-3f64..1e3, c in -1e3f64..1e3, k in 0usize..3) {
            let y = random_walk(60, seed);
            let spec = AdfSpec { lag_policy: LagPolicy::Fixed(k), ..AdfSpec::default() };
            let base = adf_stat_values(&y, &spec).unwrap();
            let moved: Vec<f64> = y.iter().map(|v| a * v + c).collect();
            let stat = adf_stat_values(&moved, &spec).unwrap();
            prop_assert!((base - stat).abs() < 1e-12 * base.abs().max(1.0), "{} vs {}", base, stat);
        }
    }
}
