//! Post-estimation residual tests: Breusch-Godfrey, ARCH-LM, Jarque-Bera,
//! Ramsey RESET and the Brown-Durbin-Evans CUSUM.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};
use crate::ols::{self, DesignMatrix, OlsFit, RANK_TOLERANCE};

pub const LEVEL: f64 = 0.05;

/// CUSUM 5% boundary coefficient.
pub const CUSUM_A_5PCT: f64 = 0.948;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
    /// `p < 0.05`.
    pub reject: bool,
    /// Statistic undefined (e.g. all-zero residuals); reported as `p = 1`.
    pub degenerate: bool,
}

impl TestOutcome {
    fn new(statistic: f64, p_value: f64, df: usize) -> Self {
        Self {
            statistic,
            p_value,
            df,
            reject: p_value < LEVEL,
            degenerate: false,
        }
    }

    fn degenerate(df: usize) -> Self {
        Self {
            statistic: 0.0,
            p_value: 1.0,
            df,
            reject: false,
            degenerate: true,
        }
    }
}

fn is_zero_residual(fit: &OlsFit) -> bool {
    let scale: f64 = fit.y.iter().map(|v| v * v).sum::<f64>().max(1.0);
    fit.ssr <= 1e-24 * scale
}

fn lagged(values: &[f64], lag: usize) -> Vec<f64> {
    (0..values.len())
        .map(|t| if t >= lag { values[t - lag] } else { 0.0 })
        .collect()
}

/// LM = T·R² from regressing residuals on the original regressors and
/// `lags` lagged residuals (zero-filled at the start); χ²(lags).
pub fn breusch_godfrey(fit: &OlsFit, lags: usize) -> Result<TestOutcome> {
    if lags == 0 {
        return Err(Error::Spec("Breusch-Godfrey needs at least one lag".into()));
    }
    let t = fit.nobs;
    if t <= fit.nparams + lags + 5 {
        return Err(Error::DegreesOfFreedom {
            observations: t,
            parameters: fit.nparams + lags + 5,
        });
    }
    if is_zero_residual(fit) {
        return Ok(TestOutcome::degenerate(lags));
    }
    let extra = (1..=lags)
        .map(|i| (format!("resid_lag{i}"), lagged(&fit.residuals, i)))
        .collect();
    let aux = ols::fit(&fit.design.append(extra)?, &fit.residuals)?;
    let lm = t as f64 * aux.r_squared.max(0.0);
    Ok(TestOutcome::new(lm, dist::chi2_sf(lm, lags as f64), lags))
}

/// Engle's ARCH-LM: `e²_t` on a constant and `e²_{t-1..t-lags}`;
/// LM = n·R² with n the auxiliary sample size; χ²(lags).
pub fn arch_lm(residuals: &[f64], lags: usize) -> Result<TestOutcome> {
    if lags == 0 {
        return Err(Error::Spec("ARCH-LM needs at least one lag".into()));
    }
    let n = residuals.len();
    if n <= 2 * lags + 1 + 5 {
        return Err(Error::DegreesOfFreedom {
            observations: n.saturating_sub(lags),
            parameters: lags + 1 + 5,
        });
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let first = sq[0];
    if sq.iter().all(|&v| (v - first).abs() <= 1e-14 * first.max(1e-300)) {
        return Ok(TestOutcome::degenerate(lags));
    }
    let rows = lags..n;
    let cols = (1..=lags)
        .map(|i| (format!("sq_lag{i}"), rows.clone().map(|t| sq[t - i]).collect()))
        .collect();
    let x = DesignMatrix::with_intercept(cols, n - lags)?;
    let y: Vec<f64> = rows.map(|t| sq[t]).collect();
    let aux = match ols::fit(&x, &y) {
        Ok(f) => f,
        Err(Error::SingularDesign { .. }) => return Ok(TestOutcome::degenerate(lags)),
        Err(e) => return Err(e),
    };
    let lm = (n - lags) as f64 * aux.r_squared.max(0.0);
    Ok(TestOutcome::new(lm, dist::chi2_sf(lm, lags as f64), lags))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityOutcome {
    #[serde(flatten)]
    pub test: TestOutcome,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Moment-based skewness and kurtosis (divisor `n`).
pub fn skew_kurtosis(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m = |p: i32| x.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = m(2);
    (m(3) / m2.powf(1.5), m(4) / (m2 * m2))
}

pub fn jb_statistic(n: usize, skewness: f64, kurtosis: f64) -> f64 {
    n as f64 / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0)
}

/// JB = T/6 (S² + (K-3)²/4), χ²(2).
pub fn jarque_bera(residuals: &[f64]) -> Result<NormalityOutcome> {
    let n = residuals.len();
    if n < 8 {
        return Err(Error::SampleTooSmall { rows: n, required: 8 });
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let var = residuals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if var <= 1e-28 * scale.max(1.0).powi(2) {
        return Ok(NormalityOutcome {
            test: TestOutcome::degenerate(2),
            skewness: 0.0,
            kurtosis: 0.0,
        });
    }
    let (s, k) = skew_kurtosis(residuals);
    let jb = jb_statistic(n, s, k);
    Ok(NormalityOutcome {
        test: TestOutcome::new(jb, dist::chi2_sf(jb, 2.0), 2),
        skewness: s,
        kurtosis: k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetOutcome {
    #[serde(flatten)]
    pub test: TestOutcome,
    pub powers_used: Vec<u32>,
    /// Some requested powers were collinear and dropped.
    pub reduced: bool,
}

/// Ramsey RESET: add powers of the fitted values and F-test them jointly.
pub fn ramsey_reset(fit: &OlsFit, powers: &[u32]) -> Result<ResetOutcome> {
    let yhat = &fit.fitted;
    let mean = yhat.iter().sum::<f64>() / yhat.len() as f64;
    let spread = yhat.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let scale = yhat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread <= 1e-12 * scale.max(1.0) {
        return Err(Error::Degenerate("RESET needs nonconstant fitted values".into()));
    }
    if powers.is_empty() {
        return Err(Error::Spec("RESET needs at least one power".into()));
    }
    // with an intercept in the design, centring and scaling ŷ leaves the
    // augmented column space unchanged
    let (shift, unit) = if fit.design.has_constant() {
        let sd = (yhat.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / yhat.len() as f64).sqrt();
        (mean, sd)
    } else {
        (0.0, scale)
    };
    let z: Vec<f64> = yhat.iter().map(|v| (v - shift) / unit).collect();
    let power_col = |p: u32| (format!("yhat_pow{p}"), z.iter().map(|v| v.powi(p as i32)).collect::<Vec<f64>>());

    let mut sets: Vec<Vec<u32>> = vec![powers.to_vec()];
    for &p in powers {
        if powers.len() > 1 {
            sets.push(vec![p]);
        }
    }
    for (i, set) in sets.iter().enumerate() {
        let design = fit.design.append(set.iter().map(|&p| power_col(p)).collect())?;
        match ols::fit(&design, &fit.y) {
            Ok(aug) => {
                let f = ols::wald_f(&aug, fit, set.len())?;
                return Ok(ResetOutcome {
                    test: TestOutcome::new(f.f, f.p_value, set.len()),
                    powers_used: set.clone(),
                    reduced: i > 0,
                });
            }
            Err(Error::SingularDesign { .. }) | Err(Error::DegreesOfFreedom { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate("every RESET power is collinear with the regressors".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumResult {
    /// Cumulative scaled recursive residuals.
    pub path: Vec<f64>,
    /// Positive 5% boundary at each path point; the lower one is its negation.
    pub bounds: Vec<f64>,
    pub stable: bool,
    /// Observation index (0-based) of the first recursive residual.
    pub first_index: usize,
    /// The recursion started later than `k` because early rows were rank deficient.
    pub truncated: bool,
    pub recursive_residuals: Vec<f64>,
}

fn full_rank(x: &DMatrix<f64>) -> bool {
    let k = x.ncols();
    if x.nrows() < k {
        return false;
    }
    let r = x.clone().qr().r();
    (0..k).all(|j| {
        let norm = x.column(j).norm();
        norm > 0.0 && r[(j, j)].abs() >= RANK_TOLERANCE * norm
    })
}

/// `w_t = (y_t - x_t'b_{t-1}) / sqrt(1 + x_t'(X'_{t-1}X_{t-1})⁻¹x_t)` for each
/// row after the first `k` usable ones.
pub fn recursive_residuals(x: &DMatrix<f64>, y: &[f64]) -> Result<(Vec<f64>, usize)> {
    let (t_total, k) = x.shape();
    let mut start = k;
    while start < t_total && !full_rank(&x.rows(0, start).into_owned()) {
        start += 1;
    }
    if start >= t_total {
        return Err(Error::Degenerate("no full-rank initial window for recursive residuals".into()));
    }
    let mut w = Vec::with_capacity(t_total - start);
    for t in start..t_total {
        let xt = x.rows(0, t).into_owned();
        let qr = xt.clone().qr();
        let r = qr.r();
        let qty = qr.q().transpose() * DVector::from_column_slice(&y[..t]);
        let b = r
            .solve_upper_triangular(&qty)
            .ok_or_else(|| Error::Degenerate("singular recursive update".into()))?;
        let row: DVector<f64> = x.row(t).transpose();
        let z = r
            .tr_solve_upper_triangular(&row)
            .ok_or_else(|| Error::Degenerate("singular recursive update".into()))?;
        let pred = row.dot(&b);
        w.push((y[t] - pred) / (1.0 + z.norm_squared()).sqrt());
    }
    Ok((w, start))
}

/// Brown-Durbin-Evans CUSUM with boundaries `±a[√(T-k) + 2(t-k)/√(T-k)]`.
/// The residuals are scaled by the full-sample `s`, which equals the root
/// mean square of the recursive residuals.
pub fn cusum(fit: &OlsFit) -> Result<CusumResult> {
    let t = fit.nobs;
    let k = fit.nparams;
    if t <= 2 * k {
        return Err(Error::Degenerate(format!(
            "CUSUM needs more than 2k = {} observations for k = {k} parameters, have {t}",
            2 * k
        )));
    }
    let (w, start) = recursive_residuals(fit.design.matrix(), &fit.y)?;
    let m = w.len() as f64;
    let sigma = (w.iter().map(|v| v * v).sum::<f64>() / m).sqrt();
    let root = ((t - k) as f64).sqrt();
    let bounds: Vec<f64> = (1..=w.len())
        .map(|r| CUSUM_A_5PCT * (root + 2.0 * r as f64 / root))
        .collect();
    let path: Vec<f64> = if sigma > 0.0 {
        w.iter()
            .scan(0.0, |acc, v| {
                *acc += v / sigma;
                Some(*acc)
            })
            .collect()
    } else {
        vec![0.0; w.len()]
    };
    let stable = path.iter().zip(&bounds).all(|(p, b)| p.abs() <= *b);
    Ok(CusumResult {
        path,
        bounds,
        stable,
        first_index: start,
        truncated: start > k,
        recursive_residuals: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    pub bg_lags: usize,
    pub arch_lags: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            bg_lags: 4,
            arch_lags: 4,
        }
    }
}

/// A test result or the reason it could not be computed on this fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checked<T> {
    Ok(T),
    Unavailable(String),
}

impl<T> Checked<T> {
    pub fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Checked::Ok(v),
            Err(e) => Checked::Unavailable(e.to_string()),
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Checked::Ok(v) => Some(v),
            Checked::Unavailable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub serial_correlation: Checked<TestOutcome>,
    pub arch: Checked<TestOutcome>,
    pub normality: Checked<NormalityOutcome>,
    pub reset: Checked<ResetOutcome>,
    pub cusum: Checked<CusumResult>,
    /// `Some(true)` when residual serial correlation is detected at 5%.
    pub serial_correlation_detected: Option<bool>,
    pub arch_detected: Option<bool>,
    /// RESET does not reject and the CUSUM path stays inside its bounds.
    pub stable: Option<bool>,
}

pub fn diagnose(fit: &OlsFit, cfg: &DiagnosticsConfig) -> DiagnosticsReport {
    let serial = Checked::from(breusch_godfrey(fit, cfg.bg_lags));
    let arch = Checked::from(arch_lm(&fit.residuals, cfg.arch_lags));
    let normality = Checked::from(jarque_bera(&fit.residuals));
    let reset = Checked::from(ramsey_reset(fit, &[2, 3]));
    let cusum = Checked::from(cusum(fit));
    let stable = match (reset.ok(), cusum.ok()) {
        (Some(r), Some(c)) => Some(!r.test.reject && c.stable),
        (None, Some(c)) => Some(c.stable),
        (Some(r), None) => Some(!r.test.reject),
        (None, None) => None,
    };
    DiagnosticsReport {
        serial_correlation_detected: serial.ok().map(|t| t.reject),
        arch_detected: arch.ok().map(|t| t.reject),
        stable,
        serial_correlation: serial,
        arch,
        normality,
        reset,
        cusum,
    }
}
