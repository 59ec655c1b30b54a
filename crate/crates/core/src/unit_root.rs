//! Phillips-Perron and augmented Dickey-Fuller unit-root tests.
//!
//! Both are left-tailed tests of `H0: unit root` on the Dickey-Fuller
//! regression `Δy_t = μ (+ βt) + γ y_{t-1} (+ Σ φ_i Δy_{t-i}) + u_t`.
//! Critical values come from the MacKinnon (2010) response surfaces for
//! the single-series τ statistic:
//!
//! ```text
//! cv(T) = b_inf + b1 / T + b2 / T² + b3 / T³
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{self, DesignMatrix, OlsFit};
use crate::timeseries::{diff, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Deterministic {
    #[serde(rename = "n")]
    None,
    #[default]
    #[serde(rename = "c")]
    Constant,
    #[serde(rename = "ct")]
    ConstantTrend,
}

impl Deterministic {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "none" | "nc" => Some(Deterministic::None),
            "c" | "constant" => Some(Deterministic::Constant),
            "ct" | "trend" | "constant+trend" => Some(Deterministic::ConstantTrend),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Deterministic::None => "n",
            Deterministic::Constant => "c",
            Deterministic::ConstantTrend => "ct",
        }
    }

    /// MacKinnon (2010), Table 2, N = 1 rows for the 1%, 5% and 10% levels.
    fn surface(self) -> [[f64; 4]; 3] {
        match self {
            Deterministic::None => [
                [-2.56574, -2.2358, -3.627, 0.0],
                [-1.94100, -0.2686, -3.365, 31.223],
                [-1.61682, 0.2656, -2.714, 25.364],
            ],
            Deterministic::Constant => [
                [-3.43035, -6.5393, -16.786, -79.433],
                [-2.86154, -2.8903, -4.234, -40.040],
                [-2.56677, -1.5384, -2.809, 0.0],
            ],
            Deterministic::ConstantTrend => [
                [-3.95877, -9.0531, -28.428, -134.155],
                [-3.41049, -4.3904, -9.036, -45.374],
                [-3.12705, -2.5856, -3.925, -22.380],
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    #[default]
    PhillipsPerron,
    Adf,
}

impl TestKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pp" | "phillips_perron" | "phillips-perron" => Some(TestKind::PhillipsPerron),
            "adf" => Some(TestKind::Adf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

pub fn mackinnon_critical_values(det: Deterministic, nobs: usize) -> CriticalValues {
    let t = nobs as f64;
    let eval = |b: [f64; 4]| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
    let [one, five, ten] = det.surface();
    CriticalValues {
        one: eval(one),
        five: eval(five),
        ten: eval(ten),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decisions {
    pub reject_1pct: bool,
    pub reject_5pct: bool,
    pub reject_10pct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub series: String,
    pub test: TestKind,
    pub deterministic: Deterministic,
    pub statistic: f64,
    pub critical_values: CriticalValues,
    pub decisions: Decisions,
    /// Newey-West bandwidth (PP) or augmentation lag order (ADF).
    pub lag: usize,
    pub nobs: usize,
}

impl UnitRootResult {
    fn new(
        series: &str,
        test: TestKind,
        deterministic: Deterministic,
        statistic: f64,
        lag: usize,
        nobs: usize,
    ) -> Self {
        let cv = mackinnon_critical_values(deterministic, nobs);
        Self {
            series: series.to_string(),
            test,
            deterministic,
            statistic,
            critical_values: cv,
            decisions: Decisions {
                reject_1pct: statistic < cv.one,
                reject_5pct: statistic < cv.five,
                reject_10pct: statistic < cv.ten,
            },
            lag,
            nobs,
        }
    }

    /// `***`, `**`, `*` or empty, by the strictest level rejected.
    pub fn stars(&self) -> &'static str {
        if self.decisions.reject_1pct {
            "***"
        } else if self.decisions.reject_5pct {
            "**"
        } else if self.decisions.reject_10pct {
            "*"
        } else {
            ""
        }
    }
}

pub const MIN_LENGTH: usize = 15;

/// Bartlett-kernel Newey-West long-run variance:
/// `γ0 + 2 Σ_{j=1..L} (1 - j/(L+1)) γj` with `γj = (1/T) Σ u_t u_{t-j}`.
pub fn newey_west_lrv(u: &[f64], bandwidth: usize) -> f64 {
    let n = u.len();
    let gamma = |j: usize| -> f64 {
        (j..n).map(|t| u[t] * u[t - j]).sum::<f64>() / n as f64
    };
    let mut lrv = gamma(0);
    for j in 1..=bandwidth.min(n.saturating_sub(1)) {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * gamma(j);
    }
    lrv
}

/// `floor(4 (T/100)^(2/9))`.
pub fn default_bandwidth(nobs: usize) -> usize {
    (4.0 * (nobs as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

fn validate(series: &Series, min_len: usize) -> Result<()> {
    if series.len() < min_len {
        return Err(Error::SampleTooSmall {
            rows: series.len(),
            required: min_len,
        });
    }
    let first = series.values()[0];
    if series.values().iter().all(|&v| v == first) {
        return Err(Error::Degenerate(format!(
            "series `{}` is constant",
            series.name()
        )));
    }
    Ok(())
}

/// Dickey-Fuller regression on rows `start..n` with `lags` augmentation terms.
/// The lagged level is named `y_lag1`.
fn df_regression(y: &[f64], det: Deterministic, lags: usize, start: usize) -> Result<OlsFit> {
    let n = y.len();
    let rows: Vec<usize> = (start.max(lags + 1)..n).collect();
    let dy = |t: usize| y[t] - y[t - 1];
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    if det != Deterministic::None {
        cols.push(("const".into(), vec![1.0; rows.len()]));
    }
    if det == Deterministic::ConstantTrend {
        cols.push(("trend".into(), (1..=rows.len()).map(|t| t as f64).collect()));
    }
    cols.push(("y_lag1".into(), rows.iter().map(|&t| y[t - 1]).collect()));
    for i in 1..=lags {
        cols.push((format!("dy_lag{i}"), rows.iter().map(|&t| dy(t - i)).collect()));
    }
    let x = DesignMatrix::from_columns(cols)?;
    let target: Vec<f64> = rows.iter().map(|&t| dy(t)).collect();
    ols::fit(&x, &target)
}

fn gamma_t(fit: &OlsFit) -> (f64, f64) {
    let j = fit.index_of("y_lag1").expect("df regression has y_lag1");
    let coef = fit.coefficients[j];
    let se = fit.std_errors[j];
    (coef / se, se)
}

/// Plain Dickey-Fuller τ statistic with no augmentation.
pub fn df_statistic(series: &Series, det: Deterministic) -> Result<f64> {
    validate(series, 3)?;
    let fit = df_regression(series.values(), det, 0, 1)?;
    Ok(gamma_t(&fit).0)
}

/// Phillips-Perron Z_τ:
///
/// ```text
/// Z_τ = sqrt(γ0/λ²) t_γ - (λ² - γ0) / (2λ) * T se(γ) / s
/// ```
///
/// where `γ0 = SSR/T`, `λ²` is the Newey-West long-run variance of the DF
/// residuals and `s² = SSR/(T-k)`.
pub fn pp_test(
    series: &Series,
    det: Deterministic,
    bandwidth: Option<usize>,
) -> Result<UnitRootResult> {
    validate(series, MIN_LENGTH)?;
    let fit = df_regression(series.values(), det, 0, 1)?;
    let nobs = fit.nobs;
    let (t_gamma, se) = gamma_t(&fit);
    let bw = bandwidth.unwrap_or_else(|| default_bandwidth(nobs));
    let gamma0 = fit.ssr / nobs as f64;
    let lambda2 = newey_west_lrv(&fit.residuals, bw);
    if !(lambda2 > 0.0) || !(gamma0 > 0.0) {
        return Err(Error::Degenerate(format!(
            "non-positive residual variance in PP regression for `{}`",
            series.name()
        )));
    }
    let s = fit.sigma2.sqrt();
    let lambda = lambda2.sqrt();
    let z = (gamma0 / lambda2).sqrt() * t_gamma
        - (lambda2 - gamma0) / (2.0 * lambda) * (nobs as f64 * se / s);
    Ok(UnitRootResult::new(
        series.name(),
        TestKind::PhillipsPerron,
        det,
        z,
        bw,
        nobs,
    ))
}

/// ADF τ with the augmentation order minimising AIC over `0..=max_lag` on the
/// common sample; the selected order is then re-estimated on its full sample.
pub fn adf_test(series: &Series, det: Deterministic, max_lag: usize) -> Result<UnitRootResult> {
    validate(series, max_lag + MIN_LENGTH)?;
    let y = series.values();
    let mut best: Option<(f64, usize)> = None;
    for lags in 0..=max_lag {
        let fit = df_regression(y, det, lags, max_lag + 1)?;
        if best.map_or(true, |(aic, _)| fit.aic < aic) {
            best = Some((fit.aic, lags));
        }
    }
    let lags = best.expect("at least one candidate").1;
    let fit = df_regression(y, det, lags, 1)?;
    Ok(UnitRootResult::new(
        series.name(),
        TestKind::Adf,
        det,
        gamma_t(&fit).0,
        lags,
        fit.nobs,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitRootConfig {
    pub test: TestKind,
    pub deterministic: Deterministic,
    pub bandwidth: Option<usize>,
    pub max_lag: usize,
}

impl Default for UnitRootConfig {
    fn default() -> Self {
        Self {
            test: TestKind::PhillipsPerron,
            deterministic: Deterministic::Constant,
            bandwidth: None,
            max_lag: 4,
        }
    }
}

pub fn run_test(series: &Series, cfg: &UnitRootConfig) -> Result<UnitRootResult> {
    match cfg.test {
        TestKind::PhillipsPerron => pp_test(series, cfg.deterministic, cfg.bandwidth),
        TestKind::Adf => adf_test(series, cfg.deterministic, cfg.max_lag),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrationOrder {
    I0,
    I1,
    Higher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub order: IntegrationOrder,
    pub level: UnitRootResult,
    pub first_difference: Option<UnitRootResult>,
}

/// I0 if the level rejects at 5%, I1 if only the first difference does,
/// otherwise higher.
pub fn classify(series: &Series, cfg: &UnitRootConfig) -> Result<Classification> {
    let level = run_test(series, cfg)?;
    if level.decisions.reject_5pct {
        return Ok(Classification {
            order: IntegrationOrder::I0,
            level,
            first_difference: None,
        });
    }
    let d = run_test(&diff(series)?, cfg)?;
    let order = if d.decisions.reject_5pct {
        IntegrationOrder::I1
    } else {
        IntegrationOrder::Higher
    };
    Ok(Classification {
        order,
        level,
        first_difference: Some(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{Dgp, SimRng};
    use chrono::NaiveDate;

    fn start() -> NaiveDate {
        NaiveDate::from_ymd_opt(2000, 1, 1).unwrap()
    }

    #[test]
    fn critical_values_match_published_asymptotics() {
        let cv = mackinnon_critical_values(Deterministic::Constant, 1_000_000);
        assert!((cv.five + 2.86154).abs() < 1e-4);
        // T = 100, constant: the familiar -3.4981 / -2.8912 / -2.5824
        let cv = mackinnon_critical_values(Deterministic::Constant, 100);
        assert!((cv.one + 3.4981).abs() < 1e-3);
        assert!((cv.five + 2.8912).abs() < 1e-3);
        assert!((cv.ten + 2.5824).abs() < 1e-3);
        let ct = mackinnon_critical_values(Deterministic::ConstantTrend, 100);
        assert!(ct.five < cv.five);
    }

    #[test]
    fn decisions_monotone() {
        let r = UnitRootResult::new("x", TestKind::PhillipsPerron, Deterministic::Constant, -3.0, 0, 40);
        assert!(r.decisions.reject_5pct && r.decisions.reject_10pct && !r.decisions.reject_1pct);
        assert_eq!(r.stars(), "**");
    }

    #[test]
    fn newey_west_bandwidth_zero_is_variance() {
        let u = [1.0, -2.0, 0.5, 0.5];
        assert!((newey_west_lrv(&u, 0) - (1.0 + 4.0 + 0.25 + 0.25) / 4.0).abs() < 1e-15);
        // by hand: γ1 = (-2 - 1 + 0.25)/4 = -0.6875; weight 1/2
        let want = 5.5 / 4.0 + 2.0 * 0.5 * (-0.6875);
        assert!((newey_west_lrv(&u, 1) - want).abs() < 1e-15);
    }

    #[test]
    fn default_bandwidth_values() {
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(500), 5);
        assert_eq!(default_bandwidth(33), 3);
    }

    #[test]
    fn pp_with_zero_bandwidth_equals_df() {
        let mut rng = SimRng::for_replication(5, 0);
        let x = Dgp::Ar1 { rho: 0.6 }.generate(&mut rng, 200);
        let s = Series::from_values("ar", start(), x).unwrap();
        for det in [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend] {
            let pp = pp_test(&s, det, Some(0)).unwrap();
            let df = df_statistic(&s, det).unwrap();
            assert!((pp.statistic - df).abs() < 1e-10);
        }
    }

    #[test]
    fn errors() {
        let short = Series::from_values("s", start(), vec![1.0, 2.0, 0.5]).unwrap();
        assert!(matches!(pp_test(&short, Deterministic::Constant, None), Err(Error::SampleTooSmall { .. })));
        let flat = Series::from_values("f", start(), vec![3.0; 40]).unwrap();
        assert!(matches!(pp_test(&flat, Deterministic::Constant, None), Err(Error::Degenerate(_))));
        assert!(matches!(adf_test(&flat, Deterministic::Constant, 4), Err(Error::Degenerate(_))));
        let s = Series::from_values("s", start(), (0..16).map(|i| (i as f64).sin()).collect()).unwrap();
        assert!(matches!(adf_test(&s, Deterministic::Constant, 4), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn classify_white_noise_and_walk() {
        let cfg = UnitRootConfig::default();
        let mut rng = SimRng::for_replication(17, 0);
        let wn = Series::from_values("wn", start(), Dgp::WhiteNoise.generate(&mut rng, 300)).unwrap();
        assert_eq!(classify(&wn, &cfg).unwrap().order, IntegrationOrder::I0);
        let rw = Series::from_values("rw", start(), Dgp::RandomWalk.generate(&mut rng, 300)).unwrap();
        let c = classify(&rw, &cfg).unwrap();
        assert_eq!(c.order, IntegrationOrder::I1);
        assert!(c.first_difference.is_some());
    }

    #[test]
    fn adf_picks_lag_and_rejects_stationary_ar() {
        let mut rng = SimRng::for_replication(23, 0);
        let x = Dgp::Ar1 { rho: 0.5 }.generate(&mut rng, 500);
        let s = Series::from_values("ar", start(), x).unwrap();
        let r = adf_test(&s, Deterministic::Constant, 4).unwrap();
        assert!(r.lag <= 4);
        assert!(r.decisions.reject_5pct);
    }
}
