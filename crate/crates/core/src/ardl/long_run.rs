use serde::{Deserialize, Serialize};

use super::{level_name, short_run_terms, ArdlFit, ArdlSpec, Term};
use crate::error::{Error, Result};
use crate::ols::{self, t_and_p, DesignMatrix, OlsFit, Significance};
use crate::timeseries::Dataset;

/// Default `|t|` floor on `δ_y` below which normalisation is flagged.
pub const DEFAULT_NORMALIZATION_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunCoefficient {
    pub variable: String,
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
    pub stars: String,
}

/// `y = a + Σ θ_j x_j` with `θ_j = -δ_j / δ_y` and `a = -c / δ_y`.
/// Standard errors are delta-method approximations from the OLS covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunEquation {
    pub dependent: String,
    pub coefficients: Vec<LongRunCoefficient>,
    pub intercept: LongRunCoefficient,
    pub delta_dependent: f64,
    pub delta_dependent_t: f64,
    pub warnings: Vec<String>,
}

impl LongRunEquation {
    pub fn theta(&self, variable: &str) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|c| c.variable == variable)
            .map(|c| c.estimate)
    }

    /// `a + Σ θ_j x_j` for one row of regressor levels, in `coefficients` order.
    pub fn equilibrium(&self, regressors: &[f64]) -> f64 {
        self.intercept.estimate
            + self
                .coefficients
                .iter()
                .zip(regressors)
                .map(|(c, x)| c.estimate * x)
                .sum::<f64>()
    }
}

pub fn long_run(fit: &ArdlFit) -> Result<LongRunEquation> {
    long_run_with_floor(fit, DEFAULT_NORMALIZATION_FLOOR)
}

pub fn long_run_with_floor(fit: &ArdlFit, floor: f64) -> Result<LongRunEquation> {
    let ols = &fit.ols;
    let iy = ols
        .index_of(&level_name(&fit.spec.dependent))
        .ok_or_else(|| Error::Spec("fit has no dependent level term".into()))?;
    let dy = ols.coefficients[iy];
    if dy == 0.0 {
        return Err(Error::Normalization);
    }
    let (ty, _) = t_and_p(dy, ols.std_errors[iy], ols.df_resid() as f64);
    let mut warnings = Vec::new();
    if ty.abs() < floor {
        warnings.push(format!(
            "degenerate normalization: |t| of the lagged dependent level is {:.3}, below {floor}",
            ty.abs()
        ));
    }

    let df = ols.df_resid() as f64;
    let ratio = |j: usize, variable: &str, label: &str| -> LongRunCoefficient {
        let dj = ols.coefficients[j];
        let theta = -dj / dy;
        // gradient of -δ_j/δ_y with respect to (δ_j, δ_y)
        let g = [-1.0 / dy, dj / (dy * dy)];
        let v = &ols.covariance;
        let var = g[0] * g[0] * v[(j, j)] + 2.0 * g[0] * g[1] * v[(j, iy)] + g[1] * g[1] * v[(iy, iy)];
        let se = var.max(0.0).sqrt();
        let (t, p) = t_and_p(theta, se, df);
        LongRunCoefficient {
            variable: variable.to_string(),
            label: label.to_string(),
            estimate: theta,
            std_error: se,
            t,
            p_value: p,
            stars: Significance::from_p(p).stars().to_string(),
        }
    };

    let coefficients = fit
        .level_terms()
        .filter(|t| t.variable != fit.spec.dependent)
        .map(|t| ratio(ols.index_of(&t.name).expect("level term"), &t.variable, &t.label))
        .collect();
    let intercept = ratio(ols.index_of("const").expect("intercept"), "const", "c");

    Ok(LongRunEquation {
        dependent: fit.spec.dependent.clone(),
        coefficients,
        intercept,
        delta_dependent: dy,
        delta_dependent_t: ty,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EcmFit {
    /// ECT coefficient; `None` when the ECT had to be dropped.
    pub theta: Option<f64>,
    pub theta_std_error: Option<f64>,
    pub theta_t: Option<f64>,
    pub theta_p: Option<f64>,
    pub theta_stars: String,
    /// `θ < 0` and significant at 5%.
    pub validated: bool,
    pub ect_dropped: bool,
    pub short_run: Vec<ols::TStat>,
    pub short_run_terms: Vec<Term>,
    pub nobs: usize,
    pub ssr: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub ols: Option<OlsFit>,
}

pub const ECT_NAME: &str = "ECT_lag1";

/// Second stage: `Δy_t` on an intercept, the short-run block and
/// `ECT_{t-1} = y_{t-1} - a - Σ θ_j x_{j,t-1}`.
pub fn ecm_second_stage(dataset: &Dataset, spec: &ArdlSpec, lr: &LongRunEquation) -> Result<EcmFit> {
    spec.validate()?;
    let n = dataset.len();
    let t0 = spec.first_row();
    if n <= t0 {
        return Err(Error::SampleTooSmall {
            rows: n,
            required: t0 + 1,
        });
    }
    let rows: Vec<usize> = (t0..n).collect();
    let y = dataset
        .column(&spec.dependent)
        .ok_or_else(|| Error::Spec(format!("no column `{}`", spec.dependent)))?;
    let xs = lr
        .coefficients
        .iter()
        .map(|c| {
            dataset
                .column(&c.variable)
                .ok_or_else(|| Error::Spec(format!("no column `{}`", c.variable)))
        })
        .collect::<Result<Vec<_>>>()?;

    let ect: Vec<f64> = rows
        .iter()
        .map(|&t| {
            let x_row: Vec<f64> = xs.iter().map(|c| c.values[t - 1]).collect();
            y.values[t - 1] - lr.equilibrium(&x_row)
        })
        .collect();

    let (terms, cols) = short_run_terms(dataset, spec, &rows)?;
    let mut columns: Vec<(String, Vec<f64>)> = terms.iter().map(|t| t.name.clone()).zip(cols).collect();
    let target: Vec<f64> = rows.iter().map(|&t| y.values[t] - y.values[t - 1]).collect();

    let mut warnings = Vec::new();
    let ect_spread = ect.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        - ect.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let scale = ect.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let ect_constant = ect_spread <= 1e-10 * scale;

    let with_ect = if ect_constant {
        None
    } else {
        let mut c = columns.clone();
        c.push((ECT_NAME.to_string(), ect.clone()));
        match ols::fit(&DesignMatrix::with_intercept(c, rows.len())?, &target) {
            Ok(f) => Some(f),
            Err(Error::SingularDesign { .. }) => None,
            Err(e) => return Err(e),
        }
    };

    let (fit, dropped) = match with_ect {
        Some(f) => (f, false),
        None => {
            warnings.push("ECT is collinear with the intercept; dropped from the second stage".into());
            let f = ols::fit(&DesignMatrix::with_intercept(std::mem::take(&mut columns), rows.len())?, &target)?;
            (f, true)
        }
    };

    let stats = fit.t_stats();
    let ect_stat = stats.iter().find(|s| s.name == ECT_NAME).cloned();
    let short_run = stats
        .into_iter()
        .filter(|s| s.name != ECT_NAME && s.name != "const")
        .collect();
    let validated = ect_stat
        .as_ref()
        .is_some_and(|s| s.coefficient < 0.0 && s.p_value < 0.05);

    Ok(EcmFit {
        theta: ect_stat.as_ref().map(|s| s.coefficient),
        theta_std_error: ect_stat.as_ref().map(|s| s.std_error),
        theta_t: ect_stat.as_ref().map(|s| s.t),
        theta_p: ect_stat.as_ref().map(|s| s.p_value),
        theta_stars: ect_stat.map(|s| s.stars).unwrap_or_default(),
        validated,
        ect_dropped: dropped,
        short_run,
        short_run_terms: terms,
        nobs: fit.nobs,
        ssr: fit.ssr,
        warnings,
        ols: Some(fit),
    })
}

pub fn fit_ecm(fit: &ArdlFit) -> Result<EcmFit> {
    let lr = long_run(fit)?;
    let mut ecm = ecm_second_stage(&fit.dataset, &fit.spec, &lr)?;
    ecm.warnings.splice(0..0, lr.warnings.iter().cloned());
    Ok(ecm)
}
