//! Ordinary least squares via Householder QR, with classical inference.
//!
//! The Gaussian log-likelihood uses the ML variance `SSR / T`:
//!
//! ```text
//! loglik = -T/2 * (ln(2π) + ln(SSR/T) + 1)
//! AIC    = -2 * loglik + 2k
//! ```
//!
//! Coefficient standard errors are the square roots of the diagonal of
//! `s² (X'X)⁻¹` with `s² = SSR / (T - k)`.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};

/// Columns whose QR pivot falls below this fraction of their own norm are
/// treated as linear combinations of the preceding columns.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    values: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if names.len() != values.ncols() {
            return Err(Error::Design(format!(
                "{} names for {} columns",
                names.len(),
                values.ncols()
            )));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Design(format!("duplicate column name `{n}`")));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Design("non-finite entry in design".into()));
        }
        Ok(Self { names, values })
    }

    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let rows = columns.first().map(|c| c.1.len()).unwrap_or(0);
        if let Some(c) = columns.iter().find(|c| c.1.len() != rows) {
            return Err(Error::Design(format!(
                "column `{}` has {} rows, expected {rows}",
                c.0,
                c.1.len()
            )));
        }
        let (names, cols): (Vec<String>, Vec<Vec<f64>>) = columns.into_iter().unzip();
        let values = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
        Self::new(names, values)
    }

    /// Prepend a `const` column of ones.
    pub fn with_intercept(columns: Vec<(String, Vec<f64>)>, rows: usize) -> Result<Self> {
        let mut all = Vec::with_capacity(columns.len() + 1);
        all.push(("const".to_string(), vec![1.0; rows]));
        all.extend(columns);
        Self::from_columns(all)
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn has_constant(&self) -> bool {
        (0..self.cols()).any(|j| {
            let c = self.values.column(j);
            c[0] != 0.0 && c.iter().all(|&v| v == c[0])
        })
    }

    /// Design without the named columns.
    pub fn drop_columns(&self, drop: &[&str]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.cols())
            .filter(|&j| !drop.contains(&self.names[j].as_str()))
            .collect();
        if keep.len() + drop.len() != self.cols() {
            return Err(Error::Design(format!("cannot drop {drop:?}: not all present")));
        }
        self.select(&keep)
    }

    pub fn select(&self, cols: &[usize]) -> Result<Self> {
        let names = cols.iter().map(|&j| self.names[j].clone()).collect();
        let values = self.values.select_columns(cols);
        Self::new(names, values)
    }

    /// Design with extra columns appended.
    pub fn append(&self, extra: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut cols: Vec<(String, Vec<f64>)> = (0..self.cols())
            .map(|j| (self.names[j].clone(), self.column(j)))
            .collect();
        cols.extend(extra);
        Self::from_columns(cols)
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> Self {
        Self {
            names: self.names.clone(),
            values: self.values.rows(0, n).into_owned(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// `SSR / (T - k)`.
    pub sigma2: f64,
    pub ssr: f64,
    pub loglik: f64,
    pub aic: f64,
    pub r_squared: f64,
    pub nobs: usize,
    pub nparams: usize,
    /// `s² (X'X)⁻¹`.
    pub covariance: DMatrix<f64>,
    pub design: DesignMatrix,
    pub y: Vec<f64>,
}

impl OlsFit {
    pub fn df_resid(&self) -> usize {
        self.nobs - self.nparams
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.coefficients[j])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn t_stats(&self) -> Vec<TStat> {
        t_stats(self)
    }

    pub fn t_stat(&self, name: &str) -> Option<TStat> {
        self.index_of(name).map(|j| t_stat_for(self, j))
    }
}

pub fn gaussian_loglik(ssr: f64, nobs: usize) -> f64 {
    let t = nobs as f64;
    -0.5 * t * ((2.0 * std::f64::consts::PI).ln() + (ssr / t).ln() + 1.0)
}

pub fn aic(loglik: f64, nparams: usize) -> f64 {
    -2.0 * loglik + 2.0 * nparams as f64
}

/// Solve `min ||y - Xβ||²`.
pub fn fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let t = x.rows();
    let k = x.cols();
    if y.len() != t {
        return Err(Error::Design(format!("y has {} rows, design has {t}", y.len())));
    }
    if t <= k {
        return Err(Error::DegreesOfFreedom {
            observations: t,
            parameters: k,
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Design("non-finite response".into()));
    }

    let qr = x.values.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.values.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() < RANK_TOLERANCE * norm {
            return Err(Error::SingularDesign {
                column: x.names[j].clone(),
            });
        }
    }

    let q = qr.q();
    let yv = DVector::from_column_slice(y);
    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign {
            column: x.names[k - 1].clone(),
        })?;

    let fitted = &x.values * &beta;
    let resid = &yv - &fitted;
    let ssr = resid.norm_squared();
    let df = (t - k) as f64;
    let sigma2 = ssr / df;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign {
            column: x.names[k - 1].clone(),
        })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let covariance = xtx_inv * sigma2;
    let std_errors = (0..k).map(|j| covariance[(j, j)].max(0.0).sqrt()).collect();

    let loglik = gaussian_loglik(ssr, t);
    let sst = if x.has_constant() {
        let mean = y.iter().sum::<f64>() / t as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if sst > 0.0 {
        1.0 - ssr / sst
    } else if ssr == 0.0 {
        1.0
    } else {
        0.0
    };

    Ok(OlsFit {
        names: x.names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        residuals: resid.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        sigma2,
        ssr,
        loglik,
        aic: aic(loglik, k),
        r_squared,
        nobs: t,
        nparams: k,
        covariance,
        design: x.clone(),
        y: y.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FStat {
    pub f: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

/// Joint F test of `m` zero restrictions from unrestricted and restricted SSRs.
pub fn f_from_ssr(ssr_unrestricted: f64, ssr_restricted: f64, m: usize, df_den: usize) -> FStat {
    let num = ((ssr_restricted - ssr_unrestricted) / m as f64).max(0.0);
    let den = ssr_unrestricted / df_den as f64;
    let f = if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    };
    FStat {
        f,
        df_num: m,
        df_den,
        p_value: dist::f_sf(f, m as f64, df_den as f64),
    }
}

pub fn wald_f(fit: &OlsFit, restricted: &OlsFit, m: usize) -> Result<FStat> {
    if fit.nobs != restricted.nobs || fit.y != restricted.y {
        return Err(Error::SampleMismatch {
            unrestricted: fit.nobs,
            restricted: restricted.nobs,
        });
    }
    if m == 0 {
        return Err(Error::Spec("F test needs at least one restriction".into()));
    }
    Ok(f_from_ssr(fit.ssr, restricted.ssr, m, fit.df_resid()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Significance {
    None,
    Ten,
    Five,
    One,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            Significance::One
        } else if p < 0.05 {
            Significance::Five
        } else if p < 0.10 {
            Significance::Ten
        } else {
            Significance::None
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Significance::None => "",
            Significance::Ten => "*",
            Significance::Five => "**",
            Significance::One => "***",
        }
    }

    pub fn from_stars(s: &str) -> Self {
        match s.chars().filter(|&c| c == '*').count() {
            0 => Significance::None,
            1 => Significance::Ten,
            2 => Significance::Five,
            _ => Significance::One,
        }
    }

    pub fn tier(self) -> i32 {
        self as i32
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stars())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TStat {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
    pub stars: String,
}

/// t ratio and two-sided p-value; a zero standard error gives `t = ±inf, p = 0`
/// unless the coefficient is also zero.
pub fn t_and_p(coef: f64, se: f64, df: f64) -> (f64, f64) {
    if se == 0.0 {
        if coef == 0.0 {
            return (0.0, 1.0);
        }
        return (coef.signum() * f64::INFINITY, 0.0);
    }
    let t = coef / se;
    (t, dist::t_two_sided(t, df))
}

fn t_stat_for(fit: &OlsFit, j: usize) -> TStat {
    let (t, p) = t_and_p(fit.coefficients[j], fit.std_errors[j], fit.df_resid() as f64);
    TStat {
        name: fit.names[j].clone(),
        coefficient: fit.coefficients[j],
        std_error: fit.std_errors[j],
        t,
        p_value: p,
        stars: Significance::from_p(p).stars().to_string(),
    }
}

pub fn t_stats(fit: &OlsFit) -> Vec<TStat> {
    (0..fit.nparams).map(|j| t_stat_for(fit, j)).collect()
}
