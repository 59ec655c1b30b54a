//! Conditional error-correction ARDL models.
//!
//! The estimated equation for dependent `y` and regressors `x_1..x_k` is
//!
//! ```text
//! Δy_t = c + δ_y y_{t-1} + Σ_j δ_j x_{j,t-1}
//!          + Σ_{i=1..p} α_i Δy_{t-i} + Σ_j Σ_{i=0..q_j} β_{j,i} Δx_{j,t-i} + ε_t
//! ```
//!
//! Regressor columns carry any lead/lag shift already applied by ingestion,
//! so every level regressor enters with exactly one lag of its stored column.
//! All candidate models for a given maximum lag use the same estimation rows
//! (`t >= max_lag + 1`) so their AICs and F statistics are comparable.

mod bounds;
mod lags;
mod long_run;

pub use bounds::{
    bounds_f_test, graded_conclusion, BoundsResult, Conclusion, CriticalTable, GradedConclusion,
};
pub use lags::{select_lags, select_lags_with, LagSearch};
pub use long_run::{
    ecm_second_stage, fit_ecm, long_run, long_run_with_floor, EcmFit, LongRunCoefficient,
    LongRunEquation, DEFAULT_NORMALIZATION_FLOOR,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::{self, DesignMatrix, OlsFit};
use crate::timeseries::{Column, Dataset};

pub const DEFAULT_MAX_LAG: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArdlSpec {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub max_lag: usize,
    /// Number of lagged `Δy` terms (`Δy_{t-1} .. Δy_{t-p}`).
    pub dependent_lags: usize,
    /// Highest lag of each regressor's `Δx` terms, starting from `Δx_t`.
    pub regressor_lags: Vec<usize>,
}

impl ArdlSpec {
    pub fn new(
        dataset: &Dataset,
        max_lag: usize,
        dependent_lags: usize,
        regressor_lags: Vec<usize>,
    ) -> Result<Self> {
        let regressors: Vec<String> = dataset.regressors().map(|c| c.name.clone()).collect();
        let spec = Self {
            dependent: dataset.dependent().name.clone(),
            regressors,
            max_lag,
            dependent_lags,
            regressor_lags,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.regressor_lags.len() != self.regressors.len() {
            return Err(Error::Spec(format!(
                "{} regressor lag orders for {} regressors",
                self.regressor_lags.len(),
                self.regressors.len()
            )));
        }
        if self.dependent_lags > self.max_lag || self.regressor_lags.iter().any(|&q| q > self.max_lag) {
            return Err(Error::Spec(format!(
                "selected lags {} / {:?} exceed max lag {}",
                self.dependent_lags, self.regressor_lags, self.max_lag
            )));
        }
        if self.max_lag > 0 && self.dependent_lags == 0 {
            return Err(Error::Spec("dependent Δ-lags start at 1".into()));
        }
        Ok(())
    }

    /// Total coefficient count, intercept included.
    pub fn nparams(&self) -> usize {
        let k = self.regressors.len();
        1 + (k + 1) + self.dependent_lags + self.regressor_lags.iter().map(|q| q + 1).sum::<usize>()
    }

    /// Lag orders as one vector, dependent first.
    pub fn orders(&self) -> Vec<usize> {
        std::iter::once(self.dependent_lags)
            .chain(self.regressor_lags.iter().copied())
            .collect()
    }

    /// First estimation row.
    pub fn first_row(&self) -> usize {
        self.max_lag + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermKind {
    Intercept,
    Level,
    Difference { lag: usize },
}

/// One regression coefficient and the cell of the coefficient partition it
/// belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    /// Design-matrix column name.
    pub name: String,
    /// Panel column the term is built from; empty for the intercept.
    pub variable: String,
    #[serde(flatten)]
    pub kind: TermKind,
    /// Display label with time subscripts relative to the dependent variable's date.
    pub label: String,
}

fn base_name(col: &Column) -> String {
    col.name.clone()
}

fn time_label(offset: i64) -> String {
    match offset {
        0 => "t".into(),
        o if o > 0 => format!("t+{o}"),
        o => format!("t{o}"),
    }
}

pub fn level_name(var: &str) -> String {
    format!("L1.{var}")
}

pub fn diff_name(var: &str, lag: usize) -> String {
    if lag == 0 {
        format!("D.{var}")
    } else {
        format!("L{lag}D.{var}")
    }
}

fn level_label(col: &Column, dependent: bool) -> String {
    // the long-run relation is read contemporaneously, so regressors are
    // labelled at their shift and the dependent at t-1
    let offset = if dependent { -1 } else { col.shift };
    format!("{}_{{{}}}", base_name(col), time_label(offset))
}

fn diff_label(col: &Column, lag: usize) -> String {
    format!("Δ{}_{{{}}}", base_name(col), time_label(col.shift - lag as i64))
}

fn column<'a>(dataset: &'a Dataset, name: &str) -> Result<&'a Column> {
    dataset
        .column(name)
        .ok_or_else(|| Error::Spec(format!("dataset has no column `{name}`")))
}

/// Design of the short-run block (`Δy` lags and `Δx` terms) on rows `rows`.
fn short_run_terms(
    dataset: &Dataset,
    spec: &ArdlSpec,
    rows: &[usize],
) -> Result<(Vec<Term>, Vec<Vec<f64>>)> {
    let y = column(dataset, &spec.dependent)?;
    let mut terms = Vec::new();
    let mut cols = Vec::new();
    let d = |v: &[f64], t: usize| v[t] - v[t - 1];
    for i in 1..=spec.dependent_lags {
        terms.push(Term {
            name: diff_name(&y.name, i),
            variable: y.name.clone(),
            kind: TermKind::Difference { lag: i },
            label: diff_label(y, i),
        });
        cols.push(rows.iter().map(|&t| d(&y.values, t - i)).collect());
    }
    for (name, &q) in spec.regressors.iter().zip(&spec.regressor_lags) {
        let x = column(dataset, name)?;
        for i in 0..=q {
            terms.push(Term {
                name: diff_name(name, i),
                variable: name.clone(),
                kind: TermKind::Difference { lag: i },
                label: diff_label(x, i),
            });
            cols.push(rows.iter().map(|&t| d(&x.values, t - i)).collect());
        }
    }
    Ok((terms, cols))
}

/// Full conditional-ECM design: intercept, level block, short-run block.
pub(crate) fn cecm_design(
    dataset: &Dataset,
    spec: &ArdlSpec,
) -> Result<(DesignMatrix, Vec<f64>, Vec<Term>, Vec<usize>)> {
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
    let y = column(dataset, &spec.dependent)?;

    let mut terms = vec![Term {
        name: "const".into(),
        variable: String::new(),
        kind: TermKind::Intercept,
        label: "c".into(),
    }];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; rows.len()]];

    terms.push(Term {
        name: level_name(&y.name),
        variable: y.name.clone(),
        kind: TermKind::Level,
        label: level_label(y, true),
    });
    cols.push(rows.iter().map(|&t| y.values[t - 1]).collect());
    for name in &spec.regressors {
        let x = column(dataset, name)?;
        terms.push(Term {
            name: level_name(name),
            variable: name.clone(),
            kind: TermKind::Level,
            label: level_label(x, false),
        });
        cols.push(rows.iter().map(|&t| x.values[t - 1]).collect());
    }

    let (sr_terms, sr_cols) = short_run_terms(dataset, spec, &rows)?;
    terms.extend(sr_terms);
    cols.extend(sr_cols);

    let design = DesignMatrix::from_columns(
        terms.iter().map(|t| t.name.clone()).zip(cols).collect(),
    )?;
    let target = rows.iter().map(|&t| y.values[t] - y.values[t - 1]).collect();
    Ok((design, target, terms, rows))
}

#[derive(Debug, Clone)]
pub struct ArdlFit {
    pub spec: ArdlSpec,
    pub ols: OlsFit,
    pub terms: Vec<Term>,
    /// Panel row indices used for estimation.
    pub rows: Vec<usize>,
    pub sample_start: NaiveDate,
    pub sample_end: NaiveDate,
    pub dataset: Dataset,
}

impl ArdlFit {
    fn coef_of(&self, term: &Term) -> f64 {
        self.ols.coef(&term.name).expect("term present in fit")
    }

    pub fn intercept(&self) -> f64 {
        self.ols.coef("const").expect("intercept")
    }

    /// `δ` on the lagged dependent level.
    pub fn delta_dependent(&self) -> f64 {
        self.ols
            .coef(&level_name(&self.spec.dependent))
            .expect("dependent level term")
    }

    pub fn level_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.kind == TermKind::Level)
    }

    pub fn short_run_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms
            .iter()
            .filter(|t| matches!(t.kind, TermKind::Difference { .. }))
    }

    /// `(term, coefficient)` for every level regressor, dependent excluded.
    pub fn level_coefficients(&self) -> Vec<(&Term, f64)> {
        self.level_terms()
            .filter(|t| t.variable != self.spec.dependent)
            .map(|t| (t, self.coef_of(t)))
            .collect()
    }
}

pub fn fit_conditional_ecm(dataset: &Dataset, spec: &ArdlSpec) -> Result<ArdlFit> {
    let (design, target, terms, rows) = cecm_design(dataset, spec)?;
    let ols = ols::fit(&design, &target)?;
    let cal = dataset.calendar();
    Ok(ArdlFit {
        spec: spec.clone(),
        sample_start: cal[rows[0]],
        sample_end: cal[*rows.last().expect("nonempty")],
        ols,
        terms,
        rows,
        dataset: dataset.clone(),
    })
}

/// The same model written in ARDL levels form: `y_t` on an intercept,
/// `y_{t-1..t-p-1}` and `x_{t..t-q-1}`, on the conditional-ECM estimation rows.
pub fn fit_levels_form(dataset: &Dataset, spec: &ArdlSpec) -> Result<OlsFit> {
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
    let y = column(dataset, &spec.dependent)?;
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    for i in 1..=spec.dependent_lags + 1 {
        cols.push((
            format!("L{i}.{}", y.name),
            rows.iter().map(|&t| y.values[t - i]).collect(),
        ));
    }
    for (name, &q) in spec.regressors.iter().zip(&spec.regressor_lags) {
        let x = column(dataset, name)?;
        for i in 0..=q + 1 {
            cols.push((
                format!("L{i}.{name}"),
                rows.iter().map(|&t| x.values[t - i]).collect(),
            ));
        }
    }
    let design = DesignMatrix::with_intercept(cols, rows.len())?;
    let target: Vec<f64> = rows.iter().map(|&t| y.values[t]).collect();
    ols::fit(&design, &target)
}
