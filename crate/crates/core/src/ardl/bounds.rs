use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{level_name, ArdlFit, TermKind};
use crate::error::{Error, Result};
use crate::ols::{self, FStat};

const TABLE_SOURCE: &str = include_str!("../../data/bounds_critical_values.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum CriticalTable {
    /// Restricted intercept, no trend. Holds the (2.79, 3.67) pair at k = 3, 5%.
    #[default]
    #[serde(rename = "pss_ii")]
    PssII,
    /// Unrestricted intercept, no trend.
    #[serde(rename = "pss_iii")]
    PssIII,
}

impl CriticalTable {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pss_ii" | "ii" | "case2" => Some(CriticalTable::PssII),
            "pss_iii" | "iii" | "case3" => Some(CriticalTable::PssIII),
            _ => None,
        }
    }

    fn key(self) -> &'static str {
        match self {
            CriticalTable::PssII => "pss_ii",
            CriticalTable::PssIII => "pss_iii",
        }
    }

    /// `(lower, upper)` bounds for `k` regressors at significance `level`.
    pub fn bounds(self, k: usize, level: f64) -> Result<(f64, f64)> {
        table()
            .iter()
            .find(|r| r.table == self.key() && r.k == k && (r.level - level).abs() < 1e-9)
            .map(|r| (r.lower, r.upper))
            .ok_or_else(|| {
                Error::Spec(format!(
                    "no {} critical bounds for k = {k} at level {level}",
                    self.key()
                ))
            })
    }
}

struct Row {
    table: String,
    k: usize,
    level: f64,
    lower: f64,
    upper: f64,
}

fn table() -> &'static [Row] {
    static ROWS: OnceLock<Vec<Row>> = OnceLock::new();
    ROWS.get_or_init(|| {
        TABLE_SOURCE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("table,"))
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                Row {
                    table: f[0].to_string(),
                    k: f[1].parse().expect("k"),
                    level: f[2].parse().expect("level"),
                    lower: f[3].parse().expect("lower"),
                    upper: f[4].parse().expect("upper"),
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Cointegration,
    NoCointegration,
    Inconclusive,
}

impl Conclusion {
    pub fn classify(f: f64, lower: f64, upper: f64) -> Self {
        if f > upper {
            Conclusion::Cointegration
        } else if f < lower {
            Conclusion::NoCointegration
        } else {
            Conclusion::Inconclusive
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Cointegration => "cointegration",
            Conclusion::NoCointegration => "no cointegration",
            Conclusion::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    pub f_statistic: f64,
    pub k: usize,
    pub level: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub conclusion: Conclusion,
    pub table: CriticalTable,
    pub nobs: usize,
    pub df_num: usize,
    pub df_den: usize,
}

/// Joint test of `δ_y = δ_1 = … = δ_k = 0` by re-estimating without the level
/// block on the same rows.
pub fn bounds_f_test(fit: &ArdlFit, level: f64, table: CriticalTable) -> Result<BoundsResult> {
    let k = fit.spec.regressors.len();
    let levels: Vec<&str> = fit
        .terms
        .iter()
        .filter(|t| t.kind == TermKind::Level)
        .map(|t| t.name.as_str())
        .collect();
    if levels.len() != k + 1 || !levels.contains(&level_name(&fit.spec.dependent).as_str()) {
        return Err(Error::Spec(format!(
            "bounds test needs {} level terms, fit has {}",
            k + 1,
            levels.len()
        )));
    }
    let restricted_design = fit.ols.design.drop_columns(&levels)?;
    let restricted = ols::fit(&restricted_design, &fit.ols.y)?;
    let FStat { f, df_num, df_den, .. } = ols::wald_f(&fit.ols, &restricted, levels.len())?;
    let (lower, upper) = table.bounds(k, level)?;
    Ok(BoundsResult {
        f_statistic: f,
        k,
        level,
        lower_bound: lower,
        upper_bound: upper,
        conclusion: Conclusion::classify(f, lower, upper),
        table,
        nobs: fit.ols.nobs,
        df_num,
        df_den,
    })
}

/// Conclusion at 5%, falling back to 10% when 5% is not decisive for
/// cointegration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradedConclusion {
    Cointegration,
    #[serde(rename = "cointegration_at_10pct")]
    CointegrationAt10,
    Inconclusive,
    NoCointegration,
}

impl fmt::Display for GradedConclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradedConclusion::Cointegration => "cointegration",
            GradedConclusion::CointegrationAt10 => "cointegration at 10% significance",
            GradedConclusion::Inconclusive => "inconclusive cointegration",
            GradedConclusion::NoCointegration => "no cointegration",
        })
    }
}

pub fn graded_conclusion(f: f64, k: usize, table: CriticalTable) -> Result<GradedConclusion> {
    let (lo5, hi5) = table.bounds(k, 0.05)?;
    let (_, hi10) = table.bounds(k, 0.10)?;
    Ok(match Conclusion::classify(f, lo5, hi5) {
        Conclusion::Cointegration => GradedConclusion::Cointegration,
        _ if f > hi10 => GradedConclusion::CointegrationAt10,
        Conclusion::NoCointegration => GradedConclusion::NoCointegration,
        Conclusion::Inconclusive => GradedConclusion::Inconclusive,
    })
}
