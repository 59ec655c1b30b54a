//! Full six-model run on the bundled snapshots, annotated with the published
//! reference values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ardl::{
    self, ArdlFit, BoundsResult, GradedConclusion, TermKind,
};
use crate::config::RunConfig;
use crate::diagnostics::{self, Checked, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::ingest::{self, base_name, CovidScope, OilBenchmark, PanelConfig};
use crate::ols::Significance;
use crate::timeseries::{self, ColumnSummary, Dataset, Series, Transform};
use crate::unit_root::{self, Deterministic, IntegrationOrder, TestKind, UnitRootConfig, UnitRootResult};

const REFERENCE_SOURCE: &str = include_str!("../data/reference_values.csv");

/// Role names of the four panel columns, in panel order.
pub const ROLES: [&str; 4] = ["oil", "covid", "vix", "epu"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelId {
    pub dependent: OilBenchmark,
    pub scope: CovidScope,
}

impl ModelId {
    pub fn all() -> Vec<ModelId> {
        OilBenchmark::ALL
            .iter()
            .flat_map(|&dependent| CovidScope::ALL.iter().map(move |&scope| ModelId { dependent, scope }))
            .collect()
    }

    pub fn key(&self) -> String {
        format!("{}_{}", self.dependent.code(), self.scope.code())
    }

    pub fn panel(&self, base: &PanelConfig) -> PanelConfig {
        PanelConfig {
            dependent: self.dependent,
            covid_scope: self.scope,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    /// `<role>@<offset>`, `const` or `ect`.
    pub item: String,
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub stars: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEstimate {
    pub model: String,
    pub dependent: String,
    pub regressors: Vec<String>,
    pub nobs: usize,
    pub sample_start: NaiveDate,
    pub sample_end: NaiveDate,
    /// Dependent lag order, then one order per regressor.
    pub orders: Vec<usize>,
    pub aic: f64,
    pub candidates: usize,
    pub bounds: BoundsResult,
    pub conclusion: GradedConclusion,
    pub long_run: Vec<Coefficient>,
    pub short_run: Vec<Coefficient>,
    pub ect: Option<Coefficient>,
    pub ect_validated: bool,
    pub diagnostics: DiagnosticsReport,
    pub warnings: Vec<String>,
}

fn role_of(ds: &Dataset, column: &str) -> (String, i64) {
    let idx = ds.columns().iter().position(|c| c.name == column);
    let col = idx.map(|i| &ds.columns()[i]);
    let role = match (idx, ds.columns().len()) {
        (Some(i), 4) => ROLES[i].to_string(),
        _ => col.map(|c| base_name(c).to_string()).unwrap_or_else(|| column.to_string()),
    };
    (role, col.map(|c| c.shift).unwrap_or(0))
}

fn item(role: &str, offset: i64) -> String {
    format!("{role}@{offset:+}").replace("@+0", "@0")
}

/// Estimate one model on an already-built panel: lag search, bounds test,
/// long-run normalization, second-stage ECM and diagnostics.
pub fn estimate_on(ds: &Dataset, cfg: &RunConfig, model: &str) -> Result<(ModelEstimate, ArdlFit)> {
    let search = ardl::select_lags(ds, cfg.panel.max_lag)?;
    let fit = ardl::fit_conditional_ecm(ds, &search.spec)?;
    let bounds = ardl::bounds_f_test(&fit, cfg.level, cfg.table)?;
    let conclusion = ardl::graded_conclusion(bounds.f_statistic, bounds.k, cfg.table)?;
    let mut warnings = Vec::new();
    if conclusion != GradedConclusion::Cointegration {
        warnings.push(format!("bounds test: {conclusion}; long-run and ECM results are exploratory"));
    }

    let mut long_run = Vec::new();
    let mut ect = None;
    let mut ect_validated = false;
    let mut short_run = Vec::new();
    match ardl::long_run_with_floor(&fit, cfg.normalization_floor) {
        Ok(lr) => {
            warnings.extend(lr.warnings.iter().cloned());
            for c in &lr.coefficients {
                let (role, shift) = role_of(ds, &c.variable);
                long_run.push(Coefficient {
                    item: item(&role, shift),
                    label: c.label.clone(),
                    estimate: c.estimate,
                    std_error: c.std_error,
                    p_value: c.p_value,
                    stars: c.stars.clone(),
                });
            }
            long_run.push(Coefficient {
                item: "const".into(),
                label: "c".into(),
                estimate: lr.intercept.estimate,
                std_error: lr.intercept.std_error,
                p_value: lr.intercept.p_value,
                stars: lr.intercept.stars.clone(),
            });
            match ardl::ecm_second_stage(ds, &fit.spec, &lr) {
                Ok(e) => {
                    warnings.extend(e.warnings.iter().cloned());
                    ect_validated = e.validated;
                    ect = e.theta.map(|theta| Coefficient {
                        item: "ect".into(),
                        label: "ECT_{t-1}".into(),
                        estimate: theta,
                        std_error: e.theta_std_error.unwrap_or(f64::NAN),
                        p_value: e.theta_p.unwrap_or(f64::NAN),
                        stars: e.theta_stars.clone(),
                    });
                    for s in &e.short_run {
                        let Some(term) = e.short_run_terms.iter().find(|t| t.name == s.name) else {
                            continue;
                        };
                        let TermKind::Difference { lag } = term.kind else { continue };
                        let (role, shift) = role_of(ds, &term.variable);
                        let offset = if term.variable == ds.dependent().name {
                            -(lag as i64)
                        } else {
                            shift - lag as i64
                        };
                        short_run.push(Coefficient {
                            item: item(&role, offset),
                            label: term.label.clone(),
                            estimate: s.coefficient,
                            std_error: s.std_error,
                            p_value: s.p_value,
                            stars: s.stars.clone(),
                        });
                    }
                }
                Err(e) => warnings.push(format!("second-stage ECM unavailable: {e}")),
            }
        }
        Err(e) => warnings.push(format!("long-run normalization unavailable: {e}")),
    }
    let diagnostics = diagnostics::diagnose(&fit.ols, &cfg.diagnostics);
    let estimate = ModelEstimate {
        model: model.to_string(),
        dependent: fit.spec.dependent.clone(),
        regressors: fit.spec.regressors.clone(),
        nobs: fit.ols.nobs,
        sample_start: fit.sample_start,
        sample_end: fit.sample_end,
        orders: fit.spec.orders(),
        aic: search.aic,
        candidates: search.candidates,
        bounds,
        conclusion,
        long_run,
        short_run,
        ect,
        ect_validated,
        diagnostics,
        warnings,
    };
    Ok((estimate, fit))
}

pub fn estimate_model(cfg: &RunConfig, id: ModelId) -> Result<ModelEstimate> {
    let panel = id.panel(&cfg.panel);
    let ds = ingest::build_dataset(&panel, &panel.sources())?;
    Ok(estimate_on(&ds, cfg, &id.key())?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootCell {
    pub level: UnitRootResult,
    pub first_difference: UnitRootResult,
    pub order: IntegrationOrder,
}

/// Level and first-difference tests plus the implied integration order.
pub fn unit_root_cell(series: &Series, cfg: &UnitRootConfig) -> Result<UnitRootCell> {
    let level = unit_root::run_test(series, cfg)?;
    let first_difference = unit_root::run_test(&timeseries::diff(series)?, cfg)?;
    let order = if level.decisions.reject_5pct {
        IntegrationOrder::I0
    } else if first_difference.decisions.reject_5pct {
        IntegrationOrder::I1
    } else {
        IntegrationOrder::Higher
    };
    Ok(UnitRootCell {
        level,
        first_difference,
        order,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub variable: String,
    pub column: String,
    /// The configured test and deterministic spec; drives the classification.
    pub primary: UnitRootCell,
    pub pp_constant: UnitRootCell,
    pub pp_trend: UnitRootCell,
    pub adf_constant: UnitRootCell,
}

/// Unit-root panel for every column of `ds`.
pub fn unit_root_panel(ds: &Dataset, cfg: &UnitRootConfig) -> Result<Vec<UnitRootRow>> {
    let with = |test, det| UnitRootConfig {
        test,
        deterministic: det,
        ..*cfg
    };
    ds.columns()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = ds.series(&c.name).expect("column exists");
            Ok(UnitRootRow {
                variable: if ds.columns().len() == 4 { ROLES[i].into() } else { c.name.clone() },
                column: c.name.clone(),
                primary: unit_root_cell(&s, cfg)?,
                pp_constant: unit_root_cell(&s, &with(TestKind::PhillipsPerron, Deterministic::Constant))?,
                pp_trend: unit_root_cell(&s, &with(TestKind::PhillipsPerron, Deterministic::ConstantTrend))?,
                adf_constant: unit_root_cell(&s, &with(TestKind::Adf, Deterministic::Constant))?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variable: String,
    #[serde(flatten)]
    pub stats: ColumnSummary,
}

/// Summary statistics in level units, one entry per role.
pub fn level_summary(ds: &Dataset) -> Result<Vec<SummaryRow>> {
    ds.columns()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let levels: Vec<f64> = c.values.iter().map(|&v| c.transform.inverse(v)).collect();
            let role = if ds.columns().len() == 4 { ROLES[i].to_string() } else { c.name.clone() };
            Ok(SummaryRow {
                variable: role,
                stats: timeseries::summarize_values(base_name(c), &levels)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub model: String,
    pub transforms: String,
    pub f_statistic: Option<f64>,
    pub conclusion: Option<GradedConclusion>,
    pub error: Option<String>,
}

/// One reference cell and how our value compares with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub section: String,
    pub model: String,
    pub item: String,
    pub ours: String,
    pub reference: String,
    pub rule: String,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedModel {
    pub model: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub config: RunConfig,
    pub panel_rows: usize,
    pub summary: Vec<SummaryRow>,
    pub unit_roots: Vec<UnitRootRow>,
    pub models: Vec<ModelEstimate>,
    pub failed_models: Vec<FailedModel>,
    pub level_transform_bounds: Vec<SensitivityRow>,
    pub comparisons: Vec<Comparison>,
    pub compared: usize,
    pub matched: usize,
}

#[derive(Debug, Clone)]
struct RefRow {
    section: String,
    model: String,
    item: String,
    value: String,
    std_error: String,
}

fn references() -> &'static [RefRow] {
    static ROWS: OnceLock<Vec<RefRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        REFERENCE_SOURCE
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#') && !l.starts_with("section,"))
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                RefRow {
                    section: f[0].into(),
                    model: f[1].into(),
                    item: f[2].into(),
                    value: f[3].into(),
                    std_error: f.get(4).copied().unwrap_or("").into(),
                }
            })
            .collect()
    })
}

fn reference_rows<'a>(section: &'a str, model: &'a str) -> impl Iterator<Item = &'static RefRow> + 'a {
    references()
        .iter()
        .filter(move |r| r.section == section && r.model == model)
}

/// Split `-0.282***` into `(-0.282, "***")`.
fn split_stars(cell: &str) -> (f64, &str) {
    let body = cell.trim_end_matches('*');
    (body.parse().unwrap_or(f64::NAN), &cell[body.len()..])
}

const COEF_RULE: &str = "sign exact, stars ±1 tier, magnitude ±50%";

fn compare_coefficient(ours: &Coefficient, reference: &RefRow) -> (bool, String) {
    let (value, stars) = split_stars(&reference.value);
    let ref_negative = reference.value.starts_with('-');
    // published cells are rounded to three decimals
    let tiny = 0.0005;
    let sign = if ours.estimate.abs() < tiny && value.abs() < tiny {
        true
    } else {
        (ours.estimate < 0.0) == ref_negative
    };
    let tier = (Significance::from_stars(&ours.stars).tier() - Significance::from_stars(stars).tier()).abs() <= 1;
    let magnitude = (ours.estimate - value).abs() <= (0.5 * value.abs()).max(tiny);
    let mut notes = Vec::new();
    if !sign {
        notes.push("sign");
    }
    if !tier {
        notes.push("stars");
    }
    if !magnitude {
        notes.push("magnitude");
    }
    (notes.is_empty(), notes.join("+"))
}

fn fmt_coef(c: &Coefficient) -> String {
    format!("{:.3}{} [{:.3}]", c.estimate, c.stars, c.std_error)
}

/// Reference comparisons for one model's cells.
pub fn compare_model(m: &ModelEstimate) -> Vec<Comparison> {
    let mut out = Vec::new();
    comparisons_for_model(m, &mut out);
    out
}

fn comparisons_for_model(m: &ModelEstimate, out: &mut Vec<Comparison>) {
    let push = |out: &mut Vec<Comparison>, section: &str, item: &str, ours: String, reference: String, rule: &str, matched: bool| {
        out.push(Comparison {
            section: section.into(),
            model: m.model.clone(),
            item: item.into(),
            ours,
            reference,
            rule: rule.into(),
            matched,
        })
    };
    for r in reference_rows("bounds", &m.model) {
        match r.item.as_str() {
            "f" => {
                let v: f64 = r.value.parse().unwrap_or(f64::NAN);
                let ok = (m.bounds.f_statistic - v).abs() <= 0.4 * v.abs();
                push(out, "bounds", "f", format!("{:.3}", m.bounds.f_statistic), r.value.clone(), "±40%", ok);
            }
            "conclusion" => {
                let ours = m.conclusion.to_string();
                push(out, "bounds", "conclusion", ours.clone(), r.value.clone(), "exact", ours == r.value);
            }
            "lower" | "upper" => {
                let ours = if r.item == "lower" { m.bounds.lower_bound } else { m.bounds.upper_bound };
                let v: f64 = r.value.parse().unwrap_or(f64::NAN);
                push(out, "bounds", &r.item, format!("{ours:.2}"), r.value.clone(), "exact", (ours - v).abs() < 1e-9);
            }
            _ => {}
        }
    }
    for section in ["long_run", "short_run", "ect"] {
        let ours_list: Vec<&Coefficient> = match section {
            "long_run" => m.long_run.iter().collect(),
            "short_run" => m.short_run.iter().collect(),
            _ => m.ect.iter().collect(),
        };
        for r in reference_rows(section, &m.model) {
            let reference = if r.std_error.is_empty() {
                r.value.clone()
            } else {
                format!("{} [{}]", r.value, r.std_error)
            };
            match ours_list.iter().find(|c| c.item == r.item) {
                Some(c) => {
                    let (ok, notes) = compare_coefficient(c, r);
                    let rule = if ok { COEF_RULE.to_string() } else { format!("{COEF_RULE}; off: {notes}") };
                    push(out, section, &r.item, fmt_coef(c), reference, &rule, ok);
                }
                None => push(out, section, &r.item, "absent".into(), reference, "term present", false),
            }
        }
    }
    let yes_no = |b: Option<bool>| match b {
        Some(true) => "YES",
        Some(false) => "NO",
        None => "n/a",
    };
    for r in reference_rows("tests", &m.model) {
        let ours = match r.item.as_str() {
            "serial_correlation" => yes_no(m.diagnostics.serial_correlation_detected),
            "arch" => yes_no(m.diagnostics.arch_detected),
            _ => yes_no(m.diagnostics.stable),
        };
        push(out, "tests", &r.item, ours.into(), r.value.clone(), "exact", ours == r.value);
    }
}

fn summary_comparisons(summary: &[SummaryRow], out: &mut Vec<Comparison>) {
    for r in reference_rows("summary", "wti_total") {
        let (role, stat) = r.item.split_once('.').unwrap_or((&r.item, ""));
        let Some(s) = summary.iter().find(|r| r.variable == role).map(|r| &r.stats) else { continue };
        let ours = match stat {
            "min" => s.min,
            "max" => s.max,
            "mean" => s.mean,
            _ => s.std,
        };
        let v: f64 = r.value.parse().unwrap_or(f64::NAN);
        out.push(Comparison {
            section: "summary".into(),
            model: "wti_total".into(),
            item: r.item.clone(),
            ours: format!("{ours:.4}"),
            reference: r.value.clone(),
            rule: "±2%".into(),
            matched: (ours - v).abs() <= 0.02 * v.abs(),
        });
    }
}

fn unit_root_comparisons(rows: &[UnitRootRow], out: &mut Vec<Comparison>) {
    for r in reference_rows("unit_root", "wti_total") {
        let (role, which) = r.item.split_once('.').unwrap_or((&r.item, ""));
        let Some(row) = rows.iter().find(|u| u.variable == role) else { continue };
        let res = if which == "level" { &row.primary.level } else { &row.primary.first_difference };
        let (v, stars) = split_stars(&r.value);
        let tier = (Significance::from_stars(res.stars()).tier() - Significance::from_stars(stars).tier()).abs() <= 1;
        let close = (res.statistic - v).abs() <= 0.8;
        out.push(Comparison {
            section: "unit_root".into(),
            model: "wti_total".into(),
            item: r.item.clone(),
            ours: format!("{:.3}{}", res.statistic, res.stars()),
            reference: r.value.clone(),
            rule: "statistic ±0.8, stars ±1 tier".into(),
            matched: tier && close,
        });
    }
}

fn level_sensitivity(cfg: &RunConfig, ids: &[ModelId]) -> Vec<SensitivityRow> {
    ids.iter()
        .map(|id| {
            let mut panel = id.panel(&cfg.panel);
            panel.transform_oil = Transform::Level;
            panel.transform_covid = Transform::Level;
            panel.transform_vix = Transform::Level;
            panel.transform_epu = Transform::Level;
            let result = ingest::build_dataset(&panel, &panel.sources()).and_then(|ds| {
                let s = ardl::select_lags(&ds, panel.max_lag)?;
                let fit = ardl::fit_conditional_ecm(&ds, &s.spec)?;
                let b = ardl::bounds_f_test(&fit, cfg.level, cfg.table)?;
                Ok((b.f_statistic, ardl::graded_conclusion(b.f_statistic, b.k, cfg.table)?))
            });
            let (f_statistic, conclusion, error) = match result {
                Ok((f, c)) => (Some(f), Some(c), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            SensitivityRow {
                model: id.key(),
                transforms: "level".into(),
                f_statistic,
                conclusion,
                error,
            }
        })
        .collect()
}

/// Run the listed models (all six when `models` is empty).
pub fn run(cfg: &RunConfig, models: &[ModelId]) -> Result<Replication> {
    let ids: Vec<ModelId> = if models.is_empty() { ModelId::all() } else { models.to_vec() };
    let base = ModelId {
        dependent: OilBenchmark::Wti,
        scope: CovidScope::Total,
    }
    .panel(&cfg.panel);
    let ds = ingest::build_dataset(&base, &base.sources())?;
    let summary = level_summary(&ds)?;
    let unit_roots = unit_root_panel(&ds, &cfg.unit_root)?;

    let mut estimates = Vec::new();
    let mut failed = Vec::new();
    for id in &ids {
        match estimate_model(cfg, *id) {
            Ok(m) => estimates.push(m),
            Err(e @ (Error::MissingFile { .. } | Error::Io { .. })) => return Err(e),
            Err(e) => failed.push(FailedModel {
                model: id.key(),
                error: e.to_string(),
            }),
        }
    }

    let mut comparisons = Vec::new();
    summary_comparisons(&summary, &mut comparisons);
    unit_root_comparisons(&unit_roots, &mut comparisons);
    for m in &estimates {
        comparisons_for_model(m, &mut comparisons);
    }
    let matched = comparisons.iter().filter(|c| c.matched).count();
    Ok(Replication {
        config: cfg.clone(),
        panel_rows: ds.len(),
        summary,
        unit_roots,
        models: estimates,
        failed_models: failed,
        level_transform_bounds: level_sensitivity(cfg, &ids),
        compared: comparisons.len(),
        matched,
        comparisons,
    })
}

pub fn to_json(rep: &Replication) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rep).map_err(|e| Error::Data(format!("serializing report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub const JSON_FILE: &str = "replication.json";
pub const TEXT_FILE: &str = "replication.txt";

/// Write `replication.json` and `replication.txt` into `dir`.
pub fn write_bundle(rep: &Replication, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(JSON_FILE), to_json(rep)?).map_err(io)?;
    std::fs::write(dir.join(TEXT_FILE), render_text(rep)).map_err(io)?;
    Ok(())
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "YES",
        Some(false) => "NO",
        None => "n/a",
    }
}

/// Long-run, short-run and tests blocks for one model.
pub fn render_model(m: &ModelEstimate, comparisons: &[Comparison]) -> String {
    let mut s = String::new();
    let lookup: BTreeMap<(&str, &str), &Comparison> = comparisons
        .iter()
        .filter(|c| c.model == m.model)
        .map(|c| ((c.section.as_str(), c.item.as_str()), c))
        .collect();
    let note = |section: &str, item: &str| match lookup.get(&(section, item)) {
        Some(c) => format!("{:<22} {}", c.reference, if c.matched { "match" } else { "MISMATCH" }),
        None => String::new(),
    };
    let _ = writeln!(s, "== {} ==", m.model);
    let _ = writeln!(
        s,
        "sample {} .. {} ({} obs), orders {:?}, AIC {:.3}",
        m.sample_start, m.sample_end, m.nobs, m.orders, m.aic
    );
    let _ = writeln!(
        s,
        "bounds F {:.3}  [{:.2}, {:.2}]  {}    {}",
        m.bounds.f_statistic,
        m.bounds.lower_bound,
        m.bounds.upper_bound,
        m.conclusion,
        note("bounds", "f")
    );
    let row = |s: &mut String, section: &str, c: &Coefficient| {
        let _ = writeln!(
            s,
            "  {:<28} {:>9.3}{:<3} [{:.3}]   {}",
            c.label,
            c.estimate,
            c.stars,
            c.std_error,
            note(section, &c.item)
        );
    };
    let _ = writeln!(s, "Long-run equation");
    for c in &m.long_run {
        row(&mut s, "long_run", c);
    }
    let _ = writeln!(s, "Short-run equation");
    for c in &m.short_run {
        row(&mut s, "short_run", c);
    }
    if let Some(e) = &m.ect {
        row(&mut s, "ect", e);
    }
    let _ = writeln!(s, "Tests");
    let _ = writeln!(
        s,
        "  {:<28} {:<6} {}",
        "Serial correlation",
        yes_no(m.diagnostics.serial_correlation_detected),
        note("tests", "serial_correlation")
    );
    let _ = writeln!(
        s,
        "  {:<28} {:<6} {}",
        "ARCH effects",
        yes_no(m.diagnostics.arch_detected),
        note("tests", "arch")
    );
    let _ = writeln!(
        s,
        "  {:<28} {:<6} {}",
        "Stability",
        yes_no(m.diagnostics.stable),
        note("tests", "stability")
    );
    if let Checked::Ok(n) = &m.diagnostics.normality {
        let _ = writeln!(s, "  {:<28} JB {:.3} (p {:.3})", "Normality", n.test.statistic, n.test.p_value);
    }
    for w in &m.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }
    s
}

pub fn render_text(rep: &Replication) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Summary statistics (level units, {} rows)", rep.panel_rows);
    let _ = write!(s, "{:<8}", "");
    for c in rep.summary.iter().map(|r| &r.stats) {
        let _ = write!(s, "{:>14}", c.name);
    }
    let _ = writeln!(s);
    for stat in ["min", "max", "mean", "std"] {
        let _ = write!(s, "{stat:<8}");
        for c in rep.summary.iter().map(|r| &r.stats) {
            let v = match stat {
                "min" => c.min,
                "max" => c.max,
                "mean" => c.mean,
                _ => c.std,
            };
            let _ = write!(s, "{v:>14.3}");
        }
        let _ = writeln!(s);
    }

    let ur = &rep.config.unit_root;
    let _ = writeln!(
        s,
        "\nUnit root tests (primary: {:?}, spec {})",
        ur.test,
        ur.deterministic.code()
    );
    let _ = writeln!(
        s,
        "{:<8}{:>14}{:>14}{:>14}{:>14}{:>14}{:>14}  order",
        "", "level", "difference", "PP(ct) level", "PP(ct) diff", "ADF level", "ADF diff"
    );
    let cell = |r: &UnitRootResult| format!("{:.3}{}", r.statistic, r.stars());
    for r in &rep.unit_roots {
        let _ = writeln!(
            s,
            "{:<8}{:>14}{:>14}{:>14}{:>14}{:>14}{:>14}  {:?}",
            r.variable,
            cell(&r.primary.level),
            cell(&r.primary.first_difference),
            cell(&r.pp_trend.level),
            cell(&r.pp_trend.first_difference),
            cell(&r.adf_constant.level),
            cell(&r.adf_constant.first_difference),
            r.primary.order
        );
    }

    let _ = writeln!(s, "\nBounds tests ({:?}, {}% level)", rep.config.table, rep.config.level * 100.0);
    for m in &rep.models {
        let _ = writeln!(
            s,
            "{:<22}{:>9.3}{:>7.2}{:>7.2}  {}",
            m.model, m.bounds.f_statistic, m.bounds.lower_bound, m.bounds.upper_bound, m.conclusion
        );
    }
    for f in &rep.failed_models {
        let _ = writeln!(s, "{:<22} failed: {}", f.model, f.error);
    }
    let _ = writeln!(s, "\nBounds F with all series in levels");
    for r in &rep.level_transform_bounds {
        match (r.f_statistic, r.conclusion, &r.error) {
            (Some(f), Some(c), _) => {
                let _ = writeln!(s, "{:<22}{:>9.3}  {}", r.model, f, c);
            }
            (_, _, e) => {
                let _ = writeln!(s, "{:<22} failed: {}", r.model, e.as_deref().unwrap_or("?"));
            }
        }
    }

    for m in &rep.models {
        let _ = writeln!(s);
        s.push_str(&render_model(m, &rep.comparisons));
    }

    let _ = writeln!(s, "\nReference comparison: {} of {} cells match", rep.matched, rep.compared);
    for c in &rep.comparisons {
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:<20} {:<16} ours {:<26} ref {:<22} {}",
            if c.matched { "match" } else { "MISS" },
            c.section,
            c.model,
            c.item,
            c.ours,
            c.reference,
            c.rule
        );
    }
    s
}

/// Bounds result only, for the `bounds` subcommand.
pub fn bounds_only(cfg: &RunConfig, id: ModelId) -> Result<(BoundsResult, GradedConclusion, Vec<usize>)> {
    let panel = id.panel(&cfg.panel);
    let ds = ingest::build_dataset(&panel, &panel.sources())?;
    let s = ardl::select_lags(&ds, panel.max_lag)?;
    let fit = ardl::fit_conditional_ecm(&ds, &s.spec)?;
    let b = ardl::bounds_f_test(&fit, cfg.level, cfg.table)?;
    let g = ardl::graded_conclusion(b.f_statistic, b.k, cfg.table)?;
    Ok((b, g, s.spec.orders()))
}
