//! Run configuration: panel settings plus estimation and output knobs, read
//! from a `key = value` file and overridable key by key.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ardl::{CriticalTable, DEFAULT_NORMALIZATION_FLOOR};
use crate::diagnostics::DiagnosticsConfig;
use crate::error::{Error, Result};
use crate::ingest::{self, parse_with, PanelConfig};
use crate::unit_root::{Deterministic, TestKind, UnitRootConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Some(OutputFormat::Json),
            "text" | "text-table" | "table" => Some(OutputFormat::Text),
            "csv" => Some(OutputFormat::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub panel: PanelConfig,
    /// Significance level for the bounds decision.
    pub level: f64,
    pub table: CriticalTable,
    pub unit_root: UnitRootConfig,
    pub diagnostics: DiagnosticsConfig,
    pub normalization_floor: f64,
    pub format: OutputFormat,
    pub seed: u64,
    pub replications: usize,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            panel: PanelConfig::default(),
            level: 0.05,
            table: CriticalTable::default(),
            unit_root: UnitRootConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
            normalization_floor: DEFAULT_NORMALIZATION_FLOOR,
            format: OutputFormat::default(),
            seed: 20200310,
            replications: 1000,
            threads: None,
        }
    }
}

pub const RUN_KEYS: &[(&str, &str)] = &[
    ("level", "bounds-test significance level: 0.10 | 0.05 | 0.025 | 0.01 (default 0.05)"),
    ("table", "bounds critical values: pss_ii | pss_iii (default pss_ii)"),
    ("unit_root_test", "pp | adf (default pp)"),
    ("unit_root_spec", "n | c | ct (default c)"),
    ("bandwidth", "Newey-West bandwidth for PP; `auto` = floor(4(T/100)^(2/9))"),
    ("bg_lags", "Breusch-Godfrey lags (default 4)"),
    ("arch_lags", "ARCH-LM lags (default 4)"),
    ("normalization_floor", "|t| of the lagged dependent level below which a warning is issued (default 1.0)"),
    ("format", "json | text | csv (default json)"),
    ("seed", "Monte Carlo seed"),
    ("replications", "Monte Carlo replications (default 1000)"),
    ("threads", "Monte Carlo worker threads; `auto` = all cores"),
];

/// Every documented key with a one-line description.
pub fn all_keys() -> impl Iterator<Item = &'static (&'static str, &'static str)> {
    ingest::PANEL_KEYS.iter().chain(RUN_KEYS)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if self.panel.set(key, value)? {
            if key == "max_lag" {
                self.unit_root.max_lag = self.panel.max_lag;
            }
            return Ok(());
        }
        let v = value.trim();
        let usize_of = |k: &str| parse_with(k, v, |s| s.parse::<usize>().ok());
        let auto = |k: &str| -> Result<Option<usize>> {
            if v.eq_ignore_ascii_case("auto") {
                Ok(None)
            } else {
                usize_of(k).map(Some)
            }
        };
        match key {
            "level" => {
                self.level = parse_with(key, v, |s| s.parse::<f64>().ok().filter(|l| *l > 0.0 && *l < 1.0))?
            }
            "table" => self.table = parse_with(key, v, CriticalTable::parse)?,
            "unit_root_test" => self.unit_root.test = parse_with(key, v, TestKind::parse)?,
            "unit_root_spec" => self.unit_root.deterministic = parse_with(key, v, Deterministic::parse)?,
            "bandwidth" => self.unit_root.bandwidth = auto(key)?,
            "bg_lags" => self.diagnostics.bg_lags = usize_of(key)?,
            "arch_lags" => self.diagnostics.arch_lags = usize_of(key)?,
            "normalization_floor" => {
                self.normalization_floor = parse_with(key, v, |s| s.parse::<f64>().ok().filter(|f| *f >= 0.0))?
            }
            "format" => self.format = parse_with(key, v, OutputFormat::parse)?,
            "seed" => self.seed = parse_with(key, v, |s| s.parse::<u64>().ok())?,
            "replications" => self.replications = usize_of(key)?,
            "threads" => self.threads = auto(key)?,
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (k, v) in ingest::parse_key_values(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }
}
