//! Snapshot loading and panel construction.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{self, Column, Dataset, Role, Series, Transform};

/// Report date of the China spike that plots leave out.
pub const OUTLIER_REPORT: NaiveDate = match NaiveDate::from_ymd_opt(2020, 2, 17) {
    Some(d) => d,
    None => panic!("bad date"),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    WhoCovid,
    EiaOil,
    CboeVix,
    EpuDaily,
}

impl SourceKind {
    pub const ALL: [SourceKind; 4] = [
        SourceKind::EiaOil,
        SourceKind::WhoCovid,
        SourceKind::CboeVix,
        SourceKind::EpuDaily,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            SourceKind::WhoCovid => "who_covid.csv",
            SourceKind::EiaOil => "eia_oil.csv",
            SourceKind::CboeVix => "cboe_vix.csv",
            SourceKind::EpuDaily => "epu_daily.csv",
        }
    }

    pub fn source_url(self) -> &'static str {
        match self {
            SourceKind::WhoCovid => {
                "https://www.who.int/emergencies/diseases/novel-coronavirus-2019/situation-reports"
            }
            SourceKind::EiaOil => "https://www.eia.gov/dnav/pet/pet_pri_spt_s1_d.htm",
            SourceKind::CboeVix => "https://www.cboe.com/tradable_products/vix/vix_historical_data/",
            SourceKind::EpuDaily => "https://www.policyuncertainty.com/us_daily.html",
        }
    }

    fn units(self) -> &'static str {
        match self {
            SourceKind::WhoCovid => "persons/day",
            SourceKind::EiaOil => "USD/barrel",
            SourceKind::CboeVix | SourceKind::EpuDaily => "index points",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CovidScope {
    #[default]
    Total,
    China,
    OutsideChina,
}

impl CovidScope {
    pub const ALL: [CovidScope; 3] = [CovidScope::Total, CovidScope::China, CovidScope::OutsideChina];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "total" => Some(CovidScope::Total),
            "china" => Some(CovidScope::China),
            "outside" | "outside_china" => Some(CovidScope::OutsideChina),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            CovidScope::Total => "total",
            CovidScope::China => "china",
            CovidScope::OutsideChina => "outside_china",
        }
    }
}

impl fmt::Display for CovidScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OilBenchmark {
    #[default]
    Wti,
    Brent,
}

impl OilBenchmark {
    pub const ALL: [OilBenchmark; 2] = [OilBenchmark::Wti, OilBenchmark::Brent];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wti" => Some(OilBenchmark::Wti),
            "brent" => Some(OilBenchmark::Brent),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            OilBenchmark::Wti => "wti",
            OilBenchmark::Brent => "brent",
        }
    }
}

impl fmt::Display for OilBenchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Where one series lives and how to read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub path: PathBuf,
    pub date_column: String,
    /// One value column, or `[total, china]` for WHO files.
    pub value_columns: Vec<String>,
    pub scope: CovidScope,
    /// Name given to the loaded series.
    pub name: String,
}

impl SourceSpec {
    /// The bundled snapshot layout under `data_dir`.
    pub fn standard(kind: SourceKind, data_dir: &Path, oil: OilBenchmark, scope: CovidScope) -> Self {
        let (values, name): (Vec<&str>, String) = match kind {
            SourceKind::WhoCovid => (vec!["new_total", "new_china"], format!("covid_{}", scope.code())),
            SourceKind::EiaOil => (vec![oil.code()], oil.code().to_string()),
            SourceKind::CboeVix => (vec!["vix"], "vix".into()),
            SourceKind::EpuDaily => (vec!["epu"], "epu".into()),
        };
        Self {
            kind,
            path: data_dir.join(kind.file_name()),
            date_column: "date".into(),
            value_columns: values.into_iter().map(String::from).collect(),
            scope,
            name,
        }
    }
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn open_reader(path: &Path, url: &str) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile {
                path: path.to_path_buf(),
                source_url: url.to_string(),
            }
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

pub fn load_source(spec: &SourceSpec) -> Result<Series> {
    let path_str = spec.path.display().to_string();
    let path_buf = spec.path.clone();
    let mut reader = open_reader(&spec.path, spec.kind.source_url())?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path_buf.clone(),
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let position = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Data(format!("{path_str}: column `{name}` not in header"))
        })
    };
    let date_idx = position(&spec.date_column)?;
    let value_idx: Vec<usize> = spec.value_columns.iter().map(|c| position(c)).collect::<Result<_>>()?;
    if spec.kind == SourceKind::WhoCovid && value_idx.len() != 2 {
        return Err(Error::Data(format!(
            "{path_str}: WHO sources map two value columns (total, china)"
        )));
    }

    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let parse_err = |reason: String| Error::Parse {
            path: path_buf.clone(),
            line,
            reason,
        };
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| parse_err(format!("bad date `{raw_date}`")))?;
        let cells: Vec<&str> = value_idx.iter().map(|&j| record.get(j).unwrap_or("")).collect();
        if cells.iter().all(|c| c.is_empty()) {
            continue;
        }
        let nums: Vec<f64> = cells
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("bad value `{c}`")))
            })
            .collect::<Result<_>>()?;
        let value = if spec.kind == SourceKind::WhoCovid {
            let (total, china) = (nums[0], nums[1]);
            match spec.scope {
                CovidScope::Total => total,
                CovidScope::China => china,
                CovidScope::OutsideChina => {
                    let outside = total - china;
                    if outside < 0.0 {
                        return Err(Error::Data(format!(
                            "{path_str} line {line}: outside-China count {outside} is negative on {date}"
                        )));
                    }
                    outside
                }
            }
        } else {
            nums[0]
        };
        dates.push(date);
        values.push(value);
    }
    Series::new(spec.name.clone(), spec.kind.units(), dates, values)
}

/// Timing, transform and window settings for the estimation panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelConfig {
    pub data_dir: PathBuf,
    pub dependent: OilBenchmark,
    pub covid_scope: CovidScope,
    pub covid_shift: i64,
    pub vix_shift: i64,
    pub epu_shift: i64,
    pub transform_oil: Transform,
    pub transform_covid: Transform,
    pub transform_vix: Transform,
    pub transform_epu: Transform,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    /// Largest lag the panel must support; fewer than `max_lag + 10` rows is an error.
    pub max_lag: usize,
}

impl Default for PanelConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            dependent: OilBenchmark::Wti,
            covid_scope: CovidScope::Total,
            covid_shift: 1,
            vix_shift: 0,
            epu_shift: -1,
            transform_oil: Transform::Log,
            transform_covid: Transform::Log1p,
            transform_vix: Transform::Log,
            transform_epu: Transform::Log,
            window_start: NaiveDate::from_ymd_opt(2020, 1, 21).expect("date"),
            window_end: NaiveDate::from_ymd_opt(2020, 3, 9).expect("date"),
            max_lag: 4,
        }
    }
}

pub const PANEL_KEYS: &[(&str, &str)] = &[
    ("data_dir", "directory holding the snapshot CSVs"),
    ("dependent", "wti | brent"),
    ("covid_scope", "total | china | outside_china"),
    ("covid_shift", "shift of the COVID series, +1 = lead (default 1)"),
    ("vix_shift", "shift of VIX (default 0)"),
    ("epu_shift", "shift of EPU, -1 = lag (default -1)"),
    ("transform_oil", "level | log | log1p (default log)"),
    ("transform_covid", "level | log | log1p (default log1p)"),
    ("transform_vix", "level | log | log1p (default log)"),
    ("transform_epu", "level | log | log1p (default log)"),
    ("window_start", "first panel date, YYYY-MM-DD (default 2020-01-21)"),
    ("window_end", "last panel date, YYYY-MM-DD (default 2020-03-09)"),
    ("max_lag", "maximum ARDL lag (default 4)"),
];

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value `{value}` for `{key}`"))
}

pub(crate) fn parse_with<T>(key: &str, value: &str, f: impl FnOnce(&str) -> Option<T>) -> Result<T> {
    f(value).ok_or_else(|| bad(key, value))
}

impl PanelConfig {
    /// Apply one `key = value` setting. Returns `false` for keys this struct does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        let v = value.trim();
        let int = |k: &str| parse_with(k, v, |s| s.parse::<i64>().ok());
        let tf = |k: &str| parse_with(k, v, Transform::parse);
        let date = |k: &str| parse_with(k, v, parse_date);
        match key {
            "data_dir" => self.data_dir = PathBuf::from(v),
            "dependent" => self.dependent = parse_with(key, v, OilBenchmark::parse)?,
            "covid_scope" | "model" | "variant" => self.covid_scope = parse_with(key, v, CovidScope::parse)?,
            "covid_shift" => self.covid_shift = int(key)?,
            "vix_shift" => self.vix_shift = int(key)?,
            "epu_shift" => self.epu_shift = int(key)?,
            "transform_oil" => self.transform_oil = tf(key)?,
            "transform_covid" => self.transform_covid = tf(key)?,
            "transform_vix" => self.transform_vix = tf(key)?,
            "transform_epu" => self.transform_epu = tf(key)?,
            "window_start" => self.window_start = date(key)?,
            "window_end" => self.window_end = date(key)?,
            "max_lag" => self.max_lag = parse_with(key, v, |s| s.parse::<usize>().ok())?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn sources(&self) -> Vec<SourceSpec> {
        SourceKind::ALL
            .iter()
            .map(|&k| SourceSpec::standard(k, &self.data_dir, self.dependent, self.covid_scope))
            .collect()
    }

    fn setting(&self, kind: SourceKind) -> (i64, Transform) {
        match kind {
            SourceKind::EiaOil => (0, self.transform_oil),
            SourceKind::WhoCovid => (self.covid_shift, self.transform_covid),
            SourceKind::CboeVix => (self.vix_shift, self.transform_vix),
            SourceKind::EpuDaily => (self.epu_shift, self.transform_epu),
        }
    }
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Load every source, shift each on its own calendar, align on the dates
/// all of them share inside the window, then transform. The oil column is the
/// dependent; regressors follow in COVID, VIX, EPU order.
pub fn build_dataset(config: &PanelConfig, sources: &[SourceSpec]) -> Result<Dataset> {
    let mut ordered = Vec::new();
    for kind in SourceKind::ALL {
        let spec = sources
            .iter()
            .find(|s| s.kind == kind)
            .ok_or_else(|| Error::Config(format!("no source given for {kind:?}")))?;
        ordered.push(spec);
    }
    let mut shifted = Vec::with_capacity(4);
    let mut meta = Vec::with_capacity(4);
    for spec in &ordered {
        let (k, tf) = config.setting(spec.kind);
        let s = timeseries::shift(&load_source(spec)?, k)?;
        shifted.push(s.window(config.window_start, config.window_end));
        meta.push((k, tf));
    }
    let panel = timeseries::align(&shifted, true)?;
    let required = config.max_lag + 10;
    if panel.len() < required {
        return Err(Error::SampleTooSmall {
            rows: panel.len(),
            required,
        });
    }
    let calendar = panel.calendar().to_vec();
    let columns = panel
        .to_series()
        .iter()
        .zip(&meta)
        .enumerate()
        .map(|(i, (s, &(k, tf)))| {
            let t = timeseries::transform(s, tf)?;
            Ok(Column {
                name: t.name().to_string(),
                units: t.units().to_string(),
                values: t.values().to_vec(),
                transform: tf,
                shift: k,
                role: if i == 0 { Role::Dependent } else { Role::Regressor },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(calendar, columns)
}

/// Column name with any transform suffix removed.
pub fn base_name(col: &Column) -> &str {
    if col.transform == Transform::Level {
        return &col.name;
    }
    col.name
        .strip_suffix(&format!("_{}", col.transform.tag()))
        .unwrap_or(&col.name)
}

/// True when the row's COVID value comes from the outlier report.
fn is_outlier_row(dataset: &Dataset, row: usize) -> bool {
    let date = dataset.calendar()[row];
    dataset.columns().iter().any(|c| {
        c.name.starts_with("covid")
            && date.checked_add_signed(TimeDelta::days(c.shift)) == Some(OUTLIER_REPORT)
    })
}

pub const OUTLIER_COLUMN: &str = "outlier";

/// Write `date`, every column in level units, and an outlier flag.
pub fn export_plot_data(dataset: &Dataset, path: &Path) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut out = String::from("date");
    for c in dataset.columns() {
        out.push(',');
        out.push_str(base_name(c));
    }
    out.push(',');
    out.push_str(OUTLIER_COLUMN);
    out.push('\n');
    for (row, date) in dataset.calendar().iter().enumerate() {
        out.push_str(&date.to_string());
        for c in dataset.columns() {
            out.push(',');
            out.push_str(&c.transform.inverse(c.values[row]).to_string());
        }
        out.push_str(if is_outlier_row(dataset, row) { ",1\n" } else { ",0\n" });
    }
    let mut file = File::create(path).map_err(io_err)?;
    file.write_all(out.as_bytes()).map_err(io_err)
}

/// Read a plot export back as a level-unit dataset; the first column is the dependent.
pub fn import_plot_data(path: &Path) -> Result<Dataset> {
    let path_str = path.display().to_string();
    let path_buf = path.to_path_buf();
    let mut reader = open_reader(path, "exported by export_plot_data")?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path_buf.clone(),
            line: 1,
            reason: e.to_string(),
        })?
        .iter()
        .map(String::from)
        .collect();
    if headers.first().map(String::as_str) != Some("date") {
        return Err(Error::Data(format!("{path_str}: first column must be `date`")));
    }
    let names: Vec<&String> = headers[1..].iter().filter(|h| *h != OUTLIER_COLUMN).collect();
    let mut calendar = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let err = |reason: String| Error::Parse {
            path: path_buf.clone(),
            line,
            reason,
        };
        let record = record.map_err(|e| err(e.to_string()))?;
        let raw = record.get(0).unwrap_or("");
        calendar.push(parse_date(raw).ok_or_else(|| err(format!("bad date `{raw}`")))?);
        let mut j = 0;
        for (h, cell) in headers[1..].iter().zip(record.iter().skip(1)) {
            if h == OUTLIER_COLUMN {
                continue;
            }
            values[j].push(cell.parse::<f64>().map_err(|_| err(format!("bad value `{cell}`")))?);
            j += 1;
        }
    }
    let columns = names
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (name, v))| Column {
            name: name.to_string(),
            units: String::new(),
            values: v,
            transform: Transform::Level,
            shift: 0,
            role: if i == 0 { Role::Dependent } else { Role::Regressor },
        })
        .collect();
    Dataset::new(calendar, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Days;
    use tempfile::TempDir;

    fn bundled() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
    }

    fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn spec(kind: SourceKind, path: PathBuf, cols: &[&str], scope: CovidScope) -> SourceSpec {
        SourceSpec {
            kind,
            path,
            date_column: "date".into(),
            value_columns: cols.iter().map(|s| s.to_string()).collect(),
            scope,
            name: "s".into(),
        }
    }

    #[test]
    fn loads_small_file() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "v.csv", "date,vix\n2020-01-02,1.5\n2020-01-03,2\n2020-01-06,2.5\n");
        let s = load_source(&spec(SourceKind::CboeVix, p, &["vix"], CovidScope::Total)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.values(), &[1.5, 2.0, 2.5]);
    }

    #[test]
    fn outside_china_is_difference() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "w.csv", "date,t,c\n2020-01-02,100,90\n");
        let s = load_source(&spec(SourceKind::WhoCovid, p.clone(), &["t", "c"], CovidScope::OutsideChina)).unwrap();
        assert_eq!(s.values(), &[10.0]);
        let p = write(&dir, "neg.csv", "date,t,c\n2020-01-02,100,90\n2020-01-03,5,9\n");
        let e = load_source(&spec(SourceKind::WhoCovid, p, &["t", "c"], CovidScope::OutsideChina)).unwrap_err();
        assert!(matches!(e, Error::Data(ref m) if m.contains("line 3")), "{e}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "b.csv", "date,vix\n2020-01-02,1\n2020-01-03,abc\n");
        let e = load_source(&spec(SourceKind::CboeVix, p, &["vix"], CovidScope::Total)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let p = write(&dir, "d.csv", "date,vix\n01/02/2020,1\n");
        let e = load_source(&spec(SourceKind::CboeVix, p, &["vix"], CovidScope::Total)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let p = write(&dir, "h.csv", "day,vix\n2020-01-02,1\n");
        assert!(matches!(
            load_source(&spec(SourceKind::CboeVix, p, &["vix"], CovidScope::Total)),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn missing_file_names_source_url() {
        let s = SourceSpec::standard(SourceKind::EpuDaily, Path::new("/nonexistent"), OilBenchmark::Wti, CovidScope::Total);
        match load_source(&s) {
            Err(Error::MissingFile { path, source_url }) => {
                assert!(path.ends_with("epu_daily.csv"));
                assert!(source_url.contains("policyuncertainty"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn snapshot_keeps_the_china_spike() {
        let dir = bundled();
        let china = load_source(&SourceSpec::standard(SourceKind::WhoCovid, &dir, OilBenchmark::Wti, CovidScope::China)).unwrap();
        assert_eq!(china.value_on(OUTLIER_REPORT), Some(19461.0));
        let total = load_source(&SourceSpec::standard(SourceKind::WhoCovid, &dir, OilBenchmark::Wti, CovidScope::Total)).unwrap();
        let outside = load_source(&SourceSpec::standard(SourceKind::WhoCovid, &dir, OilBenchmark::Wti, CovidScope::OutsideChina)).unwrap();
        for ((t, c), o) in total.values().iter().zip(china.values()).zip(outside.values()) {
            assert_eq!(c + o, *t);
        }
    }

    #[test]
    fn default_panel_on_snapshots() {
        let cfg = PanelConfig {
            data_dir: bundled(),
            ..PanelConfig::default()
        };
        let ds = build_dataset(&cfg, &cfg.sources()).unwrap();
        assert!(ds.len() <= 49);
        assert_eq!(*ds.calendar().last().unwrap(), cfg.window_end);
        assert_eq!(ds.dependent().name, "wti_log");
        let covid = ds.column("covid_total_log1p").unwrap();
        assert_eq!(covid.shift, 1);
        assert_eq!(ds.column("epu_log").unwrap().shift, -1);
        // the last row carries the next day's report
        assert_eq!(covid.values.last().unwrap().exp_m1().round(), 113702.0 - 109577.0);
        let oil = load_source(&SourceSpec::standard(SourceKind::EiaOil, &cfg.data_dir, OilBenchmark::Wti, CovidScope::Total)).unwrap();
        assert!(ds.calendar().iter().all(|d| oil.value_on(*d).is_some()));
    }

    fn synthetic_sources(dir: &TempDir, days: usize) -> Vec<SourceSpec> {
        let start = NaiveDate::from_ymd_opt(2021, 1, 4).unwrap();
        let mut trading = Vec::new();
        let mut d = start;
        while trading.len() < days {
            if chrono::Datelike::weekday(&d).number_from_monday() <= 5 {
                trading.push(d);
            }
            d = d.succ_opt().unwrap();
        }
        let all: Vec<NaiveDate> = (0..(d - start).num_days() + 1).map(|i| start + Days::new(i as u64)).collect();
        let body = |header: &str, dates: &[NaiveDate]| {
            let mut s = format!("date,{header}\n");
            for (i, d) in dates.iter().enumerate() {
                let v = 10.0 + i as f64;
                if header.contains(',') {
                    s.push_str(&format!("{d},{v},{}\n", v / 2.0));
                } else {
                    s.push_str(&format!("{d},{v}\n"));
                }
            }
            s
        };
        let mk = |kind, file: &str, header: &str, cols: &[&str], dates: &[NaiveDate]| {
            spec(kind, write(dir, file, &body(header, dates)), cols, CovidScope::Total)
        };
        let mut out = vec![
            mk(SourceKind::EiaOil, "o.csv", "wti", &["wti"], &trading),
            mk(SourceKind::WhoCovid, "w.csv", "t,c", &["t", "c"], &trading),
            mk(SourceKind::CboeVix, "v.csv", "vix", &["vix"], &trading),
            mk(SourceKind::EpuDaily, "e.csv", "epu", &["epu"], &all),
        ];
        for (s, n) in out.iter_mut().zip(["oil", "covid", "vix", "epu"]) {
            s.name = n.into();
        }
        out
    }

    fn wide_config() -> PanelConfig {
        PanelConfig {
            window_start: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            window_end: NaiveDate::from_ymd_opt(2100, 1, 1).unwrap(),
            ..PanelConfig::default()
        }
    }

    #[test]
    fn lead_on_sixty_business_days_drops_one_row() {
        let dir = TempDir::new().unwrap();
        let sources = synthetic_sources(&dir, 60);
        let mut cfg = wide_config();
        cfg.epu_shift = 0;
        let ds = build_dataset(&cfg, &sources).unwrap();
        assert_eq!(ds.len(), 59);
        cfg.covid_shift = 0;
        assert_eq!(build_dataset(&cfg, &sources).unwrap().len(), 60);
    }

    #[test]
    fn short_panel_is_rejected() {
        let dir = TempDir::new().unwrap();
        let sources = synthetic_sources(&dir, 12);
        let cfg = wide_config();
        assert!(matches!(
            build_dataset(&cfg, &sources),
            Err(Error::SampleTooSmall { required: 14, .. })
        ));
    }

    #[test]
    fn config_keys_parse() {
        let mut cfg = PanelConfig::default();
        for (k, v) in parse_key_values("dependent = brent # comment\n\ncovid_scope=outside\ntransform_covid = level\n").unwrap() {
            assert!(cfg.set(&k, &v).unwrap());
        }
        assert_eq!(cfg.dependent, OilBenchmark::Brent);
        assert_eq!(cfg.covid_scope, CovidScope::OutsideChina);
        assert_eq!(cfg.transform_covid, Transform::Level);
        assert!(!cfg.set("unknown", "1").unwrap());
        assert!(cfg.set("covid_shift", "x").is_err());
        assert!(parse_key_values("no equals sign").is_err());
    }

    #[test]
    fn plot_export_round_trips_and_flags_outlier() {
        let tmp = TempDir::new().unwrap();
        let cfg = PanelConfig {
            data_dir: bundled(),
            dependent: OilBenchmark::Brent,
            covid_shift: 0,
            vix_shift: 0,
            epu_shift: 0,
            transform_oil: Transform::Level,
            transform_covid: Transform::Level,
            transform_vix: Transform::Level,
            transform_epu: Transform::Level,
            ..PanelConfig::default()
        };
        let mut sources = cfg.sources();
        // VIX has no 2020-02-17 close; plot the oil/COVID/EPU trio by reusing EPU in its place
        sources[2] = SourceSpec {
            kind: SourceKind::CboeVix,
            name: "epu_again".into(),
            ..SourceSpec::standard(SourceKind::EpuDaily, &cfg.data_dir, cfg.dependent, cfg.covid_scope)
        };
        let ds = build_dataset(&cfg, &sources).unwrap();
        let path = tmp.path().join("plot.csv");
        export_plot_data(&ds, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), ds.len() + 1);
        let flagged: Vec<&str> = text.lines().filter(|l| l.ends_with(",1")).collect();
        assert_eq!(flagged.len(), 1);
        assert!(flagged[0].starts_with("2020-02-17,"));
        let back = import_plot_data(&path).unwrap();
        assert_eq!(back.calendar(), ds.calendar());
        for (a, b) in back.columns().iter().zip(ds.columns()) {
            assert_eq!(a.values, b.values);
        }
        let again = tmp.path().join("plot2.csv");
        export_plot_data(&back, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn three_by_two_export() {
        let tmp = TempDir::new().unwrap();
        let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let ds = Dataset::from_columns(start, vec![("a", vec![1.0, 2.0, 3.0]), ("b", vec![4.0, 5.0, 6.5])]).unwrap();
        let path = tmp.path().join("p.csv");
        export_plot_data(&ds, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "date,a,b,outlier\n2020-01-01,1,4,0\n2020-01-02,2,5,0\n2020-01-03,3,6.5,0\n");
        assert!(matches!(export_plot_data(&ds, Path::new("/nonexistent/dir/p.csv")), Err(Error::Io { .. })));
    }
}
