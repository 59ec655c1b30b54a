//! `ardl`: command-line front end for the bounds-testing workflow.
//!
//! Every configuration key is a global `--key-name` flag. Precedence is
//! built-in default, then `--config` file, then flag.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ardl_core::ardl::ArdlFit;
use ardl_core::config::{all_keys, OutputFormat, RunConfig};
use ardl_core::diagnostics::{Checked, DiagnosticsReport};
use ardl_core::ingest::{self, CovidScope, OilBenchmark};
use ardl_core::replicate::{self, ModelEstimate, ModelId, ROLES};
use ardl_core::simulate::{self, Dgp, Experiment, McTest};
use ardl_core::timeseries::Dataset;
use clap::{Arg, ArgMatches, Command};
use serde_json::json;

#[derive(Debug)]
enum Failure {
    Core(ardl_core::Error),
    Usage(String),
}

impl From<ardl_core::Error> for Failure {
    fn from(e: ardl_core::Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn key_args() -> Vec<Arg> {
    let mut args = vec![Arg::new("config")
        .long("config")
        .value_name("FILE")
        .global(true)
        .value_parser(clap::value_parser!(PathBuf))
        .help("key = value configuration file; flags override its entries")];
    for (key, help) in all_keys() {
        let mut arg = Arg::new(*key)
            .long(flag_name(key))
            .value_name("VALUE")
            .global(true)
            .help_heading("Configuration keys")
            .help(*help);
        arg = match *key {
            "covid_scope" => arg.visible_aliases(["model", "variant"]),
            "unit_root_test" => arg
                .visible_alias("test")
                .help(format!("{help}; for `simulate`, the Monte Carlo test")),
            "unit_root_spec" => arg.visible_alias("spec"),
            _ => arg,
        };
        args.push(arg);
    }
    args
}

fn cli() -> Command {
    let keys = all_keys()
        .map(|(k, h)| format!("  {k:<20} {h}"))
        .collect::<Vec<_>>()
        .join("\n");
    Command::new("ardl")
        .version(env!("CARGO_PKG_VERSION"))
        .about("ARDL bounds-testing cointegration on the bundled oil/COVID-19/VIX/EPU snapshots")
        .after_help(format!(
            "Config file keys (one `key = value` per line, `#` starts a comment):\n{keys}"
        ))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .args(key_args())
        .subcommand(Command::new("ingest").about("Build the aligned, transformed panel"))
        .subcommand(Command::new("summary").about("Summary statistics of the panel in level units"))
        .subcommand(
            Command::new("unit-root")
                .about("Unit-root test on one panel variable, in level and first difference")
                .arg(
                    Arg::new("var")
                        .long("var")
                        .required(true)
                        .value_name("NAME")
                        .help("oil | covid | vix | epu, or a panel column name"),
                ),
        )
        .subcommand(Command::new("bounds").about("AIC lag search and bounds F test for one model"))
        .subcommand(Command::new("fit").about("Long-run, short-run and ECT estimates with diagnostics"))
        .subcommand(
            Command::new("diagnose")
                .about("Residual diagnostics of the selected model")
                .arg(
                    Arg::new("cusum-csv")
                        .long("cusum-csv")
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("also write the CUSUM path and its 5% bounds as CSV"),
                ),
        )
        .subcommand(
            Command::new("export-plot")
                .about("Write level-unit panel data with an outlier flag, for plotting")
                .arg(
                    Arg::new("out")
                        .long("out")
                        .required(true)
                        .value_name("FILE")
                        .value_parser(clap::value_parser!(PathBuf)),
                ),
        )
        .subcommand(
            Command::new("replicate")
                .about("Run all models (or the subset named by --dependent/--model) and compare with reference values")
                .arg(
                    Arg::new("out")
                        .long("out")
                        .value_name("DIR")
                        .value_parser(clap::value_parser!(PathBuf))
                        .help("write replication.json and replication.txt here instead of stdout"),
                ),
        )
        .subcommand(
            Command::new("simulate")
                .about("Monte Carlo rejection rates and estimate distributions")
                .arg(
                    Arg::new("dgp")
                        .long("dgp")
                        .required(true)
                        .value_name("SPEC")
                        .help("white_noise | random_walk | ar1(rho) | cointegrated_pair(theta,speed) | coefficient_break(size) | quadratic(gamma) | garch(omega,alpha,beta)"),
                )
                .arg(
                    Arg::new("nobs")
                        .long("nobs")
                        .value_name("T")
                        .default_value("200")
                        .value_parser(clap::value_parser!(usize)),
                ),
        )
}

struct Resolved {
    cfg: RunConfig,
    /// Keys set by the file or a flag, in canonical form.
    explicit: Vec<String>,
}

fn canonical(key: &str) -> &str {
    match key {
        "model" | "variant" => "covid_scope",
        other => other,
    }
}

fn resolve(m: &ArgMatches, skip: &[&str]) -> Result<Resolved, Failure> {
    let mut cfg = RunConfig::default();
    let mut explicit = Vec::new();
    if let Some(path) = m.get_one::<PathBuf>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| ardl_core::Error::Io {
            path: path.clone(),
            source: e,
        })?;
        cfg.apply_text(&text)?;
        explicit.extend(ingest::parse_key_values(&text)?.iter().map(|(k, _)| canonical(k).to_string()));
    }
    for (key, _) in all_keys() {
        if skip.contains(key) {
            continue;
        }
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v)?;
            explicit.push(key.to_string());
        }
    }
    Ok(Resolved { cfg, explicit })
}

fn emit(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| usage(format!("writing stdout: {e}")))
}

fn emit_json(value: &impl serde::Serialize) -> Outcome {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| usage(format!("serializing output: {e}")))?;
    s.push('\n');
    emit(&s)
}

fn no_csv(command: &str) -> Failure {
    usage(format!("csv output is not available for `{command}`"))
}

fn model_id(cfg: &RunConfig) -> ModelId {
    ModelId {
        dependent: cfg.panel.dependent,
        scope: cfg.panel.covid_scope,
    }
}

fn panel(cfg: &RunConfig) -> ardl_core::Result<Dataset> {
    ingest::build_dataset(&cfg.panel, &cfg.panel.sources())
}

fn panel_csv(ds: &Dataset) -> String {
    let mut s = String::from("date");
    for c in ds.columns() {
        let _ = write!(s, ",{}", c.name);
    }
    s.push('\n');
    for (i, d) in ds.calendar().iter().enumerate() {
        let _ = write!(s, "{d}");
        for c in ds.columns() {
            let _ = write!(s, ",{}", c.values[i]);
        }
        s.push('\n');
    }
    s
}

fn cmd_ingest(cfg: &RunConfig) -> Outcome {
    let ds = panel(cfg)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&ds),
        OutputFormat::Csv => emit(&panel_csv(&ds)),
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = write!(s, "{:<12}", "date");
            for c in ds.columns() {
                let _ = write!(s, "{:>20}", c.name);
            }
            s.push('\n');
            for (i, d) in ds.calendar().iter().enumerate() {
                let _ = write!(s, "{:<12}", d.to_string());
                for c in ds.columns() {
                    let _ = write!(s, "{:>20.6}", c.values[i]);
                }
                s.push('\n');
            }
            emit(&s)
        }
    }
}

fn cmd_summary(cfg: &RunConfig) -> Outcome {
    let ds = panel(cfg)?;
    let rows = replicate::level_summary(&ds)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&json!({ "rows": ds.len(), "variables": rows })),
        OutputFormat::Csv => {
            let mut s = String::from("variable,name,n,min,max,mean,std\n");
            for r in &rows {
                let c = &r.stats;
                let _ = writeln!(s, "{},{},{},{},{},{},{}", r.variable, c.name, c.n, c.min, c.max, c.mean, c.std);
            }
            emit(&s)
        }
        OutputFormat::Text => {
            let mut s = format!("{:<8}{:>10}{:>6}{:>14}{:>14}{:>14}{:>14}\n", "", "name", "n", "min", "max", "mean", "std");
            for r in &rows {
                let c = &r.stats;
                let _ = writeln!(
                    s,
                    "{:<8}{:>10}{:>6}{:>14.3}{:>14.3}{:>14.3}{:>14.3}",
                    r.variable, c.name, c.n, c.min, c.max, c.mean, c.std
                );
            }
            emit(&s)
        }
    }
}

fn cmd_unit_root(cfg: &RunConfig, var: &str) -> Outcome {
    let ds = panel(cfg)?;
    let idx = ROLES
        .iter()
        .position(|r| *r == var)
        .filter(|_| ds.columns().len() == ROLES.len())
        .or_else(|| ds.columns().iter().position(|c| c.name == var || ingest::base_name(c) == var))
        .ok_or_else(|| {
            let names: Vec<&str> = ds.columns().iter().map(|c| c.name.as_str()).collect();
            ardl_core::Error::Config(format!(
                "unknown variable `{var}`; expected one of {} or {}",
                ROLES.join(", "),
                names.join(", ")
            ))
        })?;
    let column = &ds.columns()[idx];
    let series = ds.series(&column.name).expect("column exists");
    let cell = replicate::unit_root_cell(&series, &cfg.unit_root)?;
    let variable = if ds.columns().len() == ROLES.len() { ROLES[idx] } else { column.name.as_str() };
    match cfg.format {
        OutputFormat::Json => emit_json(&json!({
            "variable": variable,
            "column": column.name,
            "level": cell.level,
            "first_difference": cell.first_difference,
            "order": cell.order,
        })),
        OutputFormat::Csv => Err(no_csv("unit-root")),
        OutputFormat::Text => {
            let mut s = format!("{variable} ({})\n", column.name);
            for (label, r) in [("level", &cell.level), ("first difference", &cell.first_difference)] {
                let _ = writeln!(
                    s,
                    "  {label:<18} {:?}({}) {:>9.3}{:<3}  lag {}  n {}  cv 1/5/10% {:.3} {:.3} {:.3}",
                    r.test,
                    r.deterministic.code(),
                    r.statistic,
                    r.stars(),
                    r.lag,
                    r.nobs,
                    r.critical_values.one,
                    r.critical_values.five,
                    r.critical_values.ten
                );
            }
            let _ = writeln!(s, "  order {:?}", cell.order);
            emit(&s)
        }
    }
}

fn cmd_bounds(cfg: &RunConfig) -> Outcome {
    let id = model_id(cfg);
    let (bounds, conclusion, orders) = replicate::bounds_only(cfg, id)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&json!({
            "model": id.key(),
            "orders": orders,
            "bounds": bounds,
            "graded_conclusion": conclusion,
        })),
        OutputFormat::Csv => Err(no_csv("bounds")),
        OutputFormat::Text => emit(&format!(
            "{} orders {:?}  F {:.3}  bounds at {}% [{:.2}, {:.2}]  {}\n",
            id.key(),
            orders,
            bounds.f_statistic,
            bounds.level * 100.0,
            bounds.lower_bound,
            bounds.upper_bound,
            conclusion
        )),
    }
}

fn estimate(cfg: &RunConfig) -> Result<(ModelEstimate, ArdlFit), Failure> {
    let ds = panel(cfg)?;
    Ok(replicate::estimate_on(&ds, cfg, &model_id(cfg).key())?)
}

fn cmd_fit(cfg: &RunConfig) -> Outcome {
    let (m, _) = estimate(cfg)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&m),
        OutputFormat::Csv => Err(no_csv("fit")),
        OutputFormat::Text => emit(&replicate::render_model(&m, &replicate::compare_model(&m))),
    }
}

fn cusum_csv(report: &DiagnosticsReport, fit: &ArdlFit) -> Result<String, Failure> {
    let c = match &report.cusum {
        Checked::Ok(c) => c,
        Checked::Unavailable(why) => {
            return Err(Failure::Core(ardl_core::Error::Data(format!("CUSUM unavailable: {why}"))))
        }
    };
    let calendar = fit.dataset.calendar();
    let mut s = String::from("index,date,cusum,lower,upper\n");
    for (i, (p, b)) in c.path.iter().zip(&c.bounds).enumerate() {
        let obs = c.first_index + i;
        let date = calendar[fit.rows[obs]];
        let _ = writeln!(s, "{obs},{date},{p},{},{b}", -b);
    }
    Ok(s)
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| {
        Failure::Core(ardl_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

fn unavailable<T>(c: &Checked<T>) -> Option<&String> {
    match c {
        Checked::Unavailable(w) => Some(w),
        Checked::Ok(_) => None,
    }
}

fn cmd_diagnose(cfg: &RunConfig, csv_out: Option<&PathBuf>) -> Outcome {
    let (m, fit) = estimate(cfg)?;
    let d = &m.diagnostics;
    if let Some(path) = csv_out {
        write_file(path, &cusum_csv(d, &fit)?)?;
    }
    match cfg.format {
        OutputFormat::Json => emit_json(d),
        OutputFormat::Csv => emit(&cusum_csv(d, &fit)?),
        OutputFormat::Text => {
            let mut s = format!("{} ({} obs)\n", m.model, m.nobs);
            let line = |s: &mut String, name: &str, stat: Option<(f64, f64, bool)>, why: Option<&String>| {
                let _ = match (stat, why) {
                    (Some((x, p, r)), _) => writeln!(s, "  {name:<20} {x:>10.3}  p {p:.3}  {}", if r { "reject" } else { "accept" }),
                    (None, Some(w)) => writeln!(s, "  {name:<20} unavailable: {w}"),
                    _ => Ok(()),
                };
            };
            line(
                &mut s,
                "Breusch-Godfrey",
                d.serial_correlation.ok().map(|t| (t.statistic, t.p_value, t.reject)),
                unavailable(&d.serial_correlation),
            );
            line(&mut s, "ARCH LM", d.arch.ok().map(|t| (t.statistic, t.p_value, t.reject)), unavailable(&d.arch));
            line(
                &mut s,
                "Jarque-Bera",
                d.normality.ok().map(|n| (n.test.statistic, n.test.p_value, n.test.reject)),
                unavailable(&d.normality),
            );
            line(
                &mut s,
                "RESET",
                d.reset.ok().map(|r| (r.test.statistic, r.test.p_value, r.test.reject)),
                unavailable(&d.reset),
            );
            match &d.cusum {
                Checked::Ok(c) => {
                    let _ = writeln!(s, "  {:<20} {}", "CUSUM", if c.stable { "inside 5% bounds" } else { "crosses 5% bounds" });
                }
                Checked::Unavailable(w) => {
                    let _ = writeln!(s, "  {:<20} unavailable: {w}", "CUSUM");
                }
            }
            emit(&s)
        }
    }
}

fn cmd_export_plot(cfg: &RunConfig, out: &Path) -> Outcome {
    let ds = panel(cfg)?;
    ingest::export_plot_data(&ds, out)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&json!({ "path": out, "rows": ds.len() })),
        _ => emit(&format!("wrote {} rows to {}\n", ds.len(), out.display())),
    }
}

fn selected_models(r: &Resolved) -> Vec<ModelId> {
    let dep = r.explicit.iter().any(|k| k == "dependent");
    let scope = r.explicit.iter().any(|k| k == "covid_scope");
    let deps: Vec<OilBenchmark> = if dep { vec![r.cfg.panel.dependent] } else { OilBenchmark::ALL.to_vec() };
    let scopes: Vec<CovidScope> = if scope { vec![r.cfg.panel.covid_scope] } else { CovidScope::ALL.to_vec() };
    if !dep && !scope {
        return Vec::new();
    }
    deps.iter()
        .flat_map(|&dependent| scopes.iter().map(move |&scope| ModelId { dependent, scope }))
        .collect()
}

fn cmd_replicate(r: &Resolved, out: Option<&PathBuf>) -> Outcome {
    let rep = replicate::run(&r.cfg, &selected_models(r))?;
    if let Some(dir) = out {
        replicate::write_bundle(&rep, dir)?;
        return match r.cfg.format {
            OutputFormat::Json => emit_json(&json!({
                "out": dir,
                "files": [replicate::JSON_FILE, replicate::TEXT_FILE],
                "models": rep.models.len(),
                "compared": rep.compared,
                "matched": rep.matched,
            })),
            _ => emit(&format!(
                "wrote {} and {} to {} ({} of {} reference cells match)\n",
                replicate::JSON_FILE,
                replicate::TEXT_FILE,
                dir.display(),
                rep.matched,
                rep.compared
            )),
        };
    }
    match r.cfg.format {
        OutputFormat::Json => emit(&replicate::to_json(&rep)?),
        OutputFormat::Text => emit(&replicate::render_text(&rep)),
        OutputFormat::Csv => {
            let mut w = csv_line(&["section", "model", "item", "ours", "reference", "rule", "matched"]);
            for c in &rep.comparisons {
                w.push_str(&csv_line(&[
                    &c.section,
                    &c.model,
                    &c.item,
                    &c.ours,
                    &c.reference,
                    &c.rule,
                    if c.matched { "true" } else { "false" },
                ]));
            }
            emit(&w)
        }
    }
}

fn csv_line(fields: &[&str]) -> String {
    let mut s = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    s
}

fn cmd_simulate(r: &Resolved, m: &ArgMatches) -> Outcome {
    let cfg = &r.cfg;
    let dgp: Dgp = m.get_one::<String>("dgp").expect("required").parse()?;
    let test: McTest = m
        .get_one::<String>("unit_root_test")
        .map(String::as_str)
        .unwrap_or("pp")
        .parse()?;
    let nobs = *m.get_one::<usize>("nobs").expect("defaulted");
    let mut exp = Experiment::new(dgp, test, nobs, cfg.replications, cfg.seed);
    exp.deterministic = cfg.unit_root.deterministic;
    exp.max_lag = cfg.panel.max_lag;
    exp.lags = cfg.diagnostics.bg_lags;
    exp.threads = cfg.threads;
    if r.explicit.iter().any(|k| k == "table") {
        exp.table = cfg.table;
    }
    let summary = simulate::run(&exp)?;
    match cfg.format {
        OutputFormat::Json => emit_json(&summary),
        OutputFormat::Csv => Err(no_csv("simulate")),
        OutputFormat::Text => {
            let mut s = format!(
                "{} / {:?}, T={}, {} replications, seed {}\n  rejection rate {:.4} ({} rejections, {} failed)\n",
                exp.dgp, exp.test, exp.nobs, exp.replications, exp.seed, summary.rejection_rate, summary.rejections, summary.failures
            );
            for (label, d) in [("statistic", &summary.statistic), ("estimate", &summary.estimate)] {
                if let Some(d) = d {
                    let _ = writeln!(
                        s,
                        "  {label:<10} mean {:.4}  sd {:.4}  q05 {:.4}  q50 {:.4}  q95 {:.4}",
                        d.mean, d.sd, d.q05, d.q50, d.q95
                    );
                }
            }
            emit(&s)
        }
    }
}

fn dispatch(matches: &ArgMatches) -> Outcome {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    // `--test` names a Monte Carlo test under `simulate`, not a unit-root test
    let skip: &[&str] = if name == "simulate" { &["unit_root_test"] } else { &[] };
    let resolved = resolve(sub, skip)?;
    let cfg = &resolved.cfg;
    match name {
        "ingest" => cmd_ingest(cfg),
        "summary" => cmd_summary(cfg),
        "unit-root" => cmd_unit_root(cfg, sub.get_one::<String>("var").expect("required")),
        "bounds" => cmd_bounds(cfg),
        "fit" => cmd_fit(cfg),
        "diagnose" => cmd_diagnose(cfg, sub.get_one::<PathBuf>("cusum-csv")),
        "export-plot" => cmd_export_plot(cfg, sub.get_one::<PathBuf>("out").expect("required")),
        "replicate" => cmd_replicate(&resolved, sub.get_one::<PathBuf>("out")),
        "simulate" => cmd_simulate(&resolved, sub),
        other => Err(usage(format!("unknown subcommand `{other}`"))),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                };
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {}", one_line(first));
            return ExitCode::from(2);
        }
    };
    match dispatch(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error[{}]: {}", e.category(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error[usage]: {}", one_line(&msg));
            ExitCode::from(2)
        }
    }
}
