mod common;

use std::process::Command;

use common::{ardl, data_dir, stderr, stdout};

fn category(out: &std::process::Output) -> String {
    assert!(!out.status.success());
    let err = stderr(out);
    assert_eq!(err.trim_end().lines().count(), 1, "one-line error, got {err:?}");
    let rest = err.strip_prefix("error[").unwrap_or_else(|| panic!("unexpected stderr {err:?}"));
    rest[..rest.find(']').unwrap()].to_string()
}

#[test]
fn help_lists_every_key() {
    let out = Command::new(env!("CARGO_BIN_EXE_ardl")).arg("--help").output().unwrap();
    let text = stdout(&out);
    for (key, _) in ardl_core::config::all_keys() {
        assert!(text.contains(&format!("--{}", key.replace('_', "-"))), "--help lacks {key}");
    }
    assert!(text.contains("--config"));
}

#[test]
fn errors_are_categorised() {
    assert_eq!(category(&ardl(&["frobnicate"])), "usage");
    assert_eq!(category(&ardl(&["bounds", "--level", "2"])), "config");
    assert_eq!(category(&ardl(&["simulate", "--dgp", "brownian_bridge"])), "unknown_dgp");
    assert_eq!(category(&ardl(&["unit-root", "--var", "gold"])), "config");
    assert_eq!(category(&ardl(&["bounds", "--format", "csv"])), "usage");
    assert_eq!(category(&ardl(&["simulate", "--dgp", "white_noise", "--replications", "0"])), "config");

    let out = Command::new(env!("CARGO_BIN_EXE_ardl"))
        .args(["replicate", "--data-dir", "/nonexistent/snapshots"])
        .output()
        .unwrap();
    assert_eq!(category(&out), "missing_file");
    let err = stderr(&out);
    assert!(err.contains("eia_oil.csv") && err.contains("https://"), "{err}");
}

#[test]
fn config_file_then_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("# brent china\ndependent = brent\nmodel = china\ndata_dir = {}\n", data_dir().display()),
    )
    .unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["bounds", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_ardl")).args(&args).output().unwrap();
        serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap()
    };
    assert_eq!(run(&[])["model"], "brent_china");
    assert_eq!(run(&["--variant", "outside"])["model"], "brent_outside_china");

    std::fs::write(&cfg, "colour = red\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ardl"))
        .args(["bounds", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(category(&out), "config");
}

#[test]
fn text_and_csv_renderings() {
    let fit = stdout(&ardl(&["fit", "--format", "text"]));
    for block in ["Long-run equation", "Short-run equation", "Tests", "ECT_{t-1}"] {
        assert!(fit.contains(block), "{block}");
    }
    let panel = stdout(&ardl(&["ingest", "--format", "csv"]));
    let mut lines = panel.lines();
    assert_eq!(lines.next().unwrap(), "date,wti_log,covid_total_log1p,vix_log,epu_log");
    assert_eq!(lines.count(), 34);
    let summary = stdout(&ardl(&["summary", "--format", "csv"]));
    assert!(summary.starts_with("variable,name,n,min,max,mean,std\noil,wti,34,"));
}

#[test]
fn diagnose_writes_cusum_csv_when_available() {
    // the bundled panel is too short for CUSUM on the chosen orders, so use a
    // small max lag, which leaves enough observations
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cusum.csv");
    let out = ardl(&["diagnose", "--max-lag", "1", "--cusum-csv", path.to_str().unwrap()]);
    stdout(&out);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "index,date,cusum,lower,upper");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            vec![f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap()]
        })
        .collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r[1], -r[2]);
        assert!(r[2] > 0.0);
    }
}

#[test]
fn export_plot_round_trips_levels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.csv");
    stdout(&ardl(&["export-plot", "--out", path.to_str().unwrap(), "--format", "text"]));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("date,wti,covid_total,vix,epu,outlier\n"));
    let ds = ardl_core::ingest::import_plot_data(&path).unwrap();
    assert_eq!(ds.len(), 34);
}

#[test]
fn replicate_subset_and_stdout() {
    let one: serde_json::Value =
        serde_json::from_str(&stdout(&ardl(&["replicate", "--dependent", "wti", "--variant", "total"]))).unwrap();
    assert_eq!(one["models"].as_array().unwrap().len(), 1);
    assert_eq!(one["models"][0]["model"], "wti_total");
    let brent: serde_json::Value = serde_json::from_str(&stdout(&ardl(&["replicate", "--dependent", "brent"]))).unwrap();
    assert_eq!(brent["models"].as_array().unwrap().len(), 3);
}
