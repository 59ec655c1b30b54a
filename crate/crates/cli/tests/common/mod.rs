#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data_dir() -> PathBuf {
    workspace().join("data")
}

/// Run the binary with `--data-dir` pointing at the bundled snapshots.
pub fn ardl(args: &[&str]) -> Output {
    let data = data_dir();
    Command::new(env!("CARGO_BIN_EXE_ardl"))
        .args(args)
        .arg("--data-dir")
        .arg(&data)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}
