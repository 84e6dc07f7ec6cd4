//! Shared plumbing for the binary-driving test suites: locating the
//! executable and the repo configs, running commands, and the golden file
//! comparison with its UPDATE_GOLDEN=1 regeneration hook.

// Each test target compiles this module separately and none of them uses
// every helper.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_collapse-sim")
}

/// Repo-level config shared with the README examples.
pub fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn run_ok(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let out = run(args, envs);
    assert!(
        out.status.success(),
        "command {:?} failed with {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn read_out(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name))
        .unwrap_or_else(|e| panic!("missing output file {name}: {e}"))
}

fn first_diff_line(expected: &[u8], actual: &[u8]) -> usize {
    let mut line = 1;
    for (a, b) in expected.iter().zip(actual.iter()) {
        if a != b {
            return line;
        }
        if *a == b'\n' {
            line += 1;
        }
    }
    line
}

/// Byte-compares `actual` against tests/golden/<name>. Set UPDATE_GOLDEN=1
/// to rewrite the stored files instead.
pub fn golden_check(name: &str, actual: &[u8]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| {
        panic!(
            "cannot read golden file {} ({e}); run with UPDATE_GOLDEN=1 to create it",
            path.display()
        )
    });
    assert!(
        expected == actual,
        "output differs from golden file {} starting at line {} \
         (lengths {} vs {}); rerun with UPDATE_GOLDEN=1 after verifying the change",
        path.display(),
        first_diff_line(&expected, actual),
        expected.len(),
        actual.len()
    );
}

/// Parses one CSV produced by the binary into header + string rows. The
/// files are plain enough that a field-splitting reader keeps the tests
/// free of extra dependencies.
pub fn parse_csv(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let text = String::from_utf8(bytes.to_vec()).expect("csv is utf-8");
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("csv has a header")
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    (header, rows)
}

/// Column accessor by header name.
pub fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing from {header:?}"))
}
