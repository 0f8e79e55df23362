//! Corpus directories on disk and a runner for the built binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::json;

#[path = "../../../core/tests/support/mod.rs"]
pub mod support;

pub use support::fixtures::*;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `inferxpath` binary with `args` in `dir`.
pub fn run(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_inferxpath"))
        .args(args)
        .current_dir(dir)
        .env_remove("INFERXPATH_MANIFEST")
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exited"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Writes `pages` as `<n>.<ext>` files plus `manifest.json` listing them.
/// `seeds` of `None` makes every page a seed. The `xhtml` extension selects
/// the as-written reader, `html` the HTML5 one.
pub fn write_corpus(dir: &Path, ext: &str, pages: &[(&str, &str)], seeds: Option<&[&str]>) -> PathBuf {
    let mut entries = Vec::new();
    for (i, (url, src)) in pages.iter().enumerate() {
        let file = format!("{i}.{ext}");
        std::fs::write(dir.join(&file), src).unwrap();
        entries.push(json!({ "url": url, "file": file }));
    }
    let mut manifest = json!({ "pages": entries });
    if let Some(seeds) = seeds {
        manifest["seeds"] = json!(seeds);
    }
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&manifest).unwrap()).unwrap();
    path
}

pub fn fixture1_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), "xhtml", &[(FIXTURE1_URL, FIXTURE1)], None);
    dir
}

/// Page a is the only seed; b is listed but reachable only through a's link.
pub fn fixture2_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), "xhtml", &[(FIXTURE2_A_URL, FIXTURE2_A), (FIXTURE2_B_URL, FIXTURE2_B)], Some(&[FIXTURE2_A_URL]));
    dir
}

/// Parses JSON lines.
pub fn lines(s: &str) -> Vec<serde_json::Value> {
    s.lines().map(|l| serde_json::from_str(l).expect("each line is JSON")).collect()
}
