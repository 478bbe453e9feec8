//! Run reports and their on-disk form.

use crate::config::RunConfig;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const SUMMARY_FILE: &str = "summary.json";

/// Code version stamped into every summary.
pub fn version_stamp() -> String {
    format!(
        "edge-spectral-lab {} (esl-core {})",
        env!("CARGO_PKG_VERSION"),
        esl_core::VERSION
    )
}

/// A CSV table and the file it is written to.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub csv: String,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &str) -> Self {
        Self {
            file: file.into(),
            csv: format!("{header}\n"),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let cells: Vec<String> = cells.into_iter().map(|c| c.as_ref().to_string()).collect();
        self.csv.push_str(&cells.join(","));
        self.csv.push('\n');
    }

    pub fn rows(&self) -> usize {
        self.csv.lines().count().saturating_sub(1)
    }
}

/// A property check; warning-only checks never fail a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub warning_only: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            warning_only: false,
            detail: detail.into(),
        }
    }

    pub fn warning(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            warning_only: true,
            ..Self::new(name, passed, detail)
        }
    }

    pub fn fails_run(&self) -> bool {
        !self.passed && !self.warning_only
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Convergence and discretization metadata, keyed for the summary.
    pub metadata: BTreeMap<String, Value>,
    /// Kept out of the files so that reruns are byte-identical.
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            tables: Vec::new(),
            checks: Vec::new(),
            metadata: BTreeMap::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::fails_run)
    }

    pub fn summary(&self) -> Value {
        serde_json::json!({
            "version": version_stamp(),
            "scenario": self.config.scenario,
            "config": self.config.echo(),
            "tables": self.tables.iter().map(|t| &t.file).collect::<Vec<_>>(),
            "checks": self.checks,
            "passed": self.all_passed(),
            "metadata": self.metadata,
        })
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes every table and the JSON summary; returns the paths written.
pub fn emit_report(rep: &RunReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(rep.tables.len() + 1);
    for t in &rep.tables {
        let path = dir.join(&t.file);
        write_atomic(&path, t.csv.as_bytes())?;
        written.push(path);
    }
    let mut json = serde_json::to_string_pretty(&rep.summary()).map_err(std::io::Error::other)?;
    json.push('\n');
    let path = dir.join(SUMMARY_FILE);
    write_atomic(&path, json.as_bytes())?;
    written.push(path);
    Ok(written)
}
