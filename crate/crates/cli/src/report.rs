use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    /// Human-readable pass condition, e.g. `<= 1e-10`.
    pub criterion: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub manifest: PathBuf,
    pub status: Status,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub results: serde_json::Value,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, manifest: &Path) -> Self {
        Self {
            command,
            seed,
            manifest: manifest.to_path_buf(),
            status: Status::Pass,
            checks: Vec::new(),
            artifacts: Vec::new(),
            results: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        ok: bool,
        value: f64,
        criterion: impl Into<String>,
    ) {
        let status = if ok { Status::Pass } else { Status::Fail };
        if !ok {
            self.status = Status::Fail;
        }
        self.checks.push(Check {
            name: name.into(),
            status,
            value,
            criterion: criterion.into(),
        });
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        if let serde_json::Value::Object(m) = &mut self.results {
            m.insert(key.to_string(), v);
        }
    }

    pub fn artifact(&mut self, out: &Path, file: &Path) {
        let rel = file.strip_prefix(out).unwrap_or(file);
        self.artifacts.push(rel.display().to_string());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
