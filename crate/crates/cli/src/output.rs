//! Run manifests and all-or-nothing output writing.

use std::io::Write;
use std::path::{Path, PathBuf};

use bubbletest::fmt::sha256_hex;
use bubbletest::{NullSpec, TestConfig};
use serde::Serialize;
use serde_json::json;
use tempfile::NamedTempFile;

use crate::error::CliError;

/// Everything needed to rerun a command. Timestamps are kept out of it so
/// equal runs produce equal result files; they go to a `.run.json` log.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Arguments after the program name, without `--threads`.
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_config: Option<TestConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null: Option<NullSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new() -> Self {
        RunManifest {
            tool: "bubbletest",
            version: env!("CARGO_PKG_VERSION"),
            command: result_args(std::env::args().skip(1)),
            input: None,
            test_config: None,
            null: None,
            replications: None,
            seed: None,
        }
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        self.input = Some(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(self)
    }
}

/// Command-line arguments minus `--threads`, which never changes results.
fn result_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_value = false;
    for a in args {
        if std::mem::take(&mut skip_value) {
            continue;
        }
        if a == "--threads" {
            skip_value = true;
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}

/// Files to write together. Nothing lands at a target path until every file
/// has been written to a temporary sibling.
#[derive(Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.push((path.into(), bytes.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, path: impl Into<PathBuf>, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(path, text);
        Ok(())
    }

    /// Adds a `<name>.run.json` log with wall-clock times next to `result`.
    pub fn add_run_log(&mut self, result: &Path, started: chrono::DateTime<chrono::Utc>) -> Result<(), CliError> {
        let payload = self
            .files
            .iter()
            .find(|(p, _)| p == result)
            .map(|(_, b)| sha256_hex(b))
            .unwrap_or_default();
        let log = json!({
            "result": result.file_name().map(|n| n.to_string_lossy().into_owned()),
            "result_sha256": payload,
            "started_at": started.to_rfc3339(),
            "finished_at": chrono::Utc::now().to_rfc3339(),
        });
        let mut name = result.file_stem().unwrap_or_default().to_os_string();
        name.push(".run.json");
        self.add_json(result.with_file_name(name), &log)
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut temps = Vec::with_capacity(self.files.len());
        for (path, bytes) in &self.files {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::io(path, e))?;
            tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
            temps.push((tmp, path.clone()));
        }
        let mut written = Vec::with_capacity(temps.len());
        for (tmp, path) in temps {
            tmp.persist(&path).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
