//! CSV and JSON artifacts. Every artifact starts with the run manifest so the
//! seed and parameters travel with the results.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub sssi: Option<bool>,
    pub params: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        Manifest {
            tool: format!("rcbbo {}", env!("CARGO_PKG_VERSION")),
            subcommand: subcommand.to_string(),
            seed: None,
            sssi: None,
            params: BTreeMap::new(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    fn comment_lines(&self) -> String {
        let mut s = format!("# {} {}\n", self.tool, self.subcommand);
        if let Some(seed) = self.seed {
            s.push_str(&format!("# seed={seed}\n"));
        }
        if let Some(sssi) = self.sssi {
            s.push_str(&format!("# sssi={}\n", if sssi { "on" } else { "off" }));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("# {k}={v}\n"));
        }
        for (k, v) in &self.inputs {
            s.push_str(&format!("# input.{k}={v}\n"));
        }
        s
    }
}

pub fn num(v: f64) -> String {
    // adding +0 turns -0 into 0
    format!("{}", v + 0.0)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::config(format!("cannot write {}: {e}", path.display()))
}

/// Writes `# key=value` manifest lines followed by a plain CSV table.
pub fn write_csv(path: &Path, manifest: &Manifest, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    let body = w.into_inner().map_err(|e| io_err(path, e))?;
    let mut out = manifest.comment_lines().into_bytes();
    out.extend(body);
    fs::write(path, out).map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    manifest: &'a Manifest,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes `{"manifest": ..., <fields of body>}` as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, manifest: &Manifest, body: &T) -> Result<(), CliError> {
    let doc = Document { manifest, body };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}
