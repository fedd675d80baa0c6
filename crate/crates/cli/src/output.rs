//! Artifact writers. Every file lands via a temporary sibling and a rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kgmod::spectral::io::write_binary;
use kgmod::spectral::Field;
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::Scenario;

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

/// Collects written files relative to one output directory.
pub struct Artifacts {
    root: PathBuf,
    scenario: Scenario,
    written: Vec<PathBuf>,
    fields: Vec<Value>,
    notes: Vec<String>,
}

/// Files written by one command plus human-readable summary lines.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl Artifacts {
    pub fn new(root: &Path, scenario: &Scenario) -> Self {
        Self {
            root: root.to_path_buf(),
            scenario: scenario.clone(),
            written: Vec::new(),
            fields: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }

    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    /// `{"parameters": …, …body}`.
    pub fn json<T: Serialize>(&mut self, rel: &str, body: &T) -> Result<()> {
        let mut obj = serde_json::Map::new();
        obj.insert("parameters".into(), serde_json::to_value(&self.scenario)?);
        match serde_json::to_value(body)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))?;
        text.push('\n');
        self.put(rel, text.as_bytes())
    }

    /// A CSV file with `# key = value` parameter lines, a header row and
    /// one row per record.
    pub fn csv(&mut self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        let mut out = String::new();
        for (k, v) in self.scenario.entries() {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        self.put(rel, out.as_bytes())
    }

    /// Raw field under `fields/`, listed in the manifest.
    pub fn field(&mut self, name: &str, f: &Field) -> Result<()> {
        let mut buf = Vec::new();
        write_binary(f, &mut buf)?;
        let rel = format!("fields/{name}.bin");
        self.put(&rel, &buf)?;
        let g = f.grid();
        self.fields.push(json!({
            "file": rel,
            "d": g.dim(),
            "n": g.n(),
            "P": g.period_scale(),
            "real": f.is_real(),
        }));
        Ok(())
    }

    /// Writes `fields/manifest.json` if any fields were written.
    pub fn finish(mut self) -> Result<RunOutput> {
        if !self.fields.is_empty() {
            let fields = std::mem::take(&mut self.fields);
            self.json(
                "fields/manifest.json",
                &json!({ "format": "header d, n, P as u64 LE; then re, im as f64 LE per point", "fields": fields }),
            )?;
        }
        Ok(RunOutput { files: self.written, notes: self.notes })
    }
}
