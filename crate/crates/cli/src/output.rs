//! CSV tables, the run manifest and the hash-addressed cache.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stablewalk::asymptotics::VerificationReport;
use stablewalk::{Error, Result};
use std::path::{Path, PathBuf};

/// Version of every CSV layout written here; bump on any column change.
pub const SCHEMA_VERSION: u32 = 1;
/// Overrides the cache location (the only environment setting).
pub const CACHE_ENV: &str = "STABLEWALK_CACHE";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Seventeen significant digits: enough to round-trip every `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

/// CSV writer that always leads with the schema version column.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        let mut header = vec!["schema_version".to_string()];
        header.extend(columns.iter().map(|c| c.to_string()));
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len() + 1, self.header.len());
        let mut row = vec![SCHEMA_VERSION.to_string()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Rows of every series, tagged with their source.
pub fn report_table(report: &VerificationReport, source: &str) -> Table {
    let mut t = Table::new(&[
        "source", "theorem_id", "law", "series", "checked", "n", "x", "y", "exact", "rhs", "ratio", "regime",
    ]);
    for s in &report.series {
        for r in &s.rows {
            t.push(vec![
                source.to_string(),
                report.theorem_id.clone(),
                report.law.clone(),
                s.label.clone(),
                s.trend.is_some().to_string(),
                r.n.to_string(),
                r.x.to_string(),
                r.y.map_or(String::new(), |y| y.to_string()),
                num(r.exact),
                num(r.rhs),
                num(r.ratio),
                r.regime.clone(),
            ]);
        }
    }
    t
}

/// Hash of the `(n, x, y)` grid of a report.
pub fn grid_hash(report: &VerificationReport) -> String {
    let mut h = Sha256::new();
    for s in &report.series {
        h.update(s.label.as_bytes());
        for r in &s.rows {
            h.update(format!("{}:{}:{:?};", r.n, r.x, r.y).as_bytes());
        }
    }
    format!("{:x}", h.finalize())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportSummary {
    pub theorem_id: String,
    pub law: String,
    pub passed: bool,
    pub final_deviation: f64,
    pub grid_hash: String,
    pub failed: Vec<String>,
}

impl ReportSummary {
    pub fn of(report: &VerificationReport) -> Self {
        let mut failed: Vec<String> = report
            .series
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.label.clone())
            .collect();
        failed.extend(report.checks.iter().filter(|c| !c.passed).map(|c| c.label.clone()));
        ReportSummary {
            theorem_id: report.theorem_id.clone(),
            law: report.law.clone(),
            passed: report.passed(),
            final_deviation: report.final_deviation(),
            grid_hash: grid_hash(report),
            failed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_path: Option<String>,
    pub law_hash: Option<String>,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub outputs: Vec<OutputFile>,
    pub wall_clock_seconds: f64,
}

/// Single writer for one run's output directory.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.written.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = self.written;
        let path = self.root.join("manifest.json");
        let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))
    }
}

/// Content-addressed store of serialised results.
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    /// `$STABLEWALK_CACHE` if set, otherwise `<out>/cache`.
    pub fn locate(out: &Path) -> Self {
        let root = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| out.join("cache"));
        Cache { root }
    }

    /// Key for a request described by any serialisable value.
    pub fn key<T: Serialize>(kind: &str, request: &T) -> String {
        let body = serde_json::to_string(request).expect("request serialises");
        sha256_hex(format!("{kind}\n{}\n{body}", env!("CARGO_PKG_VERSION")).as_bytes())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.root.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Option<T> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let path = self.path(key);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let bytes = serde_json::to_vec(value).map_err(|e| Error::Config(e.to_string()))?;
        // write-then-rename so a reader never sees a partial entry
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, -7.25e12] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_leads_with_the_schema_version() {
        let mut t = Table::new(&["x", "value"]);
        t.push(vec!["1".into(), num(0.5)]);
        let text = String::from_utf8(t.to_bytes()).unwrap();
        assert!(text.starts_with("schema_version,x,value\n1,1,"));
    }
}
