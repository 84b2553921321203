//! Result tables and their CSV form.
//!
//! Layout, one file per table:
//!
//! ```text
//! # artifact_version=1
//! # experiment=<name>
//! # table=<name>
//! # seed=<u64>
//! # scenario_hash=<sha256 hex of the config line>
//! # config=<canonical config JSON>
//! col_a,col_b,...
//! 1.5,-3,...
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting; lines end in `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::{parse_config, ExperimentConfig};
use crate::HarnessError;

pub const ARTIFACT_VERSION: u32 = 1;

/// dB value written for an exact zero.
pub const DB_FLOOR: f64 = -300.0;

pub fn to_db(power: f64) -> f64 {
    if power > 0.0 {
        (10.0 * power.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub artifact_version: u32,
    pub experiment: String,
    pub table: String,
    pub seed: u64,
    pub scenario_hash: String,
    pub config: String,
}

impl Metadata {
    pub fn new(cfg: &ExperimentConfig, table: &str) -> Self {
        let config = cfg.canonical_json();
        Self {
            artifact_version: ARTIFACT_VERSION,
            experiment: cfg.experiment.name().to_string(),
            table: table.to_string(),
            seed: cfg.seed,
            scenario_hash: sha256_hex(&config),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn new(columns: Vec<String>, metadata: Metadata) -> Self {
        Self { columns, rows: Vec::new(), metadata }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn name(&self) -> &str {
        &self.metadata.table
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# artifact_version={}", m.artifact_version);
        let _ = writeln!(out, "# experiment={}", m.experiment);
        let _ = writeln!(out, "# table={}", m.table);
        let _ = writeln!(out, "# seed={}", m.seed);
        let _ = writeln!(out, "# scenario_hash={}", m.scenario_hash);
        let _ = writeln!(out, "# config={}", m.config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, table.to_csv_string()).map_err(io_err(path))
}

fn csv_err(path: &Path, line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Csv { path: path.to_path_buf(), line, message: message.into() }
}

pub fn parse_csv(text: &str, path: &Path) -> Result<ResultTable, HarnessError> {
    let mut meta: Vec<(String, String)> = Vec::new();
    let mut lines = text.split_terminator('\n').enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        let Some(rest) = line.strip_prefix("# ") else { break };
        let (k, v) = rest.split_once('=').ok_or_else(|| csv_err(path, 0, "metadata line without '='"))?;
        meta.push((k.to_string(), v.to_string()));
        lines.next();
    }
    let get = |key: &str| {
        meta.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| csv_err(path, 0, format!("missing metadata `{key}`")))
    };
    let metadata = Metadata {
        artifact_version: get("artifact_version")?.parse().map_err(|_| csv_err(path, 1, "bad artifact_version"))?,
        experiment: get("experiment")?,
        table: get("table")?,
        seed: get("seed")?.parse().map_err(|_| csv_err(path, 4, "bad seed"))?,
        scenario_hash: get("scenario_hash")?,
        config: get("config")?,
    };
    let (_, header) = lines.next().ok_or_else(|| csv_err(path, meta.len() + 1, "missing header"))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut table = ResultTable::new(columns, metadata);
    for (i, line) in lines {
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|_| csv_err(path, i + 1, format!("not a number: `{f}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != table.columns.len() {
            return Err(csv_err(path, i + 1, format!("{} fields, header has {}", row.len(), table.columns.len())));
        }
        table.rows.push(row);
    }
    Ok(table)
}

pub fn read_csv(path: &Path) -> Result<ResultTable, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_csv(&text, path)
}

/// Recompute the scenario hash from the embedded config and check that the
/// config is canonical and agrees with the recorded seed.
pub fn verify_hash(path: &Path) -> Result<String, HarnessError> {
    let table = read_csv(path)?;
    let m = &table.metadata;
    let actual = sha256_hex(&m.config);
    if actual != m.scenario_hash {
        return Err(HarnessError::HashMismatch { path: path.to_path_buf(), recorded: m.scenario_hash.clone(), actual });
    }
    let cfg = parse_config(&m.config)?;
    if cfg.canonical_json() != m.config {
        return Err(csv_err(path, 6, "embedded config is not in canonical form"));
    }
    if cfg.seed != m.seed || cfg.experiment.name() != m.experiment {
        return Err(csv_err(path, 4, "seed or experiment disagrees with embedded config"));
    }
    Ok(actual)
}

/// Write every table into `dir` as `<name>.csv`. Files go to temporary names
/// first; on any failure, everything written by this call is removed.
pub fn write_tables(dir: &Path, tables: &[ResultTable]) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let mut done: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for t in tables {
            let path = dir.join(format!("{}.csv", t.name()));
            let tmp = dir.join(format!(".{}.csv.partial", t.name()));
            staged.push((tmp.clone(), path));
            emit_csv(t, &tmp)?;
        }
        for (tmp, path) in &staged {
            fs::rename(tmp, path).map_err(io_err(path))?;
            done.push(path.clone());
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(done),
        Err(e) => {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            for path in &done {
                let _ = fs::remove_file(path);
            }
            Err(e)
        }
    }
}
