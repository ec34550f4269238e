//! Checkpointed sweep execution: each cell writes `runs/<key>.csv` and then
//! `runs/<key>.json`; the JSON marks the cell complete and carries the
//! numbers the summary is assembled from.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever a CSV or JSON layout changes; old checkpoints are rerun.
pub const SCHEMA_VERSION: u32 = 1;

pub const RUNS_DIR: &str = "runs";
pub const FAILURES_FILE: &str = "failures.csv";

/// Per-run structured summary. Fields that do not apply to the experiment
/// are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub schema_version: u32,
    pub cell: String,
    pub config_hash: String,
    pub best_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_best: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnetization: Option<f64>,
    pub wall_time_s: f64,
}

impl CellSummary {
    pub fn new(cell: &Cell, best_energy: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            cell: cell.key.clone(),
            config_hash: cell.hash(),
            best_energy,
            alpha: None,
            p_best: None,
            error_rel: None,
            error_abs: None,
            energy: None,
            reference: None,
            magnetization: None,
            wall_time_s: 0.0,
        }
    }
}

/// One unit of work. `key` names its files; `canonical` is every input that
/// affects the result, in a fixed textual form.
#[derive(Debug, Clone)]
pub struct Cell {
    pub key: String,
    pub canonical: String,
}

impl Cell {
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("v{SCHEMA_VERSION};{}", self.canonical));
        format!("{digest:x}")
    }
}

/// Writes via a temporary sibling and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Creates the output directory and checks it is writable.
pub fn prepare_out(out: &Path) -> io::Result<()> {
    fs::create_dir_all(out)?;
    let probe = out.join(".write_probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)
}

pub struct Sweep {
    pub out: PathBuf,
    pub workers: usize,
    pub force: bool,
}

pub struct Settled {
    pub cell: Cell,
    pub result: Result<CellSummary, String>,
    pub reused: bool,
}

impl Sweep {
    fn paths(&self, cell: &Cell) -> (PathBuf, PathBuf) {
        let dir = self.out.join(RUNS_DIR);
        (dir.join(format!("{}.csv", cell.key)), dir.join(format!("{}.json", cell.key)))
    }

    fn checkpoint(&self, cell: &Cell) -> Option<CellSummary> {
        let (csv, json) = self.paths(cell);
        if !csv.exists() {
            return None;
        }
        let s: CellSummary = serde_json::from_str(&fs::read_to_string(json).ok()?).ok()?;
        (s.schema_version == SCHEMA_VERSION && s.config_hash == cell.hash()).then_some(s)
    }

    /// Runs every cell not already checkpointed. `work` gets the cell's
    /// position and returns the run CSV and the summary; results come back
    /// in cell order.
    pub fn run<F>(&self, cells: Vec<Cell>, work: F) -> io::Result<Vec<Settled>>
    where
        F: Fn(usize, &Cell) -> Result<(String, CellSummary), String> + Sync,
    {
        fs::create_dir_all(self.out.join(RUNS_DIR))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(io::Error::other)?;
        let settled = pool.install(|| {
            cells
                .into_par_iter()
                .enumerate()
                .map(|(i, cell)| self.settle(i, cell, &work))
                .collect::<Vec<_>>()
        });
        let failures: Vec<&Settled> = settled.iter().filter(|s| s.result.is_err()).collect();
        let manifest = self.out.join(FAILURES_FILE);
        if failures.is_empty() {
            if manifest.exists() {
                fs::remove_file(manifest)?;
            }
        } else {
            let mut text = String::from("cell,error\n");
            for f in failures {
                let msg = f.result.as_ref().unwrap_err();
                text.push_str(&format!("{},\"{}\"\n", f.cell.key, msg.replace('"', "\"\"")));
            }
            write_atomic(&manifest, &text)?;
        }
        Ok(settled)
    }

    fn settle<F>(&self, index: usize, cell: Cell, work: &F) -> Settled
    where
        F: Fn(usize, &Cell) -> Result<(String, CellSummary), String>,
    {
        if !self.force {
            if let Some(s) = self.checkpoint(&cell) {
                return Settled { cell, result: Ok(s), reused: true };
            }
        }
        let start = Instant::now();
        let result = work(index, &cell).and_then(|(csv, mut summary)| {
            summary.wall_time_s = start.elapsed().as_secs_f64();
            let (csv_path, json_path) = self.paths(&cell);
            let json = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
            write_atomic(&csv_path, &csv)
                .and_then(|_| write_atomic(&json_path, &(json + "\n")))
                .map_err(|e| format!("writing results: {e}"))?;
            Ok(summary)
        });
        Settled { cell, result, reused: false }
    }
}
