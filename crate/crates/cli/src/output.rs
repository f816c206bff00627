//! Result persistence: CSV records, JSON reports, and the run manifest.

use anyhow::Context;
use homlab_core::cell::EstimateRecord;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Fixed record columns. `wall_ms` is the only nondeterministic field and is
/// excluded from replay comparisons.
pub fn csv_header(dim: usize) -> String {
    if dim == 3 {
        "family,seed,nu_x,nu_y,nu_z,a,b,t,bc,stencil,solver,raw,normalized,exact,wall_ms".into()
    } else {
        "family,seed,nu_x,nu_y,a,b,t,bc,stencil,solver,raw,normalized,exact,wall_ms".into()
    }
}

pub fn csv_row(r: &EstimateRecord, dim: usize, with_wall: bool) -> String {
    let ints = r.nu.ints();
    let nu = if dim == 3 {
        format!("{},{},{}", ints[0], ints[1], ints[2])
    } else {
        format!("{},{}", ints[0], ints[1])
    };
    let mut row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.family,
        r.seed,
        nu,
        r.a,
        r.b,
        r.t,
        r.bc.name(),
        r.stencil,
        r.solver.name(),
        r.raw,
        r.normalized,
        r.exact
    );
    if with_wall {
        row.push_str(&format!(",{}", r.wall_ms));
    }
    row
}

pub fn records_csv(records: &[EstimateRecord], dim: usize, with_wall: bool) -> String {
    let mut out = String::new();
    let header = csv_header(dim);
    let header = if with_wall {
        header
    } else {
        header.trim_end_matches(",wall_ms").to_string()
    };
    out.push_str(&header);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r, dim, with_wall));
        out.push('\n');
    }
    out
}

/// Strip the trailing wall-clock column from a stored CSV for comparisons.
pub fn csv_strip_wall(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        match line.rfind(',') {
            Some(idx) => out.push_str(&line[..idx]),
            None => out.push_str(line),
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobEntry {
    pub id: String,
    pub raw_int: u64,
    pub status: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub schema: u32,
    pub kind: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub workers: usize,
    pub audits_passed: bool,
    pub jobs: Vec<JobEntry>,
    pub outputs: Vec<String>,
}

pub fn now_unix_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}
