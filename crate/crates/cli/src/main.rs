//! Experiment runner: executes JSON-configured cell-problem experiments,
//! persists diff-able CSV/JSON artifacts with a manifest, renders SVG
//! summaries, and replays manifests to verify bit-exact reproduction.
//!
//! Exit codes: 0 success (all jobs and audits), 1 audit failure or replay
//! mismatch, 2 configuration/schema/input errors, 3 solver capacity errors.

mod config;
mod output;
mod plot;
mod run;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use output::{now_unix_ms, records_csv, write_json, write_text, JobEntry, RunManifest};
use run::{execute, RunError, RunOutput};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "homlab", version, about = "Cell-problem surface tension laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV/JSON outputs plus a manifest.
    Run {
        config: PathBuf,
        /// Worker threads (default: logical cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (default: config "output" field or runs/<stem>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG charts from a results directory.
    Plot { dir: PathBuf },
    /// Re-run a manifest and verify bit-identical integer minima and CSV.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, workers, out } => cmd_run(&config, workers, out),
        Command::Plot { dir } => cmd_plot(&dir),
        Command::Replay { manifest, workers } => cmd_replay(&manifest, workers),
    }
}

fn fail(code: u8, msg: impl AsRef<str>) -> ExitCode {
    eprintln!("error: {}", msg.as_ref());
    ExitCode::from(code)
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ExperimentConfig::from_json(&text).map_err(|e| e.to_string())
}

fn cmd_run(config_path: &Path, workers: Option<usize>, out: Option<PathBuf>) -> ExitCode {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => return fail(2, e),
    };
    let out_dir = out
        .or_else(|| config.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| {
            let stem = config_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            PathBuf::from("runs").join(stem)
        });
    let started = now_unix_ms();
    let result = with_pool(workers, || execute(&config));
    let effective_workers = workers.unwrap_or_else(rayon::current_num_threads);
    match result {
        Ok(output) => {
            match persist(&config, &output, &out_dir, started, effective_workers) {
                Ok(()) => {}
                Err(e) => return fail(2, format!("{e:#}")),
            }
            if output.audits_passed {
                println!(
                    "ok: {} jobs, outputs in {}",
                    output.jobs.len(),
                    out_dir.display()
                );
                ExitCode::SUCCESS
            } else {
                eprintln!("audit failed; see {}", out_dir.join("report.json").display());
                ExitCode::from(1)
            }
        }
        Err(RunError::Capacity { message, partial }) => {
            let _ = persist_partial(&config, &partial, &out_dir, started, effective_workers, &message);
            fail(3, format!("capacity: {message} (partial results in {})", out_dir.display()))
        }
        Err(RunError::Config(m)) => fail(2, format!("schema: {m}")),
        Err(RunError::Other(e)) => fail(2, format!("{e:#}")),
    }
}

fn persist(
    config: &ExperimentConfig,
    output: &RunOutput,
    out_dir: &Path,
    started: u64,
    workers: usize,
) -> anyhow::Result<()> {
    let (_, hash) = config.canonical_json_and_hash();
    let mut outputs = Vec::new();
    let csv = records_csv(&output.records, output.dim, true);
    write_text(&out_dir.join("records.csv"), &csv)?;
    outputs.push("records.csv".to_string());
    write_json(&out_dir.join("report.json"), &output.report)?;
    outputs.push("report.json".to_string());
    for (name, bytes) in &output.images {
        std::fs::create_dir_all(out_dir)?;
        std::fs::write(out_dir.join(name), bytes)?;
        outputs.push(name.clone());
    }
    outputs.push("manifest.json".to_string());
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        schema: config::SCHEMA_VERSION,
        kind: config.kind.name().to_string(),
        config_hash: hash,
        config: serde_json::to_value(config)?,
        started_unix_ms: started,
        finished_unix_ms: now_unix_ms(),
        workers,
        audits_passed: output.audits_passed,
        jobs: output.jobs.clone(),
        outputs,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(())
}

fn persist_partial(
    config: &ExperimentConfig,
    partial: &[homlab_core::cell::EstimateRecord],
    out_dir: &Path,
    started: u64,
    workers: usize,
    message: &str,
) -> anyhow::Result<()> {
    let (_, hash) = config.canonical_json_and_hash();
    let csv = records_csv(partial, config.geometry.dim, true);
    write_text(&out_dir.join("records.csv"), &csv)?;
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        schema: config::SCHEMA_VERSION,
        kind: config.kind.name().to_string(),
        config_hash: hash,
        config: serde_json::to_value(config)?,
        started_unix_ms: started,
        finished_unix_ms: now_unix_ms(),
        workers,
        audits_passed: false,
        jobs: vec![JobEntry { id: "aborted".into(), raw_int: 0, status: format!("capacity: {message}") }],
        outputs: vec!["records.csv".into(), "manifest.json".into()],
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(())
}

fn cmd_plot(dir: &Path) -> ExitCode {
    match plot::plot_dir(dir) {
        Ok(files) => {
            println!("wrote {} charts in {}", files.len(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(2, format!("{e:#}")),
    }
}

fn cmd_replay(manifest_path: &Path, workers: Option<usize>) -> ExitCode {
    let text = match std::fs::read_to_string(manifest_path) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("cannot read {}: {e}", manifest_path.display())),
    };
    let manifest: RunManifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => return fail(2, config::schema_message(&e)),
    };
    let config: ExperimentConfig = match serde_json::from_value(manifest.config.clone()) {
        Ok(c) => c,
        Err(e) => return fail(2, config::schema_message(&e)),
    };
    if let Err(e) = config.validate() {
        return fail(2, e.to_string());
    }
    let result = with_pool(workers, || execute(&config));
    let output = match result {
        Ok(o) => o,
        Err(RunError::Capacity { message, .. }) => return fail(3, message),
        Err(RunError::Config(m)) => return fail(2, m),
        Err(RunError::Other(e)) => return fail(2, format!("{e:#}")),
    };
    // Integer minima must reproduce bit-exactly, job by job.
    let mut divergent = Vec::new();
    if manifest.jobs.len() != output.jobs.len() {
        divergent.push(format!(
            "job count {} != recorded {}",
            output.jobs.len(),
            manifest.jobs.len()
        ));
    } else {
        for (old, new) in manifest.jobs.iter().zip(output.jobs.iter()) {
            if old.id != new.id || old.raw_int != new.raw_int {
                divergent.push(format!(
                    "{}: recorded {} replayed {} ({})",
                    old.id, old.raw_int, new.raw_int, new.id
                ));
            }
        }
    }
    // The stored CSV must match byte for byte once wall clocks are stripped.
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    match std::fs::read_to_string(dir.join("records.csv")) {
        Ok(stored) => {
            let fresh = records_csv(&output.records, output.dim, false);
            if output::csv_strip_wall(&stored) != fresh {
                divergent.push("records.csv differs after stripping wall_ms".to_string());
            }
        }
        Err(e) => divergent.push(format!("cannot read stored records.csv: {e}")),
    }
    if divergent.is_empty() {
        println!("replay ok: {} jobs bit-identical", output.jobs.len());
        ExitCode::SUCCESS
    } else {
        for d in &divergent {
            eprintln!("divergent: {d}");
        }
        fail(1, format!("{} divergences", divergent.len()))
    }
}
