//! Experiment execution: maps a validated config onto the core estimators
//! and collects records, per-job integer minima, and a JSON report.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::JobEntry;
use homlab_core::cell::{
    estimate_ghom, mu_process, solve_cell, triangle_audit, EstimateParams, EstimateRecord,
};
use homlab_core::geometry::{IntervalBox, JumpDatum, OrientedCube, UnitDirection};
use homlab_core::hash::Mix64;
use homlab_core::lattice::{BcMode, CellProblemSpec, SolverChoice};
use homlab_core::media::make_field;
use homlab_core::Error as CoreError;
use serde_json::json;

#[derive(Debug)]
pub enum RunError {
    /// Solver capacity exceeded (exit 3), with whatever completed.
    Capacity { message: String, partial: Vec<EstimateRecord> },
    /// Configuration rejected at run time (exit 2).
    Config(String),
    /// Anything else (exit 2).
    Other(anyhow::Error),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Other(e)
    }
}

fn from_core(e: CoreError, partial: Vec<EstimateRecord>) -> RunError {
    match e {
        CoreError::Capacity(m) => RunError::Capacity { message: m, partial },
        CoreError::Config(m) => RunError::Config(m),
        other => RunError::Other(anyhow::anyhow!(other)),
    }
}

pub struct RunOutput {
    pub dim: usize,
    pub records: Vec<EstimateRecord>,
    pub jobs: Vec<JobEntry>,
    pub report: serde_json::Value,
    pub audits_passed: bool,
    /// PGM snapshots to write: (file name, bytes).
    pub images: Vec<(String, Vec<u8>)>,
}

fn dir_tag(nu: &UnitDirection) -> String {
    let k = nu.ints();
    if nu.dim() == 3 {
        format!("{}_{}_{}", k[0], k[1], k[2])
    } else {
        format!("{}_{}", k[0], k[1])
    }
}

fn record_job(prefix: &str, r: &EstimateRecord) -> JobEntry {
    JobEntry {
        id: format!("{prefix}/nu{}/{}/t{}/s{}", dir_tag(&r.nu), r.bc.name(), r.t, r.seed),
        raw_int: r.raw_int,
        status: "ok".into(),
    }
}

pub fn execute(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    match config.kind {
        ExperimentKind::Estimate => run_estimate(config),
        ExperimentKind::IsotropyCorollary => run_isotropy(config),
        ExperimentKind::AnisotropicGap => run_anisotropic_gap(config),
        ExperimentKind::SubadditivityAudit => run_subadditivity(config),
        ExperimentKind::StationarityAudit => run_stationarity(config),
        ExperimentKind::TriangleAudit => run_triangle(config),
    }
}

fn base_params(
    config: &ExperimentConfig,
    nu: &UnitDirection,
    bc: BcMode,
) -> Result<EstimateParams, RunError> {
    let stencil = config.stencil().map_err(|e| RunError::Config(e.to_string()))?;
    let mut params = EstimateParams::new(
        config.field.clone(),
        config.geometry.dim,
        nu.clone(),
        config.schedule(),
        stencil,
        config.solver.solver,
    );
    params.seeds = config
        .effective_seeds()
        .map_err(|e| RunError::Config(e.to_string()))?;
    params.a = config.labels.pair.0;
    params.b = config.labels.pair.1;
    params.label_count = config.labels.count;
    params.bc = bc;
    params.max_sweeps = config.solver.max_sweeps;
    params.metric_override = config.solver.metric_override;
    params.collar_width = config.collar_width;
    Ok(params)
}

fn run_combo(
    config: &ExperimentConfig,
    nu: &UnitDirection,
    bc: BcMode,
    records: &mut Vec<EstimateRecord>,
    jobs: &mut Vec<JobEntry>,
) -> Result<homlab_core::cell::ConvergenceReport, RunError> {
    let params = base_params(config, nu, bc)?;
    let (report, combo_records) = estimate_ghom(&params).map_err(|pf| {
        let mut partial = records.clone();
        partial.extend(pf.partial);
        from_core(pf.error, partial)
    })?;
    for r in &combo_records {
        jobs.push(record_job(config.kind.name(), r));
    }
    records.extend(combo_records);
    Ok(report)
}

fn dump_largest_label_field(
    config: &ExperimentConfig,
    nu: &UnitDirection,
    bc: BcMode,
    images: &mut Vec<(String, Vec<u8>)>,
) -> Result<(), RunError> {
    if !config.dump_labels || config.geometry.dim != 2 {
        return Ok(());
    }
    let params = base_params(config, nu, bc)?;
    let t = params.t_schedule.iter().cloned().fold(0.0, f64::max);
    let seed = params.seeds[0];
    let (spec, _) = params.spec_for(seed, t).map_err(|e| from_core(e, Vec::new()))?;
    let result = homlab_core::solver::solve(&spec).map_err(|e| from_core(e, Vec::new()))?;
    let mut bytes = Vec::new();
    result
        .argmin
        .write_pgm(&mut bytes)
        .map_err(|e| RunError::Other(e.into()))?;
    images.push((format!("labels_nu{}_{}_t{}_s{}.pgm", dir_tag(nu), bc.name(), t, seed), bytes));
    Ok(())
}

fn run_estimate(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let mut records = Vec::new();
    let mut jobs = Vec::new();
    let mut images = Vec::new();
    let mut reports = Vec::new();
    for nu in config.directions() {
        for bc in config.bc.modes() {
            let report = run_combo(config, &nu, bc, &mut records, &mut jobs)?;
            dump_largest_label_field(config, &nu, bc, &mut images)?;
            reports.push(json!({
                "nu": nu.ints()[..config.geometry.dim].to_vec(),
                "bc": bc.name(),
                "report": report,
            }));
        }
    }
    Ok(RunOutput {
        dim: config.geometry.dim,
        records,
        jobs,
        report: json!({ "kind": "estimate", "combos": reports }),
        audits_passed: true,
        images,
    })
}

fn run_isotropy(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let tolerance = config.tolerance.unwrap_or(0.05);
    let mut records = Vec::new();
    let mut jobs = Vec::new();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for nu in config.directions() {
        let full = run_combo(config, &nu, BcMode::Full, &mut records, &mut jobs)?;
        let tb = run_combo(config, &nu, BcMode::TopBottom, &mut records, &mut jobs)?;
        let gap = (full.estimate - tb.estimate).abs() / full.estimate;
        let pass = gap <= tolerance;
        all_pass &= pass;
        entries.push(json!({
            "nu": nu.ints()[..config.geometry.dim].to_vec(),
            "full": full,
            "top_bottom": tb,
            "relative_gap": gap,
            "tolerance": tolerance,
            "pass": pass,
        }));
    }
    Ok(RunOutput {
        dim: config.geometry.dim,
        records,
        jobs,
        report: json!({ "kind": "isotropy_corollary", "directions": entries }),
        audits_passed: all_pass,
        images: Vec::new(),
    })
}

fn run_anisotropic_gap(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let full_min = config.full_min.unwrap_or(2.1);
    let tb_max = config.top_bottom_max.unwrap_or(2.05);
    let mut records = Vec::new();
    let mut jobs = Vec::new();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for nu in config.directions() {
        let full = run_combo(config, &nu, BcMode::Full, &mut records, &mut jobs)?;
        let tb = run_combo(config, &nu, BcMode::TopBottom, &mut records, &mut jobs)?;
        let pass = full.estimate >= full_min && tb.estimate <= tb_max;
        all_pass &= pass;
        entries.push(json!({
            "nu": nu.ints()[..config.geometry.dim].to_vec(),
            "full": full,
            "top_bottom": tb,
            "full_min": full_min,
            "top_bottom_max": tb_max,
            "pass": pass,
        }));
    }
    Ok(RunOutput {
        dim: config.geometry.dim,
        records,
        jobs,
        report: json!({ "kind": "anisotropic_gap", "directions": entries }),
        audits_passed: all_pass,
        images: Vec::new(),
    })
}

fn run_subadditivity(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    if config.geometry.dim != 2 {
        return Err(RunError::Config("subadditivity audit is two-dimensional".into()));
    }
    if config.labels.count != 2 || config.solver.solver == SolverChoice::Alpha {
        return Err(RunError::Config(
            "subadditivity audit needs the exact two-label solver".into(),
        ));
    }
    let stencil = config.stencil().map_err(|e| RunError::Config(e.to_string()))?;
    let directions = config.directions();
    for nu in &directions {
        homlab_core::geometry::rational_direction_scale(nu)
            .map_err(|e| RunError::Config(format!("direction {:?}: {e}", nu.ints())))?;
    }
    let cases = config.cases.unwrap_or(50);
    let mut rng = Mix64::new(config.field.seed ^ 0x05AB_AD17);
    let mut jobs = Vec::new();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for case in 0..cases {
        let nu = directions[rng.next_below(directions.len() as u64) as usize].clone();
        let scale = homlab_core::geometry::rational_direction_scale(&nu).unwrap();
        let max_len = if scale > 1 { 12 } else { 20 };
        let pieces: i64 = if rng.next_below(2) == 0 { 2 } else { 4 };
        let mut lens = Vec::new();
        for _ in 0..pieces {
            lens.push(rng.next_range_i64(3, (max_len / pieces).max(4)));
        }
        let start = rng.next_range_i64(-10, 10);
        let total: i64 = lens.iter().sum();
        let mut cfg = config.field.clone();
        cfg.seed = rng.next_u64();
        let field = make_field(&cfg, 2).map_err(|e| from_core(e, Vec::new()))?;
        let whole_box = IntervalBox::new(2, &[(start as f64, (start + total) as f64)]).unwrap();
        let (a, b) = config.labels.pair;
        let whole = mu_process(&whole_box, &nu, a, b, 2, &field, &stencil, config.solver.solver)
            .map_err(|e| from_core(e, Vec::new()))?;
        jobs.push(JobEntry {
            id: format!("sub{case}/whole"),
            raw_int: whole.raw_int,
            status: "ok".into(),
        });
        let mut sum = 0u64;
        let mut at = start;
        let mut part_ints = Vec::new();
        for (i, len) in lens.iter().enumerate() {
            let part = IntervalBox::new(2, &[(at as f64, (at + len) as f64)]).unwrap();
            let value = mu_process(&part, &nu, a, b, 2, &field, &stencil, config.solver.solver)
                .map_err(|e| from_core(e, Vec::new()))?;
            jobs.push(JobEntry {
                id: format!("sub{case}/part{i}"),
                raw_int: value.raw_int,
                status: "ok".into(),
            });
            sum += value.raw_int;
            part_ints.push(value.raw_int);
            at += len;
        }
        let pass = whole.raw_int <= sum;
        all_pass &= pass;
        entries.push(json!({
            "case": case,
            "nu": nu.ints()[..2].to_vec(),
            "interval": [start, start + total],
            "piece_lengths": lens,
            "mu_int": whole.raw_int,
            "partition_sum_int": sum,
            "pass": pass,
        }));
    }
    Ok(RunOutput {
        dim: 2,
        records: Vec::new(),
        jobs,
        report: json!({ "kind": "subadditivity_audit", "cases": entries }),
        audits_passed: all_pass,
        images: Vec::new(),
    })
}

fn run_stationarity(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    if config.geometry.dim != 2 {
        return Err(RunError::Config("stationarity audit is two-dimensional".into()));
    }
    let stencil = config.stencil().map_err(|e| RunError::Config(e.to_string()))?;
    let collar = config.collar_width.unwrap_or_else(|| stencil.default_collar());
    let t = config.schedule()[0];
    if t < 2.0 * collar as f64 || (t.round() as i64) % 2 != 0 {
        return Err(RunError::Config("stationarity audit needs an even side above the collar".into()));
    }
    let directions = config.directions();
    let cases = config.cases.unwrap_or(100);
    let mut rng = Mix64::new(config.field.seed ^ 0x0057_A710);
    let mut jobs = Vec::new();
    let mut entries = Vec::new();
    let mut all_pass = true;
    let (a, b) = config.labels.pair;
    for case in 0..cases {
        let nu = directions[rng.next_below(directions.len() as u64) as usize].clone();
        let z = [rng.next_range_i64(-64, 65), rng.next_range_i64(-64, 65), 0];
        let mut cfg = config.field.clone();
        cfg.seed = rng.next_u64();
        let field = make_field(&cfg, 2).map_err(|e| from_core(e, Vec::new()))?;
        let center = [z[0] as f64, z[1] as f64, 0.0];
        let shifted_spec = CellProblemSpec {
            field: field.clone(),
            cube: OrientedCube::new(center, nu.clone(), t).map_err(|e| from_core(e, Vec::new()))?,
            datum: JumpDatum::new(a, b, nu.clone(), center).map_err(|e| from_core(e, Vec::new()))?,
            bc: BcMode::Full,
            collar_width: collar,
            stencil: stencil.clone(),
            label_count: config.labels.count,
            solver: config.solver.solver,
            max_sweeps: config.solver.max_sweeps,
            metric_override: config.solver.metric_override,
        };
        let centered_spec = CellProblemSpec {
            field: field.shift(z),
            cube: OrientedCube::new([0.0; 3], nu.clone(), t).unwrap(),
            datum: JumpDatum::new(a, b, nu.clone(), [0.0; 3]).unwrap(),
            ..shifted_spec.clone()
        };
        let shifted = solve_cell(&shifted_spec).map_err(|e| from_core(e, Vec::new()))?;
        let centered = solve_cell(&centered_spec).map_err(|e| from_core(e, Vec::new()))?;
        jobs.push(JobEntry {
            id: format!("stat{case}/shifted"),
            raw_int: shifted.raw_int,
            status: "ok".into(),
        });
        jobs.push(JobEntry {
            id: format!("stat{case}/centered"),
            raw_int: centered.raw_int,
            status: "ok".into(),
        });
        let pass = shifted.raw_int == centered.raw_int;
        all_pass &= pass;
        entries.push(json!({
            "case": case,
            "nu": nu.ints()[..2].to_vec(),
            "shift": [z[0], z[1]],
            "seed": cfg.seed,
            "shifted_int": shifted.raw_int,
            "centered_int": centered.raw_int,
            "pass": pass,
        }));
    }
    Ok(RunOutput {
        dim: 2,
        records: Vec::new(),
        jobs,
        report: json!({ "kind": "stationarity_audit", "cases": entries }),
        audits_passed: all_pass,
        images: Vec::new(),
    })
}

fn run_triangle(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let stencil = config.stencil().map_err(|e| RunError::Config(e.to_string()))?;
    let nu = config.directions()[0].clone();
    let t = config
        .schedule()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let seeds = config
        .effective_seeds()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (report, records) = triangle_audit(
        &config.field,
        config.geometry.dim,
        &seeds,
        config.labels.count,
        &nu,
        t,
        &stencil,
        true,
    )
    .map_err(|pf| from_core(pf.error, pf.partial))?;
    let jobs = records
        .iter()
        .map(|r| JobEntry {
            id: format!("tri/{}-{}/s{}", r.a, r.b, r.seed),
            raw_int: r.raw_int,
            status: "ok".into(),
        })
        .collect();
    let passed = report.passed;
    Ok(RunOutput {
        dim: config.geometry.dim,
        records,
        jobs,
        report: json!({ "kind": "triangle_audit", "report": report }),
        audits_passed: passed,
        images: Vec::new(),
    })
}

