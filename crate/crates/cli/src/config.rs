//! Experiment configuration: one canonical, versioned JSON schema.

use anyhow::{bail, Context};
use homlab_core::geometry::UnitDirection;
use homlab_core::lattice::{BcMode, SolverChoice, Stencil};
use homlab_core::media::FieldConfig;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Estimate,
    IsotropyCorollary,
    AnisotropicGap,
    SubadditivityAudit,
    StationarityAudit,
    TriangleAudit,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::IsotropyCorollary => "isotropy_corollary",
            ExperimentKind::AnisotropicGap => "anisotropic_gap",
            ExperimentKind::SubadditivityAudit => "subadditivity_audit",
            ExperimentKind::StationarityAudit => "stationarity_audit",
            ExperimentKind::TriangleAudit => "triangle_audit",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Directions as snapped integer vectors.
    pub directions: Vec<Vec<i64>>,
    /// Cube sides; defaults to {16,32,64,128} in d=2 and {8,12,16,24} in d=3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_schedule: Option<Vec<f64>>,
}

fn default_dim() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelsConfig {
    #[serde(default = "default_label_count")]
    pub count: u8,
    /// Datum label pair (a, b).
    #[serde(default = "default_pair")]
    pub pair: (u8, u8),
}

fn default_label_count() -> u8 {
    2
}

fn default_pair() -> (u8, u8) {
    (0, 1)
}

impl Default for LabelsConfig {
    fn default() -> Self {
        LabelsConfig { count: 2, pair: (0, 1) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub solver: SolverChoice,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: u32,
    #[serde(default)]
    pub metric_override: bool,
}

fn default_sweeps() -> u32 {
    8
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { solver: SolverChoice::Mincut, max_sweeps: 8, metric_override: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcConfig {
    #[default]
    Full,
    TopBottom,
    Both,
}

impl BcConfig {
    pub fn modes(&self) -> Vec<BcMode> {
        match self {
            BcConfig::Full => vec![BcMode::Full],
            BcConfig::TopBottom => vec![BcMode::TopBottom],
            BcConfig::Both => vec![BcMode::Full, BcMode::TopBottom],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub kind: ExperimentKind,
    pub field: FieldConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub labels: LabelsConfig,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_stencil")]
    pub stencil: String,
    #[serde(default)]
    pub bc: BcConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar_width: Option<u32>,
    /// Relative full-vs-top-bottom tolerance (isotropy corollary).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Lower bound the full-boundary estimate must reach (anisotropic gap).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_min: Option<f64>,
    /// Upper bound the top-bottom estimate must stay below (anisotropic gap).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_bottom_max: Option<f64>,
    /// Number of randomized cases for the audits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<u32>,
    /// Write the minimizer of the largest-side problem as a PGM image.
    #[serde(default)]
    pub dump_labels: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_stencil() -> String {
    "facet".to_string()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| anyhow::anyhow!(schema_message(&e)))?;
        if config.schema != SCHEMA_VERSION {
            bail!("schema: expected version {SCHEMA_VERSION}, found {}", config.schema);
        }
        config.validate()?;
        Ok(config)
    }

    /// Semantic validation beyond JSON shape.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.seeds.is_empty() {
            bail!("schema: seeds must be nonempty");
        }
        if self.geometry.dim != 2 && self.geometry.dim != 3 {
            bail!("schema: dim must be 2 or 3");
        }
        if self.geometry.directions.is_empty() {
            bail!("schema: at least one direction is required");
        }
        for d in &self.geometry.directions {
            self.direction(d).with_context(|| format!("direction {d:?}"))?;
        }
        let schedule = self.schedule();
        if schedule.is_empty() {
            bail!("schema: t_schedule must be nonempty");
        }
        if schedule.iter().any(|t| *t <= 0.0 || !t.is_finite()) {
            bail!("schema: t_schedule entries must be positive");
        }
        if self.kind == ExperimentKind::Estimate && schedule.len() < 3 {
            bail!("schema: estimate runs need at least three schedule points");
        }
        let (a, b) = self.labels.pair;
        if a == b || a >= self.labels.count || b >= self.labels.count {
            bail!("schema: label pair must be two distinct labels below count");
        }
        if self.kind == ExperimentKind::TriangleAudit && self.labels.count < 3 {
            bail!("schema: triangle audit needs at least three labels");
        }
        self.stencil()?;
        homlab_core::media::make_field(&self.field, self.geometry.dim)
            .map_err(|e| anyhow::anyhow!("schema: {e}"))?;
        Ok(())
    }

    pub fn direction(&self, ints: &[i64]) -> anyhow::Result<UnitDirection> {
        if ints.len() != self.geometry.dim {
            bail!("direction length does not match dim");
        }
        let mut v = [0i64; 3];
        v[..ints.len()].copy_from_slice(ints);
        UnitDirection::from_ints(self.geometry.dim, v).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn directions(&self) -> Vec<UnitDirection> {
        self.geometry
            .directions
            .iter()
            .map(|d| self.direction(d).expect("validated"))
            .collect()
    }

    pub fn stencil(&self) -> anyhow::Result<Stencil> {
        Stencil::by_name(&self.stencil, self.geometry.dim).map_err(|e| anyhow::anyhow!("schema: {e}"))
    }

    /// The side-length schedule, falling back to the per-dimension default.
    pub fn schedule(&self) -> Vec<f64> {
        match &self.geometry.t_schedule {
            Some(s) => s.clone(),
            None if self.geometry.dim == 3 => vec![8.0, 12.0, 16.0, 24.0],
            None => vec![16.0, 32.0, 64.0, 128.0],
        }
    }

    /// Seeds after applying the `HOMLAB_SEED_OVERRIDE` environment variable.
    pub fn effective_seeds(&self) -> anyhow::Result<Vec<u64>> {
        match std::env::var("HOMLAB_SEED_OVERRIDE") {
            Ok(v) => {
                let seed: u64 = v
                    .trim()
                    .parse()
                    .with_context(|| format!("HOMLAB_SEED_OVERRIDE={v:?} is not a u64"))?;
                Ok(vec![seed])
            }
            Err(_) => Ok(self.seeds.clone()),
        }
    }

    /// Canonical JSON (sorted keys, compact) and its SHA-256 hex digest.
    pub fn canonical_json_and_hash(&self) -> (String, String) {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("canonical json");
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let hash = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        (canonical, hash)
    }
}

/// Schema error message; serde_json already anchors line and column.
pub fn schema_message(e: &serde_json::Error) -> String {
    format!("schema: {e}")
}
