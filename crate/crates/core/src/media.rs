//! Stationary random surface-tension fields.
//!
//! A field assigns a weight `g(x, a, b, nu)` in `[1/c, c]` to a point, an
//! ordered label pair and a unit normal, with the exact symmetry
//! `g(x, a, b, nu) = g(x, b, a, -nu)`. Randomness is counter-based: the
//! scalar part is a pure hash of `(seed, cell)` for the unit cell containing
//! `x`, so shifting the field by an integer vector is an exact identity
//! (`shift` just offsets the counter) rather than a resampling.
//!
//! Every family is stationary under integer shifts. Only the per-cell hashed
//! families (`iid_uniform`, and `product` over such a base) are ergodic;
//! the periodic families (`stripes`, `checkerboard`) are stationary without
//! being ergodic under the full shift group, so their large-cube limits stay
//! seed-independent only because they carry no seed dependence at all.

use crate::error::{Error, Result};
use crate::geometry::{IVec3, UnitDirection, Vec3};
use crate::hash::{cell_hash, u01};
use serde::{Deserialize, Serialize};

/// Field family and its parameters, as they appear in experiment configs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilyConfig {
    /// Constant scalar weight.
    Constant { value: f64 },
    /// Periodic stripes along one axis; the period is `values.len()`.
    Stripes {
        values: Vec<f64>,
        #[serde(default)]
        axis: usize,
    },
    /// Two-value parity coloring of the unit cells.
    Checkerboard { values: [f64; 2] },
    /// Independent uniform weight per unit cell.
    IidUniform { lo: f64, hi: f64 },
    /// Deterministic anisotropic weight `lambda * sqrt(coeff (nu.e1)^2 + 1)`.
    AnisotropicPsi {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default = "eight")]
        coeff: f64,
    },
    /// Scalar base family multiplied by the same anisotropic factor.
    Product {
        base: Box<FamilyConfig>,
        #[serde(default = "eight")]
        coeff: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn eight() -> f64 {
    8.0
}

/// Complete field description: family, seed, optional ellipticity constant
/// and optional per-label-pair multipliers.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldConfig {
    #[serde(flatten)]
    pub family: FamilyConfig,
    pub seed: u64,
    /// Ellipticity constant; derived from the parameter ranges when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Symmetric `K x K` multiplier table for label pairs (diagonal unused).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_table: Option<Vec<Vec<f64>>>,
}

impl FamilyConfig {
    /// Range of the scalar part (before label multipliers).
    fn scalar_range(&self) -> Result<(f64, f64)> {
        match self {
            FamilyConfig::Constant { value } => {
                check_pos(*value)?;
                Ok((*value, *value))
            }
            FamilyConfig::Stripes { values, axis } => {
                if values.is_empty() {
                    return Err(Error::config("stripes need at least one value"));
                }
                if *axis >= 3 {
                    return Err(Error::config("stripes axis out of range"));
                }
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &v in values {
                    check_pos(v)?;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                Ok((lo, hi))
            }
            FamilyConfig::Checkerboard { values } => {
                check_pos(values[0])?;
                check_pos(values[1])?;
                Ok((values[0].min(values[1]), values[0].max(values[1])))
            }
            FamilyConfig::IidUniform { lo, hi } => {
                check_pos(*lo)?;
                check_pos(*hi)?;
                if lo > hi {
                    return Err(Error::config("iid_uniform needs lo <= hi"));
                }
                Ok((*lo, *hi))
            }
            FamilyConfig::AnisotropicPsi { lambda, coeff } => {
                check_pos(*lambda)?;
                if *coeff < 0.0 {
                    return Err(Error::config("psi coefficient must be nonnegative"));
                }
                let psi_max = (coeff + 1.0).sqrt();
                Ok((*lambda, *lambda * psi_max))
            }
            FamilyConfig::Product { base, coeff } => {
                if *coeff < 0.0 {
                    return Err(Error::config("psi coefficient must be nonnegative"));
                }
                if matches!(**base, FamilyConfig::AnisotropicPsi { .. } | FamilyConfig::Product { .. }) {
                    return Err(Error::config("product base must be a scalar family"));
                }
                let (lo, hi) = base.scalar_range()?;
                let psi_max = (coeff + 1.0).sqrt();
                Ok((lo, hi * psi_max))
            }
        }
    }

    /// Anisotropy coefficient of the `psi` factor, if any.
    fn psi_coeff(&self) -> Option<f64> {
        match self {
            FamilyConfig::AnisotropicPsi { coeff, .. } => Some(*coeff),
            FamilyConfig::Product { coeff, .. } => Some(*coeff),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyConfig::Constant { .. } => "constant",
            FamilyConfig::Stripes { .. } => "stripes",
            FamilyConfig::Checkerboard { .. } => "checkerboard",
            FamilyConfig::IidUniform { .. } => "iid_uniform",
            FamilyConfig::AnisotropicPsi { .. } => "anisotropic_psi",
            FamilyConfig::Product { .. } => "product",
        }
    }
}

fn check_pos(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config("field values must be positive and finite"))
    }
}

/// Realized stationary field. Immutable; evaluation is a pure function.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceTensionField {
    family: FamilyConfig,
    seed: u64,
    dim: usize,
    ellipticity: f64,
    label_table: Option<Vec<Vec<f64>>>,
    offset: IVec3,
}

/// Build a field from its configuration. The same `(config, dim)` always
/// produces identical evaluations.
pub fn make_field(config: &FieldConfig, dim: usize) -> Result<SurfaceTensionField> {
    if dim != 2 && dim != 3 {
        return Err(Error::config("field dimension must be 2 or 3"));
    }
    let (mut lo, mut hi) = config.family.scalar_range()?;
    if let Some(table) = &config.label_table {
        let k = table.len();
        if k < 2 {
            return Err(Error::config("label table needs at least two labels"));
        }
        let mut tlo = f64::INFINITY;
        let mut thi = f64::NEG_INFINITY;
        for (i, row) in table.iter().enumerate() {
            if row.len() != k {
                return Err(Error::config("label table must be square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                check_pos(v)?;
                if table[j][i] != v {
                    return Err(Error::config("label table must be symmetric"));
                }
                tlo = tlo.min(v);
                thi = thi.max(v);
            }
        }
        lo *= tlo;
        hi *= thi;
    }
    let c_min = hi.max(1.0 / lo);
    let ellipticity = match config.c {
        Some(c) => {
            if c < c_min - 1e-12 {
                return Err(Error::config(format!(
                    "ellipticity constant {c} too small for value range [{lo}, {hi}]"
                )));
            }
            c
        }
        None => c_min,
    };
    Ok(SurfaceTensionField {
        family: config.family.clone(),
        seed: config.seed,
        dim,
        ellipticity,
        label_table: config.label_table.clone(),
        offset: [0; 3],
    })
}

fn scalar_at(family: &FamilyConfig, seed: u64, dim: usize, cell: IVec3) -> f64 {
    match family {
        FamilyConfig::Constant { value } => *value,
        FamilyConfig::Stripes { values, axis } => {
            let n = values.len() as i64;
            values[cell[*axis].rem_euclid(n) as usize]
        }
        FamilyConfig::Checkerboard { values } => {
            let s: i64 = cell.iter().take(dim).sum();
            values[s.rem_euclid(2) as usize]
        }
        FamilyConfig::IidUniform { lo, hi } => lo + (hi - lo) * u01(cell_hash(seed, cell, dim)),
        FamilyConfig::AnisotropicPsi { lambda, .. } => *lambda,
        FamilyConfig::Product { base, .. } => scalar_at(base, seed, dim, cell),
    }
}

impl SurfaceTensionField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The ellipticity constant `c` with `1/c <= g <= c`.
    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    pub fn family_name(&self) -> &'static str {
        self.family.name()
    }

    pub fn label_table(&self) -> Option<&Vec<Vec<f64>>> {
        self.label_table.as_ref()
    }

    /// Number of labels the label table supports (if present).
    pub fn label_table_size(&self) -> Option<usize> {
        self.label_table.as_ref().map(|t| t.len())
    }

    /// Scalar part at the unit cell containing `x`.
    fn scalar(&self, x: Vec3) -> f64 {
        let mut cell = [0i64; 3];
        for j in 0..self.dim {
            cell[j] = (x[j].floor() as i64) + self.offset[j];
        }
        scalar_at(&self.family, self.seed, self.dim, cell)
    }

    fn psi(&self, nu: &UnitDirection) -> f64 {
        match self.family.psi_coeff() {
            Some(coeff) => {
                let ux = nu.unit()[0];
                (coeff * ux * ux + 1.0).sqrt()
            }
            None => 1.0,
        }
    }

    fn label_mult(&self, a: u8, b: u8) -> f64 {
        match &self.label_table {
            Some(t) => t[a as usize][b as usize],
            None => 1.0,
        }
    }

    /// Weight `g(x, a, b, nu)`.
    pub fn evaluate(&self, x: Vec3, a: u8, b: u8, nu: &UnitDirection) -> Result<f64> {
        if a == b {
            return Err(Error::domain("labels of an interface must differ"));
        }
        Ok(self.eval_unchecked(x, a, b, nu))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: Vec3, a: u8, b: u8, nu: &UnitDirection) -> f64 {
        debug_assert_ne!(a, b);
        self.scalar(x) * self.psi(nu) * self.label_mult(a, b)
    }

    /// Shifted field: `shift(f, z)` evaluated at `x` equals `f` at `x + z`,
    /// bit-exactly.
    pub fn shift(&self, z: IVec3) -> SurfaceTensionField {
        let mut out = self.clone();
        for j in 0..self.dim {
            out.offset[j] += z[j];
        }
        out
    }
}
