//! Lattice discretization of the interface energy.
//!
//! A problem region (an oriented cube or an oriented interval cuboid) is
//! covered by unit cells of the integer lattice. A label field assigns one
//! label to every cell of an axis-aligned bounding box around the region;
//! cells outside the region, and cells inside a boundary collar along the
//! constrained faces, are pinned to the rasterized planar jump datum.
//!
//! The discrete energy sums, over unordered cell pairs `{p, p+e}` from a
//! weighted stencil whose midpoint lies in the region, the facet weight
//! `w_e * g(midpoint, u(p+e), u(p), e/|e|)` whenever the two labels differ.
//! Locating each pair at its midpoint makes the energy additive over
//! tangentially half-open sub-regions, which is what the subadditivity and
//! gluing identities rely on.

use crate::error::{Error, Result};
use crate::geometry::{
    iadd, IVec3, JumpDatum, OrientedCube, OrientedIntervalRegion, UnitDirection, Vec3,
};
use crate::media::SurfaceTensionField;
use crate::sum::ExactSum;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Fixed-point scale for integerized pair weights.
pub const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

/// One stencil direction: an integer offset with a positive weight. The
/// interface normal attributed to a pair is the normalized offset.
#[derive(Clone, Debug)]
pub struct StencilOffset {
    pub offset: IVec3,
    pub weight: f64,
    pub normal: UnitDirection,
    pub length: f64,
}

/// Weighted neighborhood defining the discrete perimeter. Offsets are stored
/// as a canonical half-set (lexicographically positive); the negated twins
/// are implied with equal weight.
#[derive(Clone, Debug)]
pub struct Stencil {
    name: String,
    dim: usize,
    offsets: Vec<StencilOffset>,
}

impl Stencil {
    fn from_classes(name: &str, dim: usize, classes: &[(Vec<IVec3>, f64)]) -> Stencil {
        let mut offsets = Vec::new();
        for (members, w) in classes {
            for &e in members {
                let normal = UnitDirection::from_ints(dim, e).expect("stencil offset");
                let length = ((e[0] * e[0] + e[1] * e[1] + e[2] * e[2]) as f64).sqrt();
                offsets.push(StencilOffset { offset: e, weight: *w, normal, length });
            }
        }
        Stencil { name: name.to_string(), dim, offsets }
    }

    /// Facet (nearest-neighbor) stencil with unit weights; its anisotropy is
    /// the l1 norm.
    pub fn facet(dim: usize) -> Stencil {
        let axes: Vec<IVec3> = (0..dim)
            .map(|j| {
                let mut e = [0i64; 3];
                e[j] = 1;
                e
            })
            .collect();
        Stencil::from_classes("facet", dim, &[(axes, 1.0)])
    }

    /// Near-isotropic stencil: radius 1 is the facet stencil, radius 2 adds
    /// diagonal and knight offsets with weights fitted so that
    /// `max_nu |phi(nu) - 1|` is minimized and `phi(e1) = 1` exactly.
    pub fn crofton(radius: u32, dim: usize) -> Result<Stencil> {
        match (radius, dim) {
            (1, _) => Ok(Stencil::facet(dim)),
            (2, 2) => Ok(fit_weights(
                "crofton16",
                2,
                &[
                    vec![[1, 0, 0], [0, 1, 0]],
                    vec![[1, 1, 0], [1, -1, 0]],
                    vec![[2, 1, 0], [2, -1, 0], [1, 2, 0], [1, -2, 0]],
                ],
            )),
            (2, 3) => Ok(fit_weights(
                "crofton26",
                3,
                &[
                    vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                    vec![
                        [1, 1, 0],
                        [1, -1, 0],
                        [1, 0, 1],
                        [1, 0, -1],
                        [0, 1, 1],
                        [0, 1, -1],
                    ],
                    vec![[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]],
                ],
            )),
            _ => Err(Error::config(format!(
                "unsupported stencil radius {radius} in dimension {dim}"
            ))),
        }
    }

    /// Eight-neighborhood (facet plus diagonals) with fitted weights.
    pub fn eight_neighborhood(dim: usize) -> Result<Stencil> {
        if dim != 2 {
            return Err(Error::config("8-neighborhood stencil is two-dimensional"));
        }
        Ok(fit_weights(
            "crofton8",
            2,
            &[vec![[1, 0, 0], [0, 1, 0]], vec![[1, 1, 0], [1, -1, 0]]],
        ))
    }

    /// Stencil lookup by config name.
    pub fn by_name(name: &str, dim: usize) -> Result<Stencil> {
        match name {
            "facet" => Ok(Stencil::facet(dim)),
            "crofton8" => Stencil::eight_neighborhood(dim),
            "crofton16" | "crofton26" | "crofton2" => Stencil::crofton(2, dim),
            other => Err(Error::config(format!("unknown stencil {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> &[StencilOffset] {
        &self.offsets
    }

    /// Largest offset length; boundary collars must be at least this wide.
    pub fn max_offset_length(&self) -> f64 {
        self.offsets.iter().map(|o| o.length).fold(0.0, f64::max)
    }

    /// Default collar width: the smallest integer width covering the reach
    /// of every offset.
    pub fn default_collar(&self) -> u32 {
        self.max_offset_length().ceil() as u32
    }

    /// Induced anisotropy `phi(nu) = sum_e w_e |nu . e|` over the half-set,
    /// for a unit vector `nu`.
    pub fn anisotropy(&self, nu: Vec3) -> f64 {
        self.offsets
            .iter()
            .map(|o| {
                let d = nu[0] * o.offset[0] as f64
                    + nu[1] * o.offset[1] as f64
                    + nu[2] * o.offset[2] as f64;
                o.weight * d.abs()
            })
            .sum()
    }

    /// Largest deviation of the anisotropy from 1 over a direction sweep.
    pub fn max_anisotropy_error(&self, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        for nu in direction_sweep(self.dim, samples) {
            worst = worst.max((self.anisotropy(nu) - 1.0).abs());
        }
        worst
    }
}

fn direction_sweep(dim: usize, samples: usize) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(samples);
    if dim == 2 {
        for i in 0..samples {
            let th = std::f64::consts::PI * i as f64 / samples as f64;
            out.push([th.cos(), th.sin(), 0.0]);
        }
    } else {
        // Spherical Fibonacci sweep.
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for i in 0..samples {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
            let r = (1.0 - z * z).sqrt();
            let th = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            out.push([r * th.cos(), r * th.sin(), z]);
        }
    }
    out
}

/// Least-squares fit of per-class weights to unit anisotropy, polished by
/// Lawson iterations toward the minimax fit, then rescaled so that
/// `phi(e1) = 1` exactly.
fn fit_weights(name: &str, dim: usize, classes: &[Vec<IVec3>]) -> Stencil {
    let n_classes = classes.len();
    let dirs = direction_sweep(dim, if dim == 2 { 720 } else { 800 });
    // Feature f_c(nu) = sum over class members of |nu . e|.
    let feat = |nu: Vec3, c: usize| -> f64 {
        classes[c]
            .iter()
            .map(|e| (nu[0] * e[0] as f64 + nu[1] * e[1] as f64 + nu[2] * e[2] as f64).abs())
            .sum()
    };
    let mut lambda = vec![1.0f64; dirs.len()];
    let mut w = vec![0.0f64; n_classes];
    for _ in 0..60 {
        // Weighted normal equations.
        let mut a = vec![0.0f64; n_classes * n_classes];
        let mut b = vec![0.0f64; n_classes];
        for (k, nu) in dirs.iter().enumerate() {
            let f: Vec<f64> = (0..n_classes).map(|c| feat(*nu, c)).collect();
            for i in 0..n_classes {
                b[i] += lambda[k] * f[i];
                for j in 0..n_classes {
                    a[i * n_classes + j] += lambda[k] * f[i] * f[j];
                }
            }
        }
        w = solve_dense(&mut a, &mut b, n_classes);
        // Lawson update: emphasize directions with large residuals.
        let mut total = 0.0;
        for (k, nu) in dirs.iter().enumerate() {
            let phi: f64 = (0..n_classes).map(|c| w[c] * feat(*nu, c)).sum();
            lambda[k] *= (phi - 1.0).abs().max(1e-9);
            total += lambda[k];
        }
        for l in lambda.iter_mut() {
            *l /= total / dirs.len() as f64;
        }
    }
    // Exact normalization phi(e1) = 1.
    let phi_e1: f64 = (0..n_classes).map(|c| w[c] * feat([1.0, 0.0, 0.0], c)).sum();
    for v in w.iter_mut() {
        *v /= phi_e1;
        assert!(*v > 0.0, "crofton fit produced a nonpositive weight");
    }
    let with_weights: Vec<(Vec<IVec3>, f64)> = classes
        .iter()
        .zip(w.iter())
        .map(|(m, &wc)| (m.clone(), wc))
        .collect();
    Stencil::from_classes(name, dim, &with_weights)
}

fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Vec<f64> {
    // Gaussian elimination with partial pivoting on a tiny system.
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = s / a[r * n + r];
    }
    x
}

/// Boundary-condition mode: datum imposed near the whole boundary, or only
/// near the two faces orthogonal to the jump normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcMode {
    Full,
    TopBottom,
}

impl BcMode {
    pub fn name(&self) -> &'static str {
        match self {
            BcMode::Full => "full",
            BcMode::TopBottom => "top_bottom",
        }
    }
}

/// Minimizer choice carried by a problem spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Brute,
    Mincut,
    Alpha,
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Brute => "brute",
            SolverChoice::Mincut => "mincut",
            SolverChoice::Alpha => "alpha",
        }
    }
}

/// Problem region: an oriented cube or an oriented interval cuboid.
#[derive(Clone, Debug)]
pub enum Region {
    Cube(OrientedCube),
    Interval(OrientedIntervalRegion),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Cube(c) => c.dim(),
            Region::Interval(r) => r.dim(),
        }
    }

    /// Cell ownership: the cell center lies strictly inside the region.
    pub fn contains_center(&self, cell: IVec3) -> bool {
        match self {
            Region::Cube(c) => c.contains(cell_center(cell, c.dim())),
            Region::Interval(r) => r.contains_open_two_x(two_center(cell, r.dim())),
        }
    }

    /// Whether pair counting additionally requires both cells of a pair to
    /// lie in the region. Cube problems count only interfaces between their
    /// own cells, so unconstrained faces stay genuinely free; interval
    /// regions extend competitors by the datum, which keeps the process
    /// exactly subadditive under partitions.
    pub fn pair_needs_both_cells(&self) -> bool {
        matches!(self, Region::Cube(_))
    }

    /// Interface counting: membership of a pair midpoint, given as `2 * mid`.
    /// Interval regions use half-open tangential bounds so that partitions
    /// of the index box split the counted pairs exactly.
    pub fn contains_midpoint2(&self, mid2: IVec3) -> bool {
        match self {
            Region::Cube(c) => {
                let d = c.dim();
                let mut x = [0.0; 3];
                for j in 0..d {
                    x[j] = mid2[j] as f64 * 0.5;
                }
                c.contains(x)
            }
            Region::Interval(r) => r.contains_halfopen_two_x(mid2),
        }
    }

    /// Distance from the cell center to the nearest constrained face.
    pub fn constrained_face_distance(&self, cell: IVec3, bc: BcMode) -> f64 {
        match self {
            Region::Cube(c) => {
                let d = c.dim();
                let x = cell_center(cell, d);
                match bc {
                    BcMode::Full => (0..d)
                        .map(|j| c.face_distance(x, j))
                        .fold(f64::INFINITY, f64::min),
                    BcMode::TopBottom => c.face_distance(x, d - 1),
                }
            }
            Region::Interval(r) => {
                // Interval problems always impose the datum near the whole
                // boundary.
                r.boundary_distance_two_x(two_center(cell, r.dim()))
            }
        }
    }

    pub fn cell_bounds(&self, margin: i64) -> (IVec3, IVec3) {
        match self {
            Region::Cube(c) => {
                let d = c.dim();
                let mut lo = [0i64; 3];
                let mut hi = [0i64; 3];
                for i in 0..d {
                    let mut reach = 0.0;
                    for j in 0..d {
                        reach += c.frame_axis(j)[i].abs();
                    }
                    reach *= 0.5 * c.side();
                    let ci = c.center()[i];
                    lo[i] = (ci - reach).floor() as i64 - margin - 1;
                    hi[i] = (ci + reach).ceil() as i64 + margin + 1;
                }
                (lo, hi)
            }
            Region::Interval(r) => r.cell_bounds(margin),
        }
    }

    /// Normalizing power `side^(d-1)` for cubes, `m_nu^(d-1)` for interval
    /// regions.
    pub fn normalizer(&self) -> f64 {
        match self {
            Region::Cube(c) => c.side().powi(c.dim() as i32 - 1),
            Region::Interval(r) => (r.scale() as f64).powi(r.dim() as i32 - 1),
        }
    }
}

#[inline]
fn cell_center(cell: IVec3, dim: usize) -> Vec3 {
    let mut x = [0.0; 3];
    for j in 0..dim {
        x[j] = cell[j] as f64 + 0.5;
    }
    x
}

#[inline]
fn two_center(cell: IVec3, dim: usize) -> IVec3 {
    let mut x = [0i64; 3];
    for j in 0..dim {
        x[j] = 2 * cell[j] + 1;
    }
    x
}

/// Label assignment on the cells of a bounding box around a region, with a
/// free mask for the cells the minimizer may change.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelField {
    dim: usize,
    lo: IVec3,
    hi: IVec3,
    extent: [usize; 3],
    labels: Vec<u8>,
    free: Vec<bool>,
    inside: Vec<bool>,
    k: u8,
}

impl LabelField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_count(&self) -> u8 {
        self.k
    }

    pub fn bounds(&self) -> (IVec3, IVec3) {
        (self.lo, self.hi)
    }

    #[inline]
    pub fn index(&self, cell: IVec3) -> Option<usize> {
        let mut idx = 0usize;
        for j in (0..self.dim).rev() {
            if cell[j] < self.lo[j] || cell[j] > self.hi[j] {
                return None;
            }
            idx = idx * self.extent[j] + (cell[j] - self.lo[j]) as usize;
        }
        Some(idx)
    }

    #[inline]
    pub fn get(&self, cell: IVec3) -> u8 {
        self.labels[self.index(cell).expect("cell outside label field box")]
    }

    pub fn set(&mut self, cell: IVec3, label: u8) {
        assert!(label < self.k);
        let i = self.index(cell).expect("cell outside label field box");
        assert!(self.free[i], "cannot relabel a clamped cell");
        self.labels[i] = label;
    }

    pub fn is_free(&self, cell: IVec3) -> bool {
        self.index(cell).map(|i| self.free[i]).unwrap_or(false)
    }

    pub fn is_inside(&self, cell: IVec3) -> bool {
        self.index(cell).map(|i| self.inside[i]).unwrap_or(false)
    }

    /// Cells owned by the region, in lexicographic order.
    pub fn inside_cells(&self) -> Vec<IVec3> {
        self.iter_cells().filter(|&c| self.is_inside(c)).collect()
    }

    /// Free (variable) cells, in lexicographic order.
    pub fn free_cells(&self) -> Vec<IVec3> {
        self.iter_cells().filter(|&c| self.is_free(c)).collect()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = IVec3> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        let dim = self.dim;
        let zr = if dim == 3 { lo[2]..=hi[2] } else { 0..=0 };
        zr.flat_map(move |z| {
            (lo[1]..=hi[1])
                .flat_map(move |y| (lo[0]..=hi[0]).map(move |x| [x, y, z]))
        })
    }

    /// Portable grey-map snapshot of a two-dimensional label field (one grey
    /// level per label; cells outside the region render black).
    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        assert_eq!(self.dim, 2, "PGM export is two-dimensional");
        let w = self.extent[0];
        let h = self.extent[1];
        writeln!(out, "P5\n{} {}\n255", w, h)?;
        // Distinct grey per label in [20, 255]; outside cells stay black.
        let span = 235 / (self.k.max(2) - 1) as u32;
        let mut row = vec![0u8; w];
        for y in (self.lo[1]..=self.hi[1]).rev() {
            for x in self.lo[0]..=self.hi[0] {
                let cell = [x, y, 0];
                let i = self.index(cell).unwrap();
                row[(x - self.lo[0]) as usize] = if self.inside[i] {
                    (20 + self.labels[i] as u32 * span) as u8
                } else {
                    0
                };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    /// Flat binary dump with a JSON header line, for three-dimensional
    /// fields.
    pub fn write_raw3d<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        assert_eq!(self.dim, 3, "raw export is three-dimensional");
        writeln!(
            out,
            "{{\"lo\":[{},{},{}],\"extent\":[{},{},{}],\"labels\":{}}}",
            self.lo[0], self.lo[1], self.lo[2], self.extent[0], self.extent[1], self.extent[2], self.k
        )?;
        out.write_all(&self.labels)?;
        Ok(())
    }
}

/// Rasterize the planar jump datum over the region's bounding box and flag
/// the clamped collar for the given boundary mode.
pub fn rasterize_datum(
    region: &Region,
    datum: &JumpDatum,
    stencil: &Stencil,
    collar_width: u32,
    bc: BcMode,
    label_count: u8,
) -> Result<LabelField> {
    let dim = region.dim();
    let (a, b) = datum.labels();
    if a >= label_count || b >= label_count {
        return Err(Error::domain("datum labels outside label set"));
    }
    if (collar_width as f64) < stencil.max_offset_length() {
        return Err(Error::domain(format!(
            "collar width {collar_width} narrower than stencil reach {}",
            stencil.max_offset_length()
        )));
    }
    if let Region::Cube(c) = region {
        if 2.0 * collar_width as f64 > c.side() {
            return Err(Error::domain("collar thicker than the cube"));
        }
    }
    let margin = stencil.default_collar() as i64;
    let (lo, hi) = region.cell_bounds(margin);
    let mut extent = [1usize; 3];
    for j in 0..dim {
        extent[j] = (hi[j] - lo[j] + 1) as usize;
    }
    let n = extent[0] * extent[1] * extent[2];
    let mut field = LabelField {
        dim,
        lo,
        hi,
        extent,
        labels: vec![0; n],
        free: vec![false; n],
        inside: vec![false; n],
        k: label_count,
    };
    for cell in field.iter_cells().collect::<Vec<_>>() {
        let i = field.index(cell).unwrap();
        field.labels[i] = datum.eval_two_x(two_center(cell, dim));
        let inside = region.contains_center(cell);
        field.inside[i] = inside;
        if inside {
            field.free[i] = region.constrained_face_distance(cell, bc) >= collar_width as f64;
        }
    }
    Ok(field)
}

/// Clamped collar of a cube problem: the cells pinned to the datum, in
/// lexicographic order.
pub fn boundary_collar(spec: &CellProblemSpec) -> Result<Vec<IVec3>> {
    spec.validate()?;
    let region = Region::Cube(spec.cube.clone());
    let base = rasterize_datum(
        &region,
        &spec.datum,
        &spec.stencil,
        spec.collar_width,
        spec.bc,
        spec.label_count,
    )?;
    Ok(base
        .inside_cells()
        .into_iter()
        .filter(|&c| !base.is_free(c))
        .collect())
}

/// Discrete interface energy of `labels` over the region, with exactly
/// rounded floating-point accumulation.
pub fn discrete_energy(
    field: &SurfaceTensionField,
    labels: &LabelField,
    stencil: &Stencil,
    region: &Region,
) -> f64 {
    let mut acc = ExactSum::new();
    for_each_active_pair(labels, stencil, region, |p, q, off, mid| {
        let (lp, lq) = (labels.get(p), labels.get(q));
        if lp != lq {
            acc.add(off.weight * field.eval_unchecked(mid, lq, lp, &off.normal));
        }
    });
    acc.value()
}

/// Discrete energy on the integerized weights used by the solvers.
pub fn discrete_energy_int(
    field: &SurfaceTensionField,
    labels: &LabelField,
    stencil: &Stencil,
    region: &Region,
) -> u64 {
    let mut total = 0u64;
    for_each_active_pair(labels, stencil, region, |p, q, off, mid| {
        let (lp, lq) = (labels.get(p), labels.get(q));
        if lp != lq {
            total += integer_weight(off.weight * field.eval_unchecked(mid, lq, lp, &off.normal));
        }
    });
    total
}

/// Unit-weight perimeter of the current labeling (the energy with `g = 1`);
/// for the rasterized datum this is the sharp lattice bound on any admissible
/// minimum after multiplication by the ellipticity constant.
pub fn unit_perimeter(labels: &LabelField, stencil: &Stencil, region: &Region) -> f64 {
    let mut acc = ExactSum::new();
    for_each_active_pair(labels, stencil, region, |p, q, off, _| {
        if labels.get(p) != labels.get(q) {
            acc.add(off.weight);
        }
    });
    acc.value()
}

/// Integerize one pair weight: fixed-point at `WEIGHT_SCALE`, rounded
/// half-even, so every solver sees bit-identical integers for the same
/// problem and exact optimality comparisons are meaningful.
#[inline]
pub fn integer_weight(v: f64) -> u64 {
    let w = (v * WEIGHT_SCALE).round_ties_even();
    debug_assert!(w >= 0.0 && w < u64::MAX as f64 / 4.0);
    w as u64
}

/// Visit every unordered stencil pair whose midpoint lies in the region.
/// The visitor receives both cells, the offset, and the midpoint.
pub fn for_each_active_pair<F: FnMut(IVec3, IVec3, &StencilOffset, Vec3)>(
    labels: &LabelField,
    stencil: &Stencil,
    region: &Region,
    mut visit: F,
) {
    let dim = labels.dim();
    let (lo, hi) = labels.bounds();
    let both_inside = region.pair_needs_both_cells();
    let mut cell = lo;
    loop {
        for off in stencil.offsets() {
            let q = iadd(cell, off.offset);
            let mut mid2 = [0i64; 3];
            for j in 0..dim {
                mid2[j] = 2 * cell[j] + 1 + off.offset[j];
            }
            if both_inside && !(labels.is_inside(cell) && labels.is_inside(q)) {
                continue;
            }
            if !region.contains_midpoint2(mid2) {
                continue;
            }
            debug_assert!(labels.index(q).is_some(), "bounding box too small");
            let mid = [
                mid2[0] as f64 * 0.5,
                mid2[1] as f64 * 0.5,
                mid2[2] as f64 * 0.5,
            ];
            visit(cell, q, off, mid);
        }
        // Lexicographic advance.
        let mut j = 0;
        loop {
            cell[j] += 1;
            if cell[j] <= hi[j] {
                break;
            }
            cell[j] = lo[j];
            j += 1;
            if j == dim {
                return;
            }
        }
    }
}

/// Everything needed to pose and solve one cube cell problem.
#[derive(Clone, Debug)]
pub struct CellProblemSpec {
    pub field: SurfaceTensionField,
    pub cube: OrientedCube,
    pub datum: JumpDatum,
    pub bc: BcMode,
    pub collar_width: u32,
    pub stencil: Stencil,
    pub label_count: u8,
    pub solver: SolverChoice,
    pub max_sweeps: u32,
    pub metric_override: bool,
}

impl CellProblemSpec {
    /// Validate cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if self.label_count < 2 {
            return Err(Error::domain("need at least two labels"));
        }
        let (a, b) = self.datum.labels();
        if a >= self.label_count || b >= self.label_count {
            return Err(Error::domain("datum labels outside label set"));
        }
        if let Some(k) = self.field.label_table_size() {
            if k < self.label_count as usize {
                return Err(Error::config("label table smaller than label set"));
            }
        }
        if self.stencil.dim() != self.cube.dim() || self.datum.dir().dim() != self.cube.dim() {
            return Err(Error::domain("dimension mismatch in problem spec"));
        }
        Ok(())
    }
}
