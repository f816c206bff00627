//! Oriented cubes, hyperplanes, pure-jump data and rational directions.
//!
//! Directions live on the unit sphere but are canonically represented by an
//! integer vector with gcd 1 (the "rational snap"), which makes direction
//! equality, hyperplane side tests at half-integer points, and the shift
//! arithmetic of oriented interval regions exact.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Maximum spatial dimension handled by the fixed-size vector types.
pub const MAX_DIM: usize = 3;

/// Per-component cap for snapped integer directions.
pub const SNAP_MAX: i64 = 10_000;

pub type Vec3 = [f64; 3];
pub type IVec3 = [i64; 3];
pub type Rat = Ratio<i128>;

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn iadd(a: IVec3, b: IVec3) -> IVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Unit direction with a canonical integer representation.
///
/// Two directions compare equal iff their snapped integer vectors agree, so
/// `nu` and `-nu` are distinct values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitDirection {
    dim: usize,
    ints: IVec3,
}

impl UnitDirection {
    /// Canonical direction from an integer vector (gcd is divided out).
    pub fn from_ints(dim: usize, v: [i64; 3]) -> Result<Self> {
        check_dim(dim)?;
        let mut ints = [0i64; 3];
        ints[..dim].copy_from_slice(&v[..dim]);
        if ints.iter().all(|&c| c == 0) {
            return Err(Error::domain("direction must be nonzero"));
        }
        let mut g = 0i64;
        for &c in ints.iter().take(dim) {
            g = g.gcd(&c.abs());
        }
        for c in ints.iter_mut().take(dim) {
            *c /= g;
        }
        if ints.iter().any(|&c| c.abs() > SNAP_MAX) {
            return Err(Error::domain(format!(
                "direction components exceed snap cap {SNAP_MAX}"
            )));
        }
        Ok(UnitDirection { dim, ints })
    }

    /// Snap an arbitrary nonzero vector to the nearest representable
    /// rational direction.
    pub fn snap(dim: usize, v: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if v.len() != dim {
            return Err(Error::domain("direction length does not match dimension"));
        }
        let mut u = [0f64; 3];
        u[..dim].copy_from_slice(v);
        let n = norm(u);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::domain("direction must be nonzero and finite"));
        }
        let u = scale(u, 1.0 / n);

        let mut best: Option<(f64, IVec3)> = None;
        for q in 1..=SNAP_MAX {
            let mut k = [0i64; 3];
            let mut ok = true;
            for j in 0..dim {
                let r = (u[j] * q as f64).round();
                if r.abs() > SNAP_MAX as f64 {
                    ok = false;
                    break;
                }
                k[j] = r as i64;
            }
            if !ok {
                break;
            }
            if k.iter().all(|&c| c == 0) {
                continue;
            }
            let mut g = 0i64;
            for &c in k.iter().take(dim) {
                g = g.gcd(&c.abs());
            }
            for c in k.iter_mut().take(dim) {
                *c /= g;
            }
            let kn = norm([k[0] as f64, k[1] as f64, k[2] as f64]);
            let cos = dot(u, [k[0] as f64, k[1] as f64, k[2] as f64]) / kn;
            let better = match &best {
                None => true,
                Some((bc, bk)) => cos > *bc + 1e-18 || (cos >= *bc - 1e-18 && k < *bk),
            };
            if better {
                let exact = (1.0 - cos) < 1e-15;
                best = Some((cos, k));
                if exact {
                    break;
                }
            }
        }
        let (_, ints) = best.ok_or_else(|| Error::domain("direction cannot be snapped"))?;
        Ok(UnitDirection { dim, ints })
    }

    /// The coordinate direction `e_j` (0-based).
    pub fn axis(dim: usize, j: usize) -> Self {
        assert!(j < dim && dim <= MAX_DIM);
        let mut ints = [0i64; 3];
        ints[j] = 1;
        UnitDirection { dim, ints }
    }

    pub fn neg(&self) -> Self {
        let mut ints = self.ints;
        for c in ints.iter_mut().take(self.dim) {
            *c = -*c;
        }
        UnitDirection { dim: self.dim, ints }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ints(&self) -> IVec3 {
        self.ints
    }

    /// Floating point unit vector.
    pub fn unit(&self) -> Vec3 {
        let v = [self.ints[0] as f64, self.ints[1] as f64, self.ints[2] as f64];
        scale(v, 1.0 / norm(v))
    }

    /// Squared integer length of the canonical representative.
    pub fn ints_norm2(&self) -> i64 {
        self.ints.iter().map(|&c| c * c).sum()
    }

    /// Integer length when the direction has rational unit components,
    /// i.e. when the squared length is a perfect square.
    pub fn lattice_norm(&self) -> Option<i64> {
        let n2 = self.ints_norm2();
        let r = (n2 as f64).sqrt().round() as i64;
        for c in [r - 1, r, r + 1] {
            if c > 0 && c * c == n2 {
                return Some(c);
            }
        }
        None
    }

    /// True iff this direction lies on the rational unit sphere, so that an
    /// exact rational orientation matrix exists.
    pub fn is_lattice_rational(&self) -> bool {
        self.lattice_norm().is_some()
    }

    fn is_neg_last_axis(&self) -> bool {
        (0..self.dim).all(|j| self.ints[j] == if j + 1 == self.dim { -1 } else { 0 })
    }

    /// Exact sign of `k . (x - anchor)` where `two_x = 2x` and
    /// `two_anchor = 2 anchor` are integer vectors.
    pub fn side_of_hyperplane(&self, two_x: IVec3, two_anchor: IVec3) -> i64 {
        let mut s: i128 = 0;
        for j in 0..self.dim {
            s += self.ints[j] as i128 * (two_x[j] - two_anchor[j]) as i128;
        }
        s.signum() as i64
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::domain("dimension must be 2 or 3"))
    }
}

/// Orthogonal matrix `O` with `O e_d = nu`, as columns `O[.][j] = O e_j`.
///
/// For `nu = -e_d` the map is the point reflection `-x`; otherwise it is the
/// reflection through the bisector of `e_d` and `nu`, which keeps all entries
/// rational for rational unit directions.
pub fn orientation_matrix(nu: &UnitDirection) -> [[f64; 3]; 3] {
    let d = nu.dim();
    let mut m = [[0.0; 3]; 3];
    // Identity padding outside the active dimension.
    for j in d..MAX_DIM {
        m[j][j] = 1.0;
    }
    if nu.is_neg_last_axis() {
        for (j, row) in m.iter_mut().enumerate().take(d) {
            row[j] = -1.0;
        }
        return m;
    }
    let u = nu.unit();
    let mut w = u;
    w[d - 1] += 1.0;
    let wn2 = dot(w, w);
    for i in 0..d {
        for j in 0..d {
            m[i][j] = 2.0 * w[i] * w[j] / wn2 - if i == j { 1.0 } else { 0.0 };
        }
    }
    m
}

/// Exact rational orientation matrix; requires a rational unit direction.
pub fn orientation_matrix_rational(nu: &UnitDirection) -> Result<[[Rat; 3]; 3]> {
    let d = nu.dim();
    let n = nu.lattice_norm().ok_or_else(|| {
        Error::domain("direction does not lie on the rational unit sphere")
    })? as i128;
    let zero = Rat::from_integer(0);
    let one = Rat::from_integer(1);
    let mut m = [[zero; 3]; 3];
    for j in d..MAX_DIM {
        m[j][j] = one;
    }
    if nu.is_neg_last_axis() {
        for (j, row) in m.iter_mut().enumerate().take(d) {
            row[j] = -one;
        }
        return Ok(m);
    }
    let k = nu.ints();
    // w = k + n e_d, |w|^2 = 2 n (n + k_d); entries (w_i w_j)/(n (n + k_d)) - delta.
    let den = n * (n + k[d - 1] as i128);
    for i in 0..d {
        let wi = k[i] as i128 + if i == d - 1 { n } else { 0 };
        for j in 0..d {
            let wj = k[j] as i128 + if j == d - 1 { n } else { 0 };
            let delta = if i == j { one } else { zero };
            m[i][j] = Rat::new(wi * wj, den) - delta;
        }
    }
    Ok(m)
}

/// Smallest positive integer `m` such that `m * O_nu (z, 0)` is an integer
/// vector for every integer `z`.
pub fn rational_direction_scale(nu: &UnitDirection) -> Result<i64> {
    let m = orientation_matrix_rational(nu)?;
    let d = nu.dim();
    let mut l: i128 = 1;
    for j in 0..d - 1 {
        for row in m.iter().take(d) {
            l = l.lcm(row[j].denom());
        }
    }
    i64::try_from(l).map_err(|_| Error::domain("direction scale overflows i64"))
}

/// Closed-form constant bounding the distance to the intersection of two
/// transversal hyperplanes: a point within `rho` of both is within
/// `c(nu1, nu2) * rho` of their intersection.
pub fn hyperplane_distance_constant(nu1: &UnitDirection, nu2: &UnitDirection) -> Result<f64> {
    if nu1.dim() != nu2.dim() {
        return Err(Error::domain("directions must share a dimension"));
    }
    // Exact parallelism test on the integer representatives.
    let a = nu1.ints();
    let b = nu2.ints();
    let cross = [
        a[1] as i128 * b[2] as i128 - a[2] as i128 * b[1] as i128,
        a[2] as i128 * b[0] as i128 - a[0] as i128 * b[2] as i128,
        a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128,
    ];
    if cross.iter().all(|&c| c == 0) {
        return Err(Error::domain("hyperplane normals are parallel"));
    }
    let c = dot(nu1.unit(), nu2.unit());
    Ok((1.0 + 4.0 / (1.0 - c * c)).sqrt())
}

/// Cube of side `t` centered at `center` whose last frame axis is `nu`.
#[derive(Clone, Debug)]
pub struct OrientedCube {
    center: Vec3,
    dir: UnitDirection,
    side: f64,
    frame: [[f64; 3]; 3],
}

impl OrientedCube {
    pub fn new(center: Vec3, dir: UnitDirection, side: f64) -> Result<Self> {
        if side <= 0.0 || !side.is_finite() {
            return Err(Error::domain("cube side must be positive"));
        }
        let frame = orientation_matrix(&dir);
        Ok(OrientedCube { center, dir, side, frame })
    }

    /// Cube whose frame is the standard one composed with a quarter turn of
    /// the tangential plane; probes the frame independence of cell-problem
    /// limits in d = 3 (in d = 2 the tangential axis is unique up to sign,
    /// so the cube set cannot change).
    pub fn new_with_tangential_quarter_turn(
        center: Vec3,
        dir: UnitDirection,
        side: f64,
    ) -> Result<Self> {
        if dir.dim() != 3 {
            return Err(Error::domain("tangential quarter turn needs d = 3"));
        }
        let mut cube = Self::new(center, dir, side)?;
        let c0 = cube.frame_axis(0);
        let c1 = cube.frame_axis(1);
        for i in 0..3 {
            cube.frame[i][0] = c1[i];
            cube.frame[i][1] = -c0[i];
        }
        Ok(cube)
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn dir(&self) -> &UnitDirection {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    /// Frame axis `nu_j` (column `j` of the orientation matrix).
    pub fn frame_axis(&self, j: usize) -> Vec3 {
        [self.frame[0][j], self.frame[1][j], self.frame[2][j]]
    }

    /// Coordinates of `x` in the cube frame, relative to the center.
    pub fn frame_coords(&self, x: Vec3) -> Vec3 {
        let r = sub(x, self.center);
        let mut y = [0.0; 3];
        for (j, yj) in y.iter_mut().enumerate().take(self.dim()) {
            *yj = dot(r, self.frame_axis(j));
        }
        y
    }

    /// Membership test `|(x - center) . nu_j| < t/2` for all frame axes.
    pub fn contains(&self, x: Vec3) -> bool {
        let y = self.frame_coords(x);
        (0..self.dim()).all(|j| y[j].abs() < 0.5 * self.side)
    }

    /// Minimum distance from `x` to the two faces orthogonal to frame axis
    /// `j` (negative outside the slab).
    pub fn face_distance(&self, x: Vec3, j: usize) -> f64 {
        let y = self.frame_coords(x);
        0.5 * self.side - y[j].abs()
    }
}

/// Piecewise constant datum jumping across the hyperplane through `anchor`
/// orthogonal to `dir`: label `a` strictly on the positive side, `b`
/// elsewhere (including the hyperplane itself).
#[derive(Clone, Debug)]
pub struct JumpDatum {
    a: u8,
    b: u8,
    dir: UnitDirection,
    anchor: Vec3,
}

impl JumpDatum {
    pub fn new(a: u8, b: u8, dir: UnitDirection, anchor: Vec3) -> Result<Self> {
        if a == b {
            return Err(Error::domain("jump datum labels must differ"));
        }
        Ok(JumpDatum { a, b, dir, anchor })
    }

    pub fn labels(&self) -> (u8, u8) {
        (self.a, self.b)
    }

    pub fn dir(&self) -> &UnitDirection {
        &self.dir
    }

    pub fn anchor(&self) -> Vec3 {
        self.anchor
    }

    /// Datum with the roles of the labels and the direction reversed; as a
    /// function it describes the same two-phase configuration up to the
    /// hyperplane itself.
    pub fn reversed(&self) -> JumpDatum {
        JumpDatum {
            a: self.b,
            b: self.a,
            dir: self.dir.neg(),
            anchor: self.anchor,
        }
    }

    pub fn eval(&self, x: Vec3) -> u8 {
        if dot(sub(x, self.anchor), self.dir.unit()) > 0.0 {
            self.a
        } else {
            self.b
        }
    }

    /// Exact evaluation at a half-integer point given as `2x`, provided the
    /// anchor is itself half-integer (which holds for all lattice problems).
    pub fn eval_two_x(&self, two_x: IVec3) -> u8 {
        let mut two_anchor = [0i64; 3];
        let mut exact = true;
        for j in 0..self.dir.dim() {
            let t = 2.0 * self.anchor[j];
            if t.fract() == 0.0 && t.abs() < 4.0e18 {
                two_anchor[j] = t as i64;
            } else {
                exact = false;
                break;
            }
        }
        if exact {
            if self.dir.side_of_hyperplane(two_x, two_anchor) > 0 {
                self.a
            } else {
                self.b
            }
        } else {
            let x = [
                two_x[0] as f64 * 0.5,
                two_x[1] as f64 * 0.5,
                two_x[2] as f64 * 0.5,
            ];
            self.eval(x)
        }
    }
}

/// Half-open (d-1)-dimensional box `[p, q)` indexing an oriented interval
/// region.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl IntervalBox {
    /// `bounds` are the half-open sides `[p_i, q_i)`, one per tangential
    /// dimension (so one entry in d=2, two in d=3).
    pub fn new(dim: usize, bounds: &[(f64, f64)]) -> Result<Self> {
        check_dim(dim)?;
        if bounds.len() != dim - 1 {
            return Err(Error::domain("interval box rank must be d-1"));
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for (i, &(p, q)) in bounds.iter().enumerate() {
            if p >= q || !p.is_finite() || !q.is_finite() {
                return Err(Error::domain("interval box must be nondegenerate"));
            }
            lo[i] = p;
            hi[i] = q;
        }
        Ok(IntervalBox { dim, lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.dim - 1
    }

    pub fn lo(&self, i: usize) -> f64 {
        self.lo[i]
    }

    pub fn hi(&self, i: usize) -> f64 {
        self.hi[i]
    }

    /// Largest side length.
    pub fn s_max(&self) -> f64 {
        (0..self.rank())
            .map(|i| self.hi[i] - self.lo[i])
            .fold(0.0, f64::max)
    }

    /// (d-1)-dimensional volume.
    pub fn volume(&self) -> f64 {
        (0..self.rank()).map(|i| self.hi[i] - self.lo[i]).product()
    }

    pub fn translated(&self, z: &[i64]) -> IntervalBox {
        let mut out = self.clone();
        for i in 0..self.rank() {
            out.lo[i] += z[i] as f64;
            out.hi[i] += z[i] as f64;
        }
        out
    }
}

/// Open cuboid `m_nu O_nu (int I x s_max(I) (-1/2, 1/2))` with exact
/// rational membership tests.
///
/// Tangential membership is evaluated half-open (matching the indexing
/// boxes) for interface-counting purposes and open for cell ownership; the
/// thickness direction is always open.
#[derive(Clone, Debug)]
pub struct OrientedIntervalRegion {
    dir: UnitDirection,
    scale: i64,
    frame: [[Rat; 3]; 3],
    frame_f64: [[f64; 3]; 3],
    lo: [Rat; 2],
    hi: [Rat; 2],
    half_thickness: Rat,
}

fn rat_from_f64(x: f64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::domain("interval bounds must be finite"));
    }
    // Every finite f64 is dyadic; scale by 2 until integral.
    let mut num = x;
    let mut den: i128 = 1;
    while num.fract() != 0.0 {
        num *= 2.0;
        den *= 2;
        if num.abs() > 1e18 {
            return Err(Error::domain("interval bound has too fine a binary scale"));
        }
    }
    if num.abs() > 1e18 {
        return Err(Error::domain("interval bound too large"));
    }
    Ok(Rat::new(num as i128, den))
}

impl OrientedIntervalRegion {
    pub fn new(ib: &IntervalBox, dir: &UnitDirection) -> Result<Self> {
        if ib.dim() != dir.dim() {
            return Err(Error::domain("interval box and direction dimensions differ"));
        }
        let scale = rational_direction_scale(dir)?;
        let frame = orientation_matrix_rational(dir)?;
        let frame_f64 = orientation_matrix(dir);
        let m = Rat::from_integer(scale as i128);
        let mut lo = [Rat::from_integer(0); 2];
        let mut hi = [Rat::from_integer(0); 2];
        for i in 0..ib.rank() {
            lo[i] = rat_from_f64(ib.lo(i))? * m;
            hi[i] = rat_from_f64(ib.hi(i))? * m;
        }
        let half_thickness = rat_from_f64(ib.s_max())? * m / Rat::from_integer(2);
        Ok(OrientedIntervalRegion {
            dir: dir.clone(),
            scale,
            frame,
            frame_f64,
            lo,
            hi,
            half_thickness,
        })
    }

    pub fn dir(&self) -> &UnitDirection {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    /// The integer scale `m_nu`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Exact frame coordinates of the point `two_x / 2`.
    fn frame_coords_two_x(&self, two_x: IVec3) -> [Rat; 3] {
        let d = self.dim();
        let mut y = [Rat::from_integer(0); 3];
        for (j, yj) in y.iter_mut().enumerate().take(d) {
            let mut acc = Rat::from_integer(0);
            for i in 0..d {
                acc += self.frame[i][j] * Rat::new(two_x[i] as i128, 2);
            }
            *yj = acc;
        }
        y
    }

    /// Open membership (cell ownership) of the point `two_x / 2`.
    pub fn contains_open_two_x(&self, two_x: IVec3) -> bool {
        let d = self.dim();
        let y = self.frame_coords_two_x(two_x);
        for i in 0..d - 1 {
            if !(y[i] > self.lo[i] && y[i] < self.hi[i]) {
                return false;
            }
        }
        let s = y[d - 1];
        -self.half_thickness < s && s < self.half_thickness
    }

    /// Half-open tangential membership (interface counting) of `two_x / 2`.
    pub fn contains_halfopen_two_x(&self, two_x: IVec3) -> bool {
        let d = self.dim();
        let y = self.frame_coords_two_x(two_x);
        for i in 0..d - 1 {
            if !(y[i] >= self.lo[i] && y[i] < self.hi[i]) {
                return false;
            }
        }
        let s = y[d - 1];
        -self.half_thickness < s && s < self.half_thickness
    }

    /// Minimum Euclidean distance from `two_x / 2` to the region boundary.
    pub fn boundary_distance_two_x(&self, two_x: IVec3) -> f64 {
        let d = self.dim();
        let y = self.frame_coords_two_x(two_x);
        let mut best = f64::INFINITY;
        for i in 0..d - 1 {
            let a = rat_to_f64(y[i] - self.lo[i]);
            let b = rat_to_f64(self.hi[i] - y[i]);
            best = best.min(a).min(b);
        }
        let s = rat_to_f64(y[d - 1]);
        let h = rat_to_f64(self.half_thickness);
        best.min(h - s).min(h + s)
    }

    /// Axis-aligned integer bounding box (inclusive cell index ranges) of
    /// the region expanded by `margin` cells.
    pub fn cell_bounds(&self, margin: i64) -> (IVec3, IVec3) {
        let d = self.dim();
        // Extent along coordinate axis i is sum_j |O_ij| * half-extent_j.
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        let half = |j: usize| -> f64 {
            if j == d - 1 {
                rat_to_f64(self.half_thickness)
            } else {
                0.5 * rat_to_f64(self.hi[j] - self.lo[j])
            }
        };
        let center_frame: Vec<f64> = (0..d)
            .map(|j| {
                if j == d - 1 {
                    0.0
                } else {
                    0.5 * rat_to_f64(self.lo[j] + self.hi[j])
                }
            })
            .collect();
        for i in 0..d {
            let mut c = 0.0;
            let mut e = 0.0;
            for j in 0..d {
                c += self.frame_f64[i][j] * center_frame[j];
                e += self.frame_f64[i][j].abs() * half(j);
            }
            lo[i] = (c - e).floor() as i64 - margin - 1;
            hi[i] = (c + e).ceil() as i64 + margin + 1;
        }
        (lo, hi)
    }
}

#[inline]
pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
