//! Reduction of a cell problem to integerized pairwise terms over the free
//! cells.
//!
//! All solvers consume the same integer data, so exact minimizers can be
//! compared bit-for-bit. Pair costs are the stencil weight times the field
//! weight at the pair midpoint, rounded half-even at a fixed binary scale.

use crate::error::{Error, Result};
use crate::geometry::{IVec3, JumpDatum};
use crate::lattice::{
    for_each_active_pair, integer_weight, rasterize_datum, BcMode, LabelField, Region, Stencil,
};
use crate::media::SurfaceTensionField;

/// One free-free pair with its full `k x k` cost matrix, `cost[lp*k + lq]`.
#[derive(Clone, Debug)]
pub struct IntPair {
    pub i: u32,
    pub j: u32,
    pub cost: Box<[u64]>,
}

/// Integerized problem over the free cells.
#[derive(Clone, Debug)]
pub struct DiscreteProblem {
    pub k: u8,
    pub free: Vec<IVec3>,
    pub unary: Vec<u64>,
    pub pairs: Vec<IntPair>,
    pub constant: u64,
    /// Rasterized datum with collar flags; also the initial labeling.
    pub base: LabelField,
}

impl DiscreteProblem {
    pub fn build(
        field: &SurfaceTensionField,
        region: &Region,
        datum: &JumpDatum,
        bc: BcMode,
        collar_width: u32,
        stencil: &Stencil,
        label_count: u8,
    ) -> Result<Self> {
        if label_count < 2 {
            return Err(Error::domain("need at least two labels"));
        }
        let base = rasterize_datum(region, datum, stencil, collar_width, bc, label_count)?;
        let free = base.free_cells();
        let (lo, hi) = base.bounds();
        let mut extent = [1usize; 3];
        for j in 0..base.dim() {
            extent[j] = (hi[j] - lo[j] + 1) as usize;
        }
        let mut free_idx = vec![u32::MAX; extent[0] * extent[1] * extent[2]];
        for (i, &cell) in free.iter().enumerate() {
            free_idx[base.index(cell).unwrap()] = i as u32;
        }
        let k = label_count as usize;
        let mut unary = vec![0u64; free.len() * k];
        let mut pairs = Vec::new();
        let mut constant = 0u64;
        for_each_active_pair(&base, stencil, region, |p, q, off, mid| {
            let mut cost = vec![0u64; k * k].into_boxed_slice();
            for lp in 0..k {
                for lq in 0..k {
                    if lp != lq {
                        cost[lp * k + lq] = integer_weight(
                            off.weight
                                * field.eval_unchecked(mid, lq as u8, lp as u8, &off.normal),
                        );
                    }
                }
            }
            let fi = free_idx[base.index(p).unwrap()];
            let fj = free_idx[base.index(q).unwrap()];
            match (fi != u32::MAX, fj != u32::MAX) {
                (true, true) => pairs.push(IntPair { i: fi, j: fj, cost }),
                (true, false) => {
                    let lq = base.get(q) as usize;
                    for lp in 0..k {
                        unary[fi as usize * k + lp] += cost[lp * k + lq];
                    }
                }
                (false, true) => {
                    let lp = base.get(p) as usize;
                    for lq in 0..k {
                        unary[fj as usize * k + lq] += cost[lp * k + lq];
                    }
                }
                (false, false) => {
                    constant += cost[base.get(p) as usize * k + base.get(q) as usize];
                }
            }
        });
        Ok(DiscreteProblem { k: label_count, free, unary, pairs, constant, base })
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Integer energy of an assignment of the free cells.
    pub fn value_int(&self, assignment: &[u8]) -> u64 {
        debug_assert_eq!(assignment.len(), self.free.len());
        let k = self.k as usize;
        let mut total = self.constant;
        for (i, &l) in assignment.iter().enumerate() {
            total += self.unary[i * k + l as usize];
        }
        for p in &self.pairs {
            total += p.cost[assignment[p.i as usize] as usize * k
                + assignment[p.j as usize] as usize];
        }
        total
    }

    /// Label field realizing an assignment.
    pub fn labeled(&self, assignment: &[u8]) -> LabelField {
        let mut out = self.base.clone();
        for (cell, &l) in self.free.iter().zip(assignment.iter()) {
            out.set(*cell, l);
        }
        out
    }

    /// The datum assignment restricted to the free cells.
    pub fn datum_assignment(&self) -> Vec<u8> {
        self.free.iter().map(|&c| self.base.get(c)).collect()
    }
}
