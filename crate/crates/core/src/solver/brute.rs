//! Exhaustive minimizer, the independent oracle for the other solvers.

use crate::error::{Error, Result};
use crate::solver::discretize::DiscreteProblem;

/// Enumeration cap: `#free * log2(K)` must not exceed this many bits.
pub const BRUTE_FORCE_BITS: f64 = 24.0;

/// Global minimum by enumeration of all `K^#free` assignments, in
/// lexicographic order with strict improvement, so ties resolve to the
/// lexicographically smallest argmin.
pub fn brute_force_min(problem: &DiscreteProblem) -> Result<(Vec<u8>, u64)> {
    let n = problem.free_count();
    let k = problem.k;
    let bits = n as f64 * (k as f64).log2();
    if bits > BRUTE_FORCE_BITS {
        return Err(Error::capacity(format!(
            "{n} free cells with {k} labels need {bits:.1} bits, cap is {BRUTE_FORCE_BITS}"
        )));
    }
    let mut assignment = vec![0u8; n];
    let mut best = assignment.clone();
    let mut best_value = problem.value_int(&assignment);
    loop {
        // Odometer advance with the first cell most significant.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok((best, best_value));
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < k {
                break;
            }
            assignment[pos] = 0;
        }
        let v = problem.value_int(&assignment);
        if v < best_value {
            best_value = v;
            best.copy_from_slice(&assignment);
        }
    }
}
