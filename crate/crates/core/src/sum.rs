//! Exactly rounded floating-point summation (Shewchuk expansion sum).
//!
//! The running sum is kept as a list of non-overlapping partials whose exact
//! sum equals the exact sum of all inputs; the final result is the correctly
//! rounded f64 of that exact value. The result is therefore independent of
//! summation order, which is what lets energy evaluation be reproduced
//! bit-exactly across worker counts and lets sums of identical terms stay
//! exact.

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum { partials: Vec::new() }
    }

    pub fn add(&mut self, x: f64) {
        let mut x = x;
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Correctly rounded value of the accumulated sum. Depends only on the
    /// exact sum of the inputs, never on insertion order.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut x = p[n];
        let mut lo = 0.0;
        while n > 0 {
            n -= 1;
            let y = p[n];
            let hi = x + y;
            lo = y - (hi - x);
            x = hi;
            if lo != 0.0 {
                break;
            }
        }
        // Round-half-even fixup: the discarded tail can only flip the last
        // bit when the current round-off is exactly half an ulp and the tail
        // pushes it past the tie.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let z = x + y;
            if y == z - x {
                x = z;
            }
        }
        x
    }
}

/// Exactly rounded sum of an iterator of f64 values.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = ExactSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
