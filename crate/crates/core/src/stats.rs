//! Small statistics helpers for the Monte-Carlo drivers.

use crate::hash::Mix64;
use crate::sum::exact_sum;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    exact_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    exact_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}

pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Distance of two sample means in units of the pooled standard error.
pub fn gap_in_pooled_se(a: &[f64], b: &[f64]) -> f64 {
    let se2 = sample_variance(a) / a.len() as f64 + sample_variance(b) / b.len() as f64;
    if se2 == 0.0 {
        if mean(a) == mean(b) {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (mean(a) - mean(b)).abs() / se2.sqrt()
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Bootstrap {
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub resamples: usize,
}

/// Percentile bootstrap of the sample mean with a deterministic resampling
/// stream.
pub fn bootstrap_mean(xs: &[f64], resamples: usize, seed: u64) -> Bootstrap {
    if xs.len() < 2 {
        let m = mean(xs);
        return Bootstrap { se: 0.0, ci_lo: m, ci_hi: m, resamples };
    }
    let mut rng = Mix64::new(seed ^ 0xB007_5EED_0000_0001);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut acc = 0.0;
        for _ in 0..xs.len() {
            acc += xs[rng.next_below(xs.len() as u64) as usize];
        }
        means.push(acc / xs.len() as f64);
    }
    means.sort_by(f64::total_cmp);
    let se = sample_variance(&means).sqrt();
    let lo = means[((resamples as f64 * 0.025) as usize).min(resamples - 1)];
    let hi = means[((resamples as f64 * 0.975) as usize).min(resamples - 1)];
    Bootstrap { se, ci_lo: lo, ci_hi: hi, resamples }
}

/// Least-squares slope of `ln y` against `ln x`, ignoring non-positive
/// values; `None` when fewer than two usable points remain.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in usable {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}
