//! Benchmark inputs shared by the criterion targets.

use gevrey_core::arith::rat;
use gevrey_core::{FormalSeries, Rational};

/// Deterministic dense series with small-height rational coefficients.
pub fn dense_series(order: usize) -> FormalSeries {
    FormalSeries::from_fn(order, |n| rat((n as i64 * 7919) % 23 - 11, (n as i64 % 5) + 1))
}

pub fn sample_rates(m: usize) -> (Vec<Rational>, Vec<Rational>) {
    let betas = (0..=m).map(|j| rat(j as i64 + 1, 2)).collect();
    let alphas = (1..=m).map(|j| rat(2 * j as i64 + 1, 3)).collect();
    (betas, alphas)
}
