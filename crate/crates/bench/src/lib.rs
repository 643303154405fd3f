//! Shared fixtures for the benchmarks.

/// Parameters covering the regimes the benchmarks care about: a flip cascade,
/// the period-3 window, and a band attractor.
pub const SAMPLE_MUS: [f64; 4] = [3.2, 3.55, 3.7, 3.84];

/// `n` evenly spaced parameters in `[lo, hi]`.
pub fn sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64).collect()
}
