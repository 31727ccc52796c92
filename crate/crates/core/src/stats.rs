//! Binomial confidence intervals and proportion tests for Monte Carlo results.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Two-sided Wilson score interval for `successes / trials` at the given confidence.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0, "interval of an empty sample");
    assert!(successes <= trials);
    let z = standard_normal().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Pooled two-proportion z-test of `H1: p1 < p2`.
///
/// Returns `(z, one-sided p-value)`.
pub fn two_proportion_less(k1: u64, n1: u64, k2: u64, n2: u64) -> (f64, f64) {
    assert!(n1 > 0 && n2 > 0);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let (p1, p2) = (k1 as f64 / n1f, k2 as f64 / n2f);
    let pooled = (k1 + k2) as f64 / (n1f + n2f);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f)).sqrt();
    if se == 0.0 {
        return (0.0, if p1 < p2 { 0.0 } else { 1.0 });
    }
    let z = (p2 - p1) / se;
    (z, 1.0 - standard_normal().cdf(z))
}

/// Whether two Wilson intervals overlap.
pub fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}
