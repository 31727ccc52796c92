//! First-order decoding through the fast Hadamard transform.
//!
//! Every call to [`fht_decode`] is one FOD, the complexity unit reported by
//! the decoders in this crate.

use serde::{Deserialize, Serialize};

use crate::code::Codeword;
use crate::error::{Error, Result};
use crate::geometry::LlrVector;

/// Tally of first-order decodings, broken down by recursion depth
/// (0 = the outermost decoder call).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FodCounter {
    per_level: Vec<u64>,
}

impl FodCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, level: usize) {
        if self.per_level.len() <= level {
            self.per_level.resize(level + 1, 0);
        }
        self.per_level[level] += 1;
    }

    pub fn total(&self) -> u64 {
        self.per_level.iter().sum()
    }

    pub fn at_level(&self, level: usize) -> u64 {
        self.per_level.get(level).copied().unwrap_or(0)
    }

    pub fn per_level(&self) -> &[u64] {
        &self.per_level
    }

    /// Adds another tally into this one; used to merge per-thread counters.
    pub fn merge(&mut self, other: &FodCounter) {
        if self.per_level.len() < other.per_level.len() {
            self.per_level.resize(other.per_level.len(), 0);
        }
        for (a, b) in self.per_level.iter_mut().zip(&other.per_level) {
            *a += b;
        }
    }
}

/// In-place unnormalized Walsh-Hadamard butterfly. `values.len()` must be a power of two.
pub(crate) fn fht_in_place(values: &mut [f64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in values.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// `out[a] = Σ_z (-1)^{<a, z>} values[z]`.
pub fn fht(values: &[f64]) -> Result<Vec<f64>> {
    if !values.len().is_power_of_two() {
        return Err(Error::param(format!(
            "Hadamard transform length {} is not a power of two",
            values.len()
        )));
    }
    let mut out = values.to_vec();
    fht_in_place(&mut out);
    Ok(out)
}

/// Peak of the spectrum: largest `|W[a]|`, smallest `a` on ties.
fn spectrum_peak(spectrum: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_abs = spectrum[0].abs();
    for (a, w) in spectrum.iter().enumerate().skip(1) {
        if w.abs() > best_abs {
            best = a;
            best_abs = w.abs();
        }
    }
    (best, spectrum[best])
}

/// Writes the affine function `z ↦ u0 ⊕ <a, z>` into `out`.
fn write_affine(a: usize, u0: u8, out: &mut [u8]) {
    for (z, bit) in out.iter_mut().enumerate() {
        *bit = u0 ^ ((a & z).count_ones() & 1) as u8;
    }
}

/// ML decoding of RM(m', 1) on a raw slice; `scratch` receives the spectrum.
pub(crate) fn fht_decode_into(
    llr: &[f64],
    scratch: &mut Vec<f64>,
    out: &mut [u8],
    counter: &mut FodCounter,
    level: usize,
) {
    scratch.clear();
    scratch.extend_from_slice(llr);
    fht_in_place(scratch);
    let (a, w) = spectrum_peak(scratch);
    write_affine(a, u8::from(w < 0.0), out);
    counter.record(level);
}

/// Maximum-likelihood decoding of the first-order code RM(m', 1).
///
/// Picks the Walsh coefficient of largest magnitude (smallest index on ties)
/// and returns `u0 ⊕ <a*, z>` with `u0 = 1` iff that coefficient is negative.
/// Increments `counter` at `level` exactly once.
pub fn fht_decode(l: &LlrVector, counter: &mut FodCounter, level: usize) -> Result<Codeword> {
    let n = l.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::param(format!(
            "first-order decoding needs a length 2^m' with m' ≥ 1, got {n}"
        )));
    }
    let mut scratch = Vec::with_capacity(n);
    let mut out = vec![0u8; n];
    fht_decode_into(l.values(), &mut scratch, &mut out, counter, level);
    Ok(Codeword::from_bits(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{ml_decode_oracle, CodeParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_wht(v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .map(|a| {
                v.iter()
                    .enumerate()
                    .map(|(z, x)| {
                        if (a & z).count_ones() % 2 == 0 {
                            *x
                        } else {
                            -*x
                        }
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fht_examples() {
        assert_eq!(fht(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0; 4]);
        assert_eq!(fht(&[1.0; 4]).unwrap(), vec![4.0, 0.0, 0.0, 0.0]);
        // W[3] = 3 - 1 - 4 + 1
        assert_eq!(naive_wht(&[3.0, 1.0, 4.0, 1.0]), vec![9.0, 5.0, -1.0, -1.0]);
        assert_eq!(
            fht(&[3.0, 1.0, 4.0, 1.0]).unwrap(),
            vec![9.0, 5.0, -1.0, -1.0]
        );
        assert!(fht(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn fht_decode_examples() {
        let mut counter = FodCounter::new();
        let c = fht_decode(&LlrVector::new(vec![10.0; 8]).unwrap(), &mut counter, 0).unwrap();
        assert_eq!(c, Codeword::zeros(8));
        let c = fht_decode(
            &LlrVector::new(vec![5.0, 5.0, -5.0, -5.0]).unwrap(),
            &mut counter,
            2,
        )
        .unwrap();
        assert_eq!(c.to_string(), "0011");
        assert_eq!(counter.total(), 2);
        assert_eq!(counter.per_level(), &[1, 0, 1]);
        assert!(fht_decode(&LlrVector::new(vec![1.0]).unwrap(), &mut counter, 0).is_err());
    }

    #[test]
    fn fht_decode_matches_oracle_rm31() {
        let params = CodeParams::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counter = FodCounter::new();
        for _ in 0..1000 {
            let l = LlrVector::new((0..8).map(|_| rng.random_range(-6.0..6.0)).collect()).unwrap();
            assert_eq!(
                fht_decode(&l, &mut counter, 0).unwrap(),
                ml_decode_oracle(&l, params).unwrap()
            );
        }
        assert_eq!(counter.total(), 1000);
    }

    #[test]
    fn counter_merge() {
        let mut a = FodCounter::new();
        a.record(0);
        let mut b = FodCounter::new();
        b.record(2);
        b.record(2);
        a.merge(&b);
        assert_eq!(a.per_level(), &[1, 0, 2]);
        assert_eq!(a.total(), 3);
    }

    proptest! {
        #[test]
        fn fht_matches_naive_and_is_an_involution(m in 0u32..=6, seed: u64) {
            let n = 1usize << m;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-100i32..100) as f64).collect();
            let w = fht(&v).unwrap();
            prop_assert_eq!(&w, &naive_wht(&v));
            let back = fht(&w).unwrap();
            prop_assert_eq!(back, v.iter().map(|x| x * n as f64).collect::<Vec<_>>());
        }

        #[test]
        fn decoded_correlation_is_peak(m in 1u32..=6, seed: u64) {
            let n = 1usize << m;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = LlrVector::new((0..n).map(|_| rng.random_range(-8i32..8) as f64 * 0.5).collect()).unwrap();
            let mut counter = FodCounter::new();
            let c = fht_decode(&l, &mut counter, 0).unwrap();
            let peak = fht(l.values()).unwrap().iter().map(|w| w.abs()).fold(0.0, f64::max);
            prop_assert_eq!(c.correlation(l.values()), peak);
            prop_assert_eq!(counter.total(), 1);
        }
    }
}
