//! Cosets of one-dimensional subspaces, projections and aggregation.
//!
//! For `B_i = {0, i}` the quotient `E / B_i` has `n/2` cosets `{z, z ⊕ i}`,
//! ordered by their smaller member. With `h` the highest set bit of `i`, the
//! smaller member is the one with bit `h` clear, and its rank is obtained by
//! deleting bit `h`. That map is linear, so projected codewords are again RM
//! codewords under the usual indexing.

use serde::{Deserialize, Serialize};

use crate::code::Codeword;
use crate::error::{Error, Result};

/// Magnitude bound applied to every LLR the decoders handle.
pub const LLR_CLAMP: f64 = 30.0;

#[inline]
pub(crate) fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// A vector of natural-log LLRs, finite and clamped to `±LLR_CLAMP`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    /// Rejects non-finite entries and clamps the rest.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("LLR at index {pos} is not finite")));
        }
        Ok(LlrVector(values.into_iter().map(clamp_llr).collect()))
    }

    /// `±magnitude` following the BPSK sign pattern of `c` (0 → +, 1 → −).
    pub fn from_codeword(c: &Codeword, magnitude: f64) -> Self {
        let a = clamp_llr(magnitude.abs());
        LlrVector(
            c.bits()
                .iter()
                .map(|&b| if b == 0 { a } else { -a })
                .collect(),
        )
    }

    pub(crate) fn from_clamped(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite() && v.abs() <= LLR_CLAMP));
        LlrVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hard decision `(1 - sign(L)) / 2`; zero maps to bit 0.
    pub fn hard_decision(&self) -> Codeword {
        hard_decision(&self.0)
    }
}

pub(crate) fn hard_decision(values: &[f64]) -> Codeword {
    Codeword::from_bits(values.iter().map(|&v| u8::from(v < 0.0)).collect())
}

impl TryFrom<Vec<f64>> for LlrVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        LlrVector::new(values)
    }
}

impl From<LlrVector> for Vec<f64> {
    fn from(v: LlrVector) -> Self {
        v.0
    }
}

/// Index `i` of the subspace `B_i = {0, i}`, `1 ≤ i ≤ n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubspaceIndex(usize);

impl SubspaceIndex {
    pub fn new(i: usize, n: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::param(format!(
                "subspace index {i} outside [1, {}]",
                n - 1
            )));
        }
        Ok(SubspaceIndex(i))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// All `n - 1` one-dimensional subspaces.
    pub fn all(n: usize) -> impl Iterator<Item = SubspaceIndex> {
        (1..n).map(SubspaceIndex)
    }

    pub(crate) fn new_unchecked(i: usize) -> Self {
        SubspaceIndex(i)
    }
}

/// Position of the coset of `z` under `B_i` in canonical order.
#[inline]
pub fn coset_index(z: usize, i: usize) -> usize {
    let h = usize::BITS - 1 - i.leading_zeros();
    let rep = if z >> h & 1 == 1 { z ^ i } else { z };
    let low = rep & ((1 << h) - 1);
    low | ((rep >> (h + 1)) << h)
}

/// Smaller member of the `t`-th coset: insert a zero at the top bit of `i`.
#[inline]
fn coset_representative(t: usize, i: usize) -> usize {
    let h = usize::BITS - 1 - i.leading_zeros();
    let low = t & ((1 << h) - 1);
    low | ((t >> h) << (h + 1))
}

/// The cosets of `B_i` in canonical order, plus the inverse map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetMap {
    m: u32,
    index: SubspaceIndex,
    cosets: Vec<[usize; 2]>,
    coset_of: Vec<usize>,
}

impl CosetMap {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn subspace(&self) -> SubspaceIndex {
        self.index
    }

    /// Cosets `[z, z ⊕ i]` with `z < z ⊕ i`, ascending in `z`.
    pub fn cosets(&self) -> &[[usize; 2]] {
        &self.cosets
    }

    pub fn coset_of(&self, z: usize) -> usize {
        self.coset_of[z]
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }
}

pub fn build_coset_map(m: u32, i: usize) -> Result<CosetMap> {
    let n = 1usize << m;
    let index = SubspaceIndex::new(i, n)?;
    let mut cosets = Vec::with_capacity(n / 2);
    let mut coset_of = vec![0; n];
    for z in 0..n {
        if z < z ^ i {
            coset_of[z] = cosets.len();
            coset_of[z ^ i] = cosets.len();
            cosets.push([z, z ^ i]);
        }
    }
    Ok(CosetMap {
        m,
        index,
        cosets,
        coset_of,
    })
}

/// How two LLRs are combined into the LLR of their XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxplusMode {
    /// `ln((1 + e^{a+b}) / (e^a + e^b))`.
    #[default]
    Exact,
    /// `sign(a) sign(b) min(|a|, |b|)`.
    MinSum,
}

/// Exact boxplus in its overflow-free form, clamped to `±LLR_CLAMP`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let core = a.signum() * b.signum() * a.abs().min(b.abs());
    let core = if a == 0.0 || b == 0.0 { 0.0 } else { core };
    clamp_llr(core + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p())
}

#[inline]
pub fn boxplus_min_sum(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    a.signum() * b.signum() * a.abs().min(b.abs())
}

impl BoxplusMode {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            BoxplusMode::Exact => boxplus(a, b),
            BoxplusMode::MinSum => boxplus_min_sum(a, b),
        }
    }
}

/// Soft projection of `values` onto the cosets of `B_i`, written to `out` (length n/2).
pub(crate) fn project_llr_into(values: &[f64], i: usize, mode: BoxplusMode, out: &mut [f64]) {
    debug_assert_eq!(out.len() * 2, values.len());
    match mode {
        BoxplusMode::Exact => {
            for (t, o) in out.iter_mut().enumerate() {
                let z = coset_representative(t, i);
                *o = boxplus(values[z], values[z ^ i]);
            }
        }
        BoxplusMode::MinSum => {
            for (t, o) in out.iter_mut().enumerate() {
                let z = coset_representative(t, i);
                *o = boxplus_min_sum(values[z], values[z ^ i]);
            }
        }
    }
}

/// Adds `(1 - 2 ĉ(coset(z))) · L(z ⊕ i)` to `acc[z]` for every `z`.
pub(crate) fn accumulate_into(values: &[f64], i: usize, decoded: &[u8], acc: &mut [f64]) {
    debug_assert_eq!(decoded.len() * 2, values.len());
    for (t, &bit) in decoded.iter().enumerate() {
        let z0 = coset_representative(t, i);
        let z1 = z0 ^ i;
        if bit == 0 {
            acc[z0] += values[z1];
            acc[z1] += values[z0];
        } else {
            acc[z0] -= values[z1];
            acc[z1] -= values[z0];
        }
    }
}

/// XOR of the two coordinates in each coset.
pub fn project_hard(c: &Codeword, map: &CosetMap) -> Result<Codeword> {
    if c.len() != map.n() {
        return Err(Error::param(format!(
            "codeword length {} does not match coset map over {} points",
            c.len(),
            map.n()
        )));
    }
    let bits = c.bits();
    Ok(Codeword::from_bits(
        map.cosets
            .iter()
            .map(|[a, b]| bits[*a] ^ bits[*b])
            .collect(),
    ))
}

/// Boxplus of the two LLRs in each coset.
pub fn project_llr(l: &LlrVector, map: &CosetMap) -> Result<LlrVector> {
    project_llr_with(l, map, BoxplusMode::Exact)
}

pub fn project_llr_with(l: &LlrVector, map: &CosetMap, mode: BoxplusMode) -> Result<LlrVector> {
    if l.len() != map.n() {
        return Err(Error::param(format!(
            "LLR length {} does not match coset map over {} points",
            l.len(),
            map.n()
        )));
    }
    let mut out = vec![0.0; map.n() / 2];
    project_llr_into(l.values(), map.index.get(), mode, &mut out);
    Ok(LlrVector::from_clamped(out))
}

/// Per-coordinate average of sign-corrected partner LLRs over the given projections.
pub fn aggregate(l: &LlrVector, decoded: &[(SubspaceIndex, Codeword)]) -> Result<LlrVector> {
    if decoded.is_empty() {
        return Err(Error::param(
            "aggregation needs at least one decoded projection",
        ));
    }
    let n = l.len();
    let mut acc = vec![0.0; n];
    for (i, c) in decoded {
        if c.len() * 2 != n || i.get() >= n {
            return Err(Error::param(format!(
                "projection {} with {} bits does not fit blocklength {n}",
                i.get(),
                c.len()
            )));
        }
        accumulate_into(l.values(), i.get(), c.bits(), &mut acc);
    }
    let np = decoded.len() as f64;
    Ok(LlrVector::from_clamped(
        acc.into_iter().map(|v| clamp_llr(v / np)).collect(),
    ))
}
