//! Reed-Muller code construction, encoding and membership.
//!
//! A codeword of RM(m, r) is the evaluation table of an m-variate Boolean
//! polynomial of degree at most r. Row `a` of the Kronecker power `F^{⊗m}`
//! (with `F = [[1, 1], [0, 1]]`) is the monomial `Π_{k ∈ a} z_k`, i.e. the
//! indicator of `a ⊆ z`, and has weight `2^{m - |a|}`. Keeping the rows of
//! weight at least `2^{m-r}` keeps exactly the monomials of degree `≤ r`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LlrVector;

/// Largest supported `m`. Blocklengths beyond 2^24 are not useful for RPA.
pub const MAX_M: u32 = 24;

/// Default exhaustive-search cap for [`ml_decode_oracle`] (`2^k ≤ 2^20`).
pub const ORACLE_CAP_LOG2: u32 = 20;

/// Identity of an RM(m, r) code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    m: u32,
    r: u32,
}

impl CodeParams {
    pub fn new(m: u32, r: u32) -> Result<Self> {
        if m > MAX_M {
            return Err(Error::param(format!(
                "m = {m} exceeds the supported maximum {MAX_M}"
            )));
        }
        if r > m {
            return Err(Error::param(format!(
                "order r = {r} must not exceed m = {m}"
            )));
        }
        Ok(CodeParams { m, r })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Blocklength `2^m`.
    pub fn n(&self) -> usize {
        1usize << self.m
    }

    /// Dimension `Σ_{i=0}^{r} C(m, i)`.
    pub fn k(&self) -> usize {
        (0..=self.r).map(|i| binomial(self.m, i)).sum()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Minimum distance `2^{m-r}`.
    pub fn min_distance(&self) -> usize {
        1usize << (self.m - self.r)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RM({},{})", self.m, self.r)
    }
}

fn binomial(n: u32, k: u32) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as usize;
    let n = n as usize;
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A binary vector, one bit (0 or 1) per byte.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Codeword(Vec<u8>);

impl Codeword {
    pub fn zeros(n: usize) -> Self {
        Codeword(vec![0; n])
    }

    /// Wraps a vector of bits. Panics if any entry is not 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(
            bits.iter().all(|&b| b <= 1),
            "codeword entries must be 0 or 1"
        );
        Codeword(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn distance(&self, other: &Codeword) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Correlation `Σ_z (1 - 2 c(z)) L(z)` with an LLR vector.
    pub fn correlation(&self, llr: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(llr)
            .map(|(&b, &l)| if b == 0 { l } else { -l })
            .sum()
    }

    fn xor_assign(&mut self, other: &[u8]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a ^= b;
        }
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_bits(s).map(Codeword)
    }
}

/// An information word of length k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Message(Vec<u8>);

impl Message {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(
            bits.iter().all(|&b| b <= 1),
            "message entries must be 0 or 1"
        );
        Message(bits)
    }

    pub fn zeros(k: usize) -> Self {
        Message(vec![0; k])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Message {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_bits(s).map(Message)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Codeword(self.0.clone()).fmt(f)
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .chars()
        .filter(|c| !matches!(c, '_' | ' '))
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::param(format!(
                "unexpected character {other:?} in bit string"
            ))),
        })
        .collect()
}

/// The k × n generator matrix of an RM code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    params: CodeParams,
    rows: Vec<Vec<u8>>,
    /// Kronecker row index (monomial support) of each row.
    monomials: Vec<usize>,
}

impl GeneratorMatrix {
    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn monomials(&self) -> &[usize] {
        &self.monomials
    }

    /// Rows sorted lexicographically; equal for any two orderings of the same rows.
    pub fn sorted_rows(&self) -> Vec<Vec<u8>> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }
}

fn monomial_row(a: usize, n: usize) -> Vec<u8> {
    (0..n).map(|z| u8::from(z & a == a)).collect()
}

/// Builds the generator matrix by selecting rows of the Kronecker power of `F`.
///
/// Rows are grouped by decreasing weight (increasing monomial degree) and
/// ordered by Kronecker row index inside each group.
pub fn build_generator(params: CodeParams) -> GeneratorMatrix {
    let n = params.n();
    let mut monomials: Vec<usize> = (0..n).filter(|a| a.count_ones() <= params.r).collect();
    monomials.sort_by_key(|&a| (a.count_ones(), a));
    let rows = monomials.iter().map(|&a| monomial_row(a, n)).collect();
    GeneratorMatrix {
        params,
        rows,
        monomials,
    }
}

/// Builds the generator matrix through the block recursion
/// `G(m, r) = [[G(m-1, r), G(m-1, r)], [0, G(m-1, r-1)]]`.
///
/// Rows come out in recursion order, not canonical order.
pub fn build_generator_recursive(params: CodeParams) -> GeneratorMatrix {
    fn rec(m: u32, r: u32) -> Vec<(usize, Vec<u8>)> {
        let n = 1usize << m;
        if r == 0 {
            return vec![(0, vec![1; n])];
        }
        if m == 0 {
            // RM(0, 0) only; r > m is clamped by the caller.
            return vec![(0, vec![1])];
        }
        let r = r.min(m);
        let half = n / 2;
        let mut rows: Vec<(usize, Vec<u8>)> = rec(m - 1, r)
            .into_iter()
            .map(|(a, row)| {
                let mut full = row.clone();
                full.extend_from_slice(&row);
                (a, full)
            })
            .collect();
        for (a, row) in rec(m - 1, r - 1) {
            let mut full = vec![0; half];
            full.extend_from_slice(&row);
            rows.push((a | half, full));
        }
        rows
    }
    let (monomials, rows) = rec(params.m, params.r).into_iter().unzip();
    GeneratorMatrix {
        params,
        rows,
        monomials,
    }
}

/// `c = u·G` over `F_2`.
pub fn encode(msg: &Message, gen: &GeneratorMatrix) -> Result<Codeword> {
    let k = gen.rows.len();
    if msg.len() != k {
        return Err(Error::param(format!(
            "message length {} does not match dimension k = {k} of {}",
            msg.len(),
            gen.params
        )));
    }
    let mut c = Codeword::zeros(gen.params.n());
    for (&u, row) in msg.bits().iter().zip(&gen.rows) {
        if u == 1 {
            c.xor_assign(row);
        }
    }
    Ok(c)
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (idx, &b) in bits.iter().enumerate() {
        if b == 1 {
            words[idx / 64] |= 1 << (idx % 64);
        }
    }
    words
}

/// Incrementally reduced basis of a subspace of `F_2^n`.
struct Gf2Basis {
    vectors: Vec<(usize, Vec<u64>)>,
}

impl Gf2Basis {
    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (pivot, b) in &self.vectors {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        v
    }

    fn insert(&mut self, v: Vec<u64>) {
        let v = self.reduce(v);
        if let Some(pivot) = lowest_set_bit(&v) {
            self.vectors.push((pivot, v));
        }
    }
}

fn lowest_set_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Membership in the row space of the generator, by Gaussian elimination.
pub fn is_codeword(c: &Codeword, params: CodeParams) -> bool {
    if c.len() != params.n() {
        return false;
    }
    let gen = build_generator(params);
    let mut basis = Gf2Basis {
        vectors: Vec::with_capacity(gen.rows.len()),
    };
    for row in &gen.rows {
        basis.insert(pack(row));
    }
    lowest_set_bit(&basis.reduce(pack(c.bits()))).is_none()
}

/// Every codeword of the code, in Gray-code message order.
///
/// Refuses codes with `k > cap_log2`.
pub fn enumerate_codewords(params: CodeParams, cap_log2: u32) -> Result<Vec<Codeword>> {
    let k = params.k();
    if k > cap_log2 as usize {
        return Err(Error::OracleCap { k, cap_log2 });
    }
    let gen = build_generator(params);
    let mut out = Vec::with_capacity(1 << k);
    let mut c = Codeword::zeros(params.n());
    out.push(c.clone());
    for step in 1usize..(1 << k) {
        c.xor_assign(&gen.rows[step.trailing_zeros() as usize]);
        out.push(c.clone());
    }
    Ok(out)
}

/// Exhaustive maximum-likelihood decoding, for testing on tiny codes.
///
/// Maximizes `Σ_z (1 - 2 c(z)) L(z)`; ties go to the lexicographically
/// smallest codeword.
pub fn ml_decode_oracle(llr: &LlrVector, params: CodeParams) -> Result<Codeword> {
    ml_decode_oracle_capped(llr, params, ORACLE_CAP_LOG2)
}

pub fn ml_decode_oracle_capped(
    llr: &LlrVector,
    params: CodeParams,
    cap_log2: u32,
) -> Result<Codeword> {
    if llr.len() != params.n() {
        return Err(Error::param(format!(
            "LLR length {} does not match blocklength {}",
            llr.len(),
            params.n()
        )));
    }
    let k = params.k();
    if k > cap_log2 as usize {
        return Err(Error::OracleCap { k, cap_log2 });
    }
    let gen = build_generator(params);
    let values = llr.values();
    let mut c = Codeword::zeros(params.n());
    let mut best = c.clone();
    let mut best_metric = c.correlation(values);
    for step in 1usize..(1 << k) {
        c.xor_assign(&gen.rows[step.trailing_zeros() as usize]);
        let metric = c.correlation(values);
        if metric > best_metric || (metric == best_metric && c < best) {
            best_metric = metric;
            best = c.clone();
        }
    }
    Ok(best)
}
