use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pruning::{projections_with_gamma, select_projection_indices, PruningConfig, Selection};
use crate::code::{CodeParams, Codeword};
use crate::error::{Error, Result};
use crate::fod::{fht_decode_into, FodCounter};
use crate::geometry::{accumulate_into, clamp_llr, hard_decision, project_llr_into, LlrVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub codeword: Codeword,
    /// FODs spent by this decode alone.
    pub fods: FodCounter,
    /// Iterations run by the outermost invocation (0 for first-order codes).
    pub iterations_run: usize,
    /// Whether the outermost invocation stopped on the exiting threshold.
    pub converged_early: bool,
    /// Final LLRs whose hard decision is `codeword` (the input for first-order codes).
    pub llr: LlrVector,
}

/// `|new(z) - old(z)| < θ |old(z)|` for every coordinate.
pub fn check_convergence(old: &LlrVector, new: &LlrVector, theta: f64) -> bool {
    assert_eq!(
        old.len(),
        new.len(),
        "convergence check on vectors of different length"
    );
    converged(old.values(), new.values(), theta)
}

fn converged(old: &[f64], new: &[f64], theta: f64) -> bool {
    old.iter()
        .zip(new)
        .all(|(o, n)| (n - o).abs() < theta * o.abs())
}

/// Per-depth scratch space, so the recursion allocates nothing per FOD.
#[derive(Default)]
struct Scratch {
    current: Vec<f64>,
    next: Vec<f64>,
    projected: Vec<f64>,
    decoded: Vec<u8>,
    spectrum: Vec<f64>,
}

struct Run<'a> {
    cfg: &'a PruningConfig,
    counter: FodCounter,
    rng: Option<ChaCha8Rng>,
}

impl Run<'_> {
    fn indices(&mut self, n: usize, np: usize) -> Vec<usize> {
        match &mut self.rng {
            None => select_projection_indices(n, np)
                .expect("projection count is clamped to [1, n-1]")
                .into_iter()
                .map(|i| i.get())
                .collect(),
            Some(rng) => {
                let mut v: Vec<usize> = sample(rng, n - 1, np).into_iter().map(|i| i + 1).collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// Decodes `llr` as a word of RM(log2 len, r) into `out`; returns (iterations, early stop).
    fn decode(
        &mut self,
        llr: &[f64],
        r: u32,
        gamma: f64,
        depth: usize,
        scratch: &mut [Scratch],
        out: &mut [u8],
    ) -> (usize, bool) {
        let (here, deeper) = scratch
            .split_first_mut()
            .expect("one scratch slot per depth");
        if r == 1 {
            fht_decode_into(llr, &mut here.spectrum, out, &mut self.counter, depth);
            return (0, false);
        }
        let n = llr.len();
        here.current.clear();
        here.current.extend_from_slice(llr);
        here.next.resize(n, 0.0);
        here.projected.resize(n / 2, 0.0);
        here.decoded.resize(n / 2, 0);

        let mut iterations = 0;
        let mut stopped = false;
        for j in 1..=self.cfg.iterations() {
            let np = projections_with_gamma(n, j, r, gamma, self.cfg);
            let inner_gamma = gamma * self.cfg.delta_itr.powi(j as i32 - 1);
            here.next.fill(0.0);
            for i in self.indices(n, np) {
                project_llr_into(&here.current, i, self.cfg.boxplus, &mut here.projected);
                self.decode(
                    &here.projected,
                    r - 1,
                    inner_gamma,
                    depth + 1,
                    deeper,
                    &mut here.decoded,
                );
                accumulate_into(&here.current, i, &here.decoded, &mut here.next);
            }
            let scale = 1.0 / np as f64;
            for v in here.next.iter_mut() {
                *v = clamp_llr(*v * scale);
            }
            iterations = j;
            let done = match self.cfg.early_stop {
                Some(es) => converged(&here.current, &here.next, es.theta),
                None => false,
            };
            std::mem::swap(&mut here.current, &mut here.next);
            if done {
                stopped = true;
                break;
            }
        }
        for (bit, v) in out.iter_mut().zip(&here.current) {
            *bit = u8::from(*v < 0.0);
        }
        (iterations, stopped)
    }
}

/// Pruned recursive projection-aggregation decoding of `llr` as a word of `params`.
///
/// First-order codes go straight to the FHT decoder. Otherwise each of up to
/// `N_max` iterations projects the current LLRs onto the selected subspaces,
/// decodes every projection recursively as RM(m-1, r-1) (with the decayed
/// starting factor), and replaces the LLRs by the average of the
/// sign-corrected partner LLRs. The output is the hard decision of the final
/// LLRs; for `r ≥ 2` it need not be a codeword.
///
/// FODs are added to `counter` and also reported for this call alone.
pub fn decode(
    llr: &LlrVector,
    params: CodeParams,
    cfg: &PruningConfig,
    counter: &mut FodCounter,
) -> Result<DecodeResult> {
    if llr.len() != params.n() {
        return Err(Error::param(format!(
            "LLR length {} does not match blocklength {} of {params}",
            llr.len(),
            params.n()
        )));
    }
    if params.m() == 0 {
        return Err(Error::param("RPA decoding needs m ≥ 1"));
    }
    cfg.validate_for(params)?;

    let rng = match cfg.selection {
        Selection::Stride => None,
        Selection::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut run = Run {
        cfg,
        counter: FodCounter::new(),
        rng,
    };
    let mut scratch: Vec<Scratch> = (0..params.r()).map(|_| Scratch::default()).collect();
    let mut out = vec![0u8; params.n()];
    let (iterations_run, converged_early) = run.decode(
        llr.values(),
        params.r(),
        cfg.gamma,
        0,
        &mut scratch,
        &mut out,
    );

    let final_llr = if params.r() == 1 {
        llr.clone()
    } else {
        LlrVector::from_clamped(std::mem::take(&mut scratch[0].current))
    };
    if params.r() > 1 {
        debug_assert_eq!(hard_decision(final_llr.values()).bits(), &out[..]);
    }
    counter.merge(&run.counter);
    Ok(DecodeResult {
        codeword: Codeword::from_bits(out),
        fods: run.counter,
        iterations_run,
        converged_early,
        llr: final_llr,
    })
}
