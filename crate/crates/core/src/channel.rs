//! BPSK over AWGN and a reproducible Monte Carlo FER/BER sweep.
//!
//! Bits map to `0 → +1`, `1 → -1` with unit symbol energy. At a given
//! `Eb/N0` and rate `R` the noise variance per dimension is
//! `σ² = 1 / (2 R 10^{Eb/N0 / 10})` and the channel LLR is `2y / σ²`.
//!
//! Every frame draws from its own generator keyed by `(seed, point, frame)`,
//! and frames are folded in index order, so a sweep gives identical results
//! on any number of worker threads.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{build_generator, encode, CodeParams, Codeword, GeneratorMatrix, Message};
use crate::error::{Error, Result};
use crate::fod::FodCounter;
use crate::geometry::{clamp_llr, LlrVector};
use crate::rpa::{decode, PruningConfig};

/// Version of the JSON result document written by [`write_json`].
pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// CSV header written by [`write_csv`].
pub const CSV_COLUMNS: [&str; 9] = [
    "ebno_db",
    "frames",
    "frame_errors",
    "bit_errors",
    "fer",
    "ber",
    "fods_total",
    "fods_per_frame",
    "wall_seconds",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    ebno_db: f64,
    rate: f64,
    sigma: f64,
}

impl ChannelConfig {
    pub fn new(ebno_db: f64, rate: f64) -> Result<Self> {
        if !ebno_db.is_finite() {
            return Err(Error::config(format!("Eb/N0 = {ebno_db} dB is not finite")));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::config(format!("rate {rate} must lie in (0, 1]")));
        }
        let sigma = (2.0 * rate * 10f64.powf(ebno_db / 10.0)).powf(-0.5);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config(format!(
                "Eb/N0 = {ebno_db} dB gives a degenerate noise level"
            )));
        }
        Ok(ChannelConfig {
            ebno_db,
            rate,
            sigma,
        })
    }

    pub fn for_code(ebno_db: f64, params: CodeParams) -> Result<Self> {
        Self::new(ebno_db, params.rate())
    }

    pub fn ebno_db(&self) -> f64 {
        self.ebno_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// BPSK-modulates `c` and adds white Gaussian noise.
pub fn transmit<R: Rng + ?Sized>(c: &Codeword, ch: &ChannelConfig, rng: &mut R) -> Vec<f64> {
    c.bits()
        .iter()
        .map(|&b| {
            let x = if b == 0 { 1.0 } else { -1.0 };
            let noise: f64 = rng.sample(StandardNormal);
            x + ch.sigma * noise
        })
        .collect()
}

/// `L = 2y / σ²`, clamped.
pub fn llr_from_channel(y: &[f64], ch: &ChannelConfig) -> LlrVector {
    let scale = 2.0 / ch.variance();
    LlrVector::new(y.iter().map(|v| clamp_llr(v * scale)).collect())
        .expect("channel outputs are finite")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageMode {
    #[default]
    Random,
    AllZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeParams,
    pub decoder: PruningConfig,
    pub ebno_points: Vec<f64>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub message_mode: MessageMode,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    /// Fill `wall_seconds`; when off it is written as 0 so output is reproducible.
    pub record_timing: bool,
}

impl SimConfig {
    pub fn new(code: CodeParams, decoder: PruningConfig, ebno_points: Vec<f64>) -> Self {
        SimConfig {
            code,
            decoder,
            ebno_points,
            min_frame_errors: 100,
            max_frames: 10_000_000,
            seed: 0,
            message_mode: MessageMode::Random,
            threads: None,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_frame_errors == 0 {
            return Err(Error::config("min_frame_errors must be at least 1"));
        }
        if self.max_frames < self.min_frame_errors {
            return Err(Error::config(format!(
                "max_frames = {} is smaller than min_frame_errors = {}",
                self.max_frames, self.min_frame_errors
            )));
        }
        if self.ebno_points.is_empty() {
            return Err(Error::config("no Eb/N0 points given"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads must be at least 1"));
        }
        if self.code.m() == 0 {
            return Err(Error::config("blocklength 1 is not decodable"));
        }
        for &e in &self.ebno_points {
            ChannelConfig::for_code(e, self.code)?;
        }
        self.decoder.validate_for(self.code)
    }
}

/// Results at one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    /// Coded bit error rate, `bit_errors / (frames · n)`.
    pub ber: f64,
    pub fods_total: u64,
    pub fods_per_frame: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    bit_errors: u64,
    fods: u64,
}

fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

struct FrameRunner<'a> {
    cfg: &'a SimConfig,
    gen: GeneratorMatrix,
}

impl FrameRunner<'_> {
    fn run(&self, ch: &ChannelConfig, point: usize, frame: u64) -> FrameOutcome {
        let mut rng = frame_rng(self.cfg.seed, point, frame);
        let codeword = match self.cfg.message_mode {
            MessageMode::AllZero => Codeword::zeros(self.cfg.code.n()),
            MessageMode::Random => {
                let msg = Message::from_bits(
                    (0..self.cfg.code.k())
                        .map(|_| rng.random_range(0..=1u8))
                        .collect(),
                );
                encode(&msg, &self.gen).expect("message has length k")
            }
        };
        let y = transmit(&codeword, ch, &mut rng);
        let llr = llr_from_channel(&y, ch);
        let mut counter = FodCounter::new();
        let res = decode(&llr, self.cfg.code, &self.cfg.decoder, &mut counter)
            .expect("configuration validated before the sweep");
        FrameOutcome {
            bit_errors: res.codeword.distance(&codeword) as u64,
            fods: counter.total(),
        }
    }

    fn point(&self, point: usize, ebno_db: f64, workers: usize) -> FerPoint {
        let ch = ChannelConfig::for_code(ebno_db, self.cfg.code).expect("validated");
        let start = Instant::now();
        let (mut frames, mut frame_errors, mut bit_errors, mut fods_total) =
            (0u64, 0u64, 0u64, 0u64);
        let batch = (workers as u64 * 16).max(16);
        'outer: while frames < self.cfg.max_frames {
            let end = (frames + batch).min(self.cfg.max_frames);
            let outcomes: Vec<FrameOutcome> = (frames..end)
                .into_par_iter()
                .map(|f| self.run(&ch, point, f))
                .collect();
            for o in outcomes {
                frames += 1;
                fods_total += o.fods;
                bit_errors += o.bit_errors;
                if o.bit_errors > 0 {
                    frame_errors += 1;
                    if frame_errors >= self.cfg.min_frame_errors {
                        break 'outer;
                    }
                }
            }
        }
        let wall_seconds = if self.cfg.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        FerPoint {
            ebno_db,
            frames,
            frame_errors,
            bit_errors,
            fer: frame_errors as f64 / frames as f64,
            ber: bit_errors as f64 / (frames as f64 * self.cfg.code.n() as f64),
            fods_total,
            fods_per_frame: fods_total as f64 / frames as f64,
            wall_seconds,
        }
    }
}

/// Runs every Eb/N0 point until `min_frame_errors` or `max_frames` is reached.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<FerPoint>> {
    run_sweep_with_progress(cfg, |_| {})
}

/// Like [`run_sweep`], calling `progress` after each completed point.
pub fn run_sweep_with_progress(
    cfg: &SimConfig,
    mut progress: impl FnMut(&FerPoint),
) -> Result<Vec<FerPoint>> {
    cfg.validate()?;
    let runner = FrameRunner {
        cfg,
        gen: build_generator(cfg.code),
    };
    let pool = match cfg.threads {
        Some(t) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::config(format!("cannot start {t} worker threads: {e}")))?,
        ),
        None => None,
    };
    let mut points = Vec::with_capacity(cfg.ebno_points.len());
    for (idx, &e) in cfg.ebno_points.iter().enumerate() {
        let p = match &pool {
            Some(pool) => pool.install(|| runner.point(idx, e, pool.current_num_threads())),
            None => runner.point(idx, e, rayon::current_num_threads()),
        };
        progress(&p);
        points.push(p);
    }
    Ok(points)
}

pub fn write_csv<W: Write>(points: &[FerPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p).map_err(|e| Error::Output(e.to_string()))?;
    }
    if points.is_empty() {
        w.write_record(CSV_COLUMNS)
            .map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

/// Versioned JSON result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub code: CodeParams,
    pub points: Vec<FerPoint>,
}

pub fn write_json<W: Write>(code: CodeParams, points: &[FerPoint], out: W) -> Result<()> {
    let report = SweepReport {
        schema_version: RESULT_SCHEMA_VERSION,
        code,
        points: points.to_vec(),
    };
    serde_json::to_writer_pretty(out, &report).map_err(|e| Error::Output(e.to_string()))
}
