//! Reed-Muller codes and recursive projection-aggregation (RPA) decoding.
//!
//! The crate is organized bottom-up:
//!
//! - [`code`]: RM(m, r) parameters, generator matrices, encoding, membership
//!   and an exhaustive maximum-likelihood oracle for tiny codes.
//! - [`geometry`]: one-dimensional subspaces of `F_2^m`, their cosets, hard
//!   and soft projections and the aggregation step.
//! - [`fod`]: the fast Hadamard transform and the first-order decoder that
//!   serves as the complexity unit (one FOD per call).
//! - [`rpa`]: the pruned RPA decoder, its pruning schedule, presets and the
//!   analytic FOD count.
//! - [`channel`]: BPSK over AWGN, channel LLRs and a reproducible Monte Carlo
//!   FER/BER sweep.
//!
//! Coordinates are indexed by the integer whose binary expansion is the
//! m-bit vector `z`, bit 0 being the least significant.

pub mod channel;
pub mod code;
pub mod error;
pub mod fod;
pub mod geometry;
pub mod rpa;
pub mod stats;

pub use channel::{
    llr_from_channel, run_sweep, transmit, ChannelConfig, FerPoint, MessageMode, SimConfig,
};
pub use code::{
    build_generator, encode, is_codeword, ml_decode_oracle, CodeParams, Codeword, GeneratorMatrix,
    Message,
};
pub use error::{Error, Result};
pub use fod::{fht, fht_decode, FodCounter};
pub use geometry::{
    aggregate, boxplus, build_coset_map, project_hard, project_llr, BoxplusMode, CosetMap,
    LlrVector, SubspaceIndex, LLR_CLAMP,
};
pub use rpa::{
    analytic_fod_count, check_convergence, decode, delta, num_projections, preset,
    select_projection_indices, DecodeResult, Preset, PruningConfig, Selection,
};
