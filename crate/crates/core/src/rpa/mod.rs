//! Recursive projection-aggregation decoding with multi-factor pruning.
//!
//! Unpruned RPA, sparse RPA, scheduled RPA and the multi-factor pruned
//! decoder are all one [`PruningConfig`]; see [`Preset`].

mod decoder;
mod pruning;

pub use decoder::{check_convergence, decode, DecodeResult};
pub use pruning::{
    analytic_fod_count, delta, num_projections, parse_factor, preset, product_form_mfp_count,
    product_form_rpa_count, select_projection_indices, EarlyStop, Preset, PruningConfig, Selection,
    DEFAULT_N_MAX, DEFAULT_THETA,
};
