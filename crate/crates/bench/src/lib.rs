//! Input fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpa_core::{
    build_generator, encode, llr_from_channel, transmit, ChannelConfig, CodeParams, LlrVector,
    Message,
};

/// Channel LLRs for a random codeword of `params` sent at `ebno_db`.
pub fn noisy_frame(params: CodeParams, ebno_db: f64, seed: u64) -> LlrVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let msg = Message::from_bits((0..params.k()).map(|_| rng.random_range(0..=1u8)).collect());
    let c = encode(&msg, &build_generator(params)).expect("message length is k");
    let ch = ChannelConfig::for_code(ebno_db, params).expect("finite Eb/N0");
    llr_from_channel(&transmit(&c, &ch, &mut rng), &ch)
}
