use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpa_core::rpa::{analytic_fod_count, PruningConfig};
use rpa_core::{
    build_generator, decode, encode, is_codeword, llr_from_channel, ml_decode_oracle, transmit,
    ChannelConfig, CodeParams, FodCounter, Message,
};

#[test]
fn rm42_agrees_with_ml_at_high_snr() {
    let params = CodeParams::new(4, 2).unwrap();
    let gen = build_generator(params);
    let ch = ChannelConfig::for_code(6.0, params).unwrap();
    let cfg = PruningConfig::factors(1.0, 1.0, 1.0).with_n_max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut agree, mut rpa_errors, mut ml_errors) = (0, 0, 0);
    for _ in 0..500 {
        let msg = Message::from_bits((0..params.k()).map(|_| rng.random_range(0..=1u8)).collect());
        let c = encode(&msg, &gen).unwrap();
        let llr = llr_from_channel(&transmit(&c, &ch, &mut rng), &ch);
        let mut counter = FodCounter::new();
        let out = decode(&llr, params, &cfg, &mut counter).unwrap().codeword;
        let ml = ml_decode_oracle(&llr, params).unwrap();
        agree += usize::from(out == ml);
        rpa_errors += usize::from(out != c);
        ml_errors += usize::from(ml != c);
        assert_eq!(counter.total(), 15);
    }
    assert!(agree >= 495, "agreement {agree}/500");
    assert!(rpa_errors >= ml_errors);
}

#[test]
fn output_of_converged_decode_is_usually_a_codeword() {
    let params = CodeParams::new(5, 2).unwrap();
    let gen = build_generator(params);
    let ch = ChannelConfig::for_code(4.0, params).unwrap();
    let cfg = PruningConfig::factors(1.0, 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut codewords = 0;
    for _ in 0..200 {
        let msg = Message::from_bits((0..params.k()).map(|_| rng.random_range(0..=1u8)).collect());
        let c = encode(&msg, &gen).unwrap();
        let llr = llr_from_channel(&transmit(&c, &ch, &mut rng), &ch);
        let out = decode(&llr, params, &cfg, &mut FodCounter::new())
            .unwrap()
            .codeword;
        codewords += usize::from(is_codeword(&out, params));
    }
    assert!(codewords >= 190, "{codewords}/200");
}

#[test]
fn fods_per_frame_do_not_depend_on_the_channel() {
    let params = CodeParams::new(7, 2).unwrap();
    let cfg = PruningConfig::factors(1.0, 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = encode(&Message::zeros(params.k()), &build_generator(params)).unwrap();
    for ebno in [-2.0, 1.0, 4.0, 10.0] {
        let ch = ChannelConfig::for_code(ebno, params).unwrap();
        let llr = llr_from_channel(&transmit(&c, &ch, &mut rng), &ch);
        let mut counter = FodCounter::new();
        decode(&llr, params, &cfg, &mut counter).unwrap();
        assert_eq!(counter.total(), 381);
        assert_eq!(counter.total(), analytic_fod_count(params, &cfg));
    }
}

#[test]
fn early_stop_never_exceeds_the_full_count() {
    let params = CodeParams::new(6, 2).unwrap();
    let full = PruningConfig::factors(1.0, 1.0, 1.0);
    let stopping = full.clone().with_early_stop(0.05);
    let bound = analytic_fod_count(params, &full);
    let ch = ChannelConfig::for_code(5.0, params).unwrap();
    let c = encode(&Message::zeros(params.k()), &build_generator(params)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut saved = false;
    for _ in 0..50 {
        let llr = llr_from_channel(&transmit(&c, &ch, &mut rng), &ch);
        let mut counter = FodCounter::new();
        let res = decode(&llr, params, &stopping, &mut counter).unwrap();
        assert!(counter.total() <= bound);
        saved |= res.converged_early && counter.total() < bound;
    }
    assert!(saved);
}
