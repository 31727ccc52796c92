use rpa_core::channel::{write_csv, write_json, SweepReport};
use rpa_core::rpa::PruningConfig;
use rpa_core::stats::{intervals_overlap, wilson_interval};
use rpa_core::{run_sweep, CodeParams, MessageMode, SimConfig};

fn config(ebno: Vec<f64>) -> SimConfig {
    let mut cfg = SimConfig::new(
        CodeParams::new(5, 2).unwrap(),
        PruningConfig::factors(1.0, 0.5, 1.0),
        ebno,
    );
    cfg.seed = 17;
    cfg.min_frame_errors = 50;
    cfg
}

#[test]
fn all_zero_and_random_messages_agree() {
    let mut cfg = config(vec![2.0]);
    cfg.min_frame_errors = 200;
    let random = run_sweep(&cfg).unwrap().remove(0);
    cfg.message_mode = MessageMode::AllZero;
    let zero = run_sweep(&cfg).unwrap().remove(0);
    let a = wilson_interval(random.frame_errors, random.frames, 0.95);
    let b = wilson_interval(zero.frame_errors, zero.frames, 0.95);
    assert!(intervals_overlap(a, b), "{a:?} vs {b:?}");
}

#[test]
fn fer_decreases_with_snr() {
    let points = run_sweep(&config(vec![0.0, 2.0, 4.0])).unwrap();
    for w in points.windows(2) {
        assert!(
            w[1].fer < w[0].fer,
            "{} dB: {} then {} dB: {}",
            w[0].ebno_db,
            w[0].fer,
            w[1].ebno_db,
            w[1].fer
        );
    }
    for p in &points {
        assert_eq!(p.frame_errors, 50);
        assert!(p.ber <= p.fer);
    }
}

#[test]
fn fods_per_frame_is_constant_without_early_stop() {
    let mut cfg = SimConfig::new(
        CodeParams::new(7, 2).unwrap(),
        PruningConfig::factors(1.0, 1.0, 1.0),
        vec![1.0],
    );
    cfg.min_frame_errors = 5;
    let p = run_sweep(&cfg).unwrap().remove(0);
    assert_eq!(p.fods_per_frame, 381.0);
    assert_eq!(p.fods_total, 381 * p.frames);
}

#[test]
fn max_frames_caps_the_run() {
    let mut cfg = config(vec![8.0]);
    cfg.max_frames = 300;
    let p = run_sweep(&cfg).unwrap().remove(0);
    assert_eq!(p.frames, 300);
    assert!(p.frame_errors < 50);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut cfg = config(vec![1.0, 3.0]);
    cfg.threads = Some(1);
    let one = run_sweep(&cfg).unwrap();
    cfg.threads = Some(3);
    let three = run_sweep(&cfg).unwrap();
    assert_eq!(one, three);
    cfg.seed += 1;
    assert_ne!(run_sweep(&cfg).unwrap(), one);
}

#[test]
fn json_report_round_trips() {
    let cfg = config(vec![3.0]);
    let points = run_sweep(&cfg).unwrap();
    let mut out = Vec::new();
    write_json(cfg.code, &points, &mut out).unwrap();
    let report: SweepReport = serde_json::from_slice(&out).unwrap();
    assert_eq!(report.schema_version, 1);
    assert_eq!(report.code, cfg.code);
    assert_eq!(report.points, points);

    let mut csv = Vec::new();
    write_csv(&points, &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 2);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config(vec![]);
    assert!(run_sweep(&cfg).is_err());
    cfg.ebno_points = vec![1.0];
    cfg.threads = Some(0);
    assert!(run_sweep(&cfg).is_err());
    cfg.threads = None;
    cfg.decoder = PruningConfig::explicit(vec![4, 4]);
    assert!(run_sweep(&cfg).is_err());
}
