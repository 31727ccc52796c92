use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpa"))
        .args(args)
        .env_remove("RPA_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// Copies a config into `dir`, pointing its outputs at files inside `dir`.
fn staged_config(dir: &Path, name: &str, csv: &Path, json: Option<&Path>) -> PathBuf {
    let mut text = fs::read_to_string(data(name))
        .unwrap()
        .replace("PLACEHOLDER", &csv.display().to_string());
    if let Some(json) = json {
        text.push_str(&format!("json = \"{}\"\n", json.display()));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn encode_binary_and_hex() {
    let o = rpa(&["encode", "--m", "3", "--r", "1", "--msg", "1010"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "11001100\n");
    let o = rpa(&["encode", "--m", "3", "--r", "1", "--msg", "0xa"]);
    assert_eq!(stdout(&o), "11001100\n");
}

#[test]
fn encode_rejects_wrong_length() {
    let o = rpa(&["encode", "--m", "3", "--r", "1", "--msg", "101"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = rpa(&["encode", "--m", "3", "--r", "4", "--msg", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decode_recovers_codeword() {
    // Codeword 11001100 with one weak wrong sign.
    let llr = "-4,-4,4,4,-4,-4,4,-0.5";
    let o = rpa(&["decode", "--m", "3", "--r", "1", "--llr", llr]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "11001100\n");

    let o = rpa(&[
        "decode", "--m", "3", "--r", "2", "--llr", llr, "--preset", "rpa", "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["codeword"], "11001100");
    assert_eq!(v["fods"], 21);
}

#[test]
fn decode_reads_file_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("llr.txt");
    fs::write(&path, "5 5 5 5\n5 5 5 5\n").unwrap();
    let o = rpa(&[
        "decode",
        "--m",
        "3",
        "--r",
        "2",
        "--llr-file",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "00000000\n");

    let o = rpa(&["decode", "--m", "3", "--r", "2", "--llr", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpa(&[
        "decode",
        "--m",
        "3",
        "--r",
        "2",
        "--llr",
        "1,2,3,4,5,6,7,inf",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fods_counts() {
    let cases: [(&[&str], &str); 5] = [
        (&["--m", "7", "--r", "2", "--preset", "rpa"], "381"),
        (&["--m", "8", "--r", "3", "--preset", "rpa"], "291465"),
        (
            &[
                "--m", "7", "--r", "2", "--gamma", "2/3", "--ditr", "1/4", "--drec", "1/2",
            ],
            "113",
        ),
        (
            &[
                "--m", "8", "--r", "3", "--preset", "mfp", "--gamma", "3/4", "--ditr", "1/3",
                "--drec", "3/4",
            ],
            "22544",
        ),
        (&["--m", "6", "--r", "3", "--schedule", "4,8"], "32"),
    ];
    for (args, expected) in cases {
        let mut full = vec!["fods"];
        full.extend_from_slice(args);
        let o = rpa(&full);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).trim(), expected, "{args:?}");
    }
    let o = rpa(&[
        "fods",
        "--m",
        "7",
        "--r",
        "2",
        "--preset",
        "mfp",
        "--gamma",
        "2/3",
        "--ditr",
        "1/4",
        "--drec",
        "1/2",
        "--measure",
    ]);
    assert_eq!(stdout(&o), "113\n113\n");
}

#[test]
fn fods_rejects_bad_schedule() {
    let o = rpa(&["fods", "--m", "6", "--r", "3", "--schedule", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpa(&["fods", "--m", "6", "--r", "3", "--schedule", "64,8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpa(&["fods", "--m", "6", "--r", "3", "--gamma", "3/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fod_table_output() {
    let o = rpa(&["fod-table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("code,decoder,fods,kind"));
    assert_eq!(lines.next(), Some("\"RM(7,2)\",RPA,381,computed"));
    let computed: Vec<&str> = text
        .lines()
        .filter(|l| l.ends_with(",computed"))
        .map(|l| l.rsplit(',').nth(1).unwrap())
        .collect();
    assert_eq!(computed, ["381", "291465", "113", "22544"]);

    let o = rpa(&[
        "fod-table",
        "--preset",
        "rpa_sch",
        "--d",
        "2",
        "--m",
        "7",
        "--r",
        "2",
    ]);
    assert_eq!(stdout(&o), "223\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("221"));
}

const CSV_HEADER: &str =
    "ebno_db,frames,frame_errors,bit_errors,fer,ber,fods_total,fods_per_frame,wall_seconds";

#[test]
fn simulate_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let config = staged_config(dir.path(), "small_sweep.toml", &csv, Some(&json));
    let o = rpa(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row.len(), 9);
        let frames: u64 = row[1].parse().unwrap();
        let errors: u64 = row[2].parse().unwrap();
        assert!(errors >= 20 || frames == 2000);
        assert_eq!(row[8], "0.0");
    }

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["points"].as_array().unwrap().len(), 2);
    assert_eq!(report["points"][0]["ebno_db"], 1.0);
}

#[test]
fn simulate_csv_to_stdout_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = staged_config(dir.path(), "small_sweep.toml", Path::new("-"), None);
    let config = config.to_str().unwrap();
    let one = rpa(&["simulate", "--config", config, "--threads", "1"]);
    let three = rpa(&["simulate", "--config", config, "--threads", "3"]);
    let again = Command::new(env!("CARGO_BIN_EXE_rpa"))
        .args(["simulate", "--config", config])
        .env("RPA_THREADS", "2")
        .output()
        .unwrap();
    assert!(one.status.success() && three.status.success() && again.status.success());
    assert!(stdout(&one).starts_with(CSV_HEADER));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn simulate_check_prints_normalized_config() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("never.csv");
    let config = staged_config(dir.path(), "small_sweep.toml", &csv, None);
    let o = rpa(&["simulate", "--config", config.to_str().unwrap(), "--check"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("schema_version = 1"));
    assert!(!csv.exists());
}

#[test]
fn simulate_exit_codes() {
    let o = rpa(&[
        "simulate",
        "--config",
        data("bad_key.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gama"));
    let o = rpa(&[
        "simulate",
        "--config",
        data("bad_code.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpa(&["simulate", "--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing-dir/out.csv");
    let config = staged_config(dir.path(), "small_sweep.toml", &unwritable, None);
    let o = rpa(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let o = rpa(&["simulate", "--config", path.to_str().unwrap(), "--check"]);
            assert!(
                o.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&o.stderr)
            );
            seen += 1;
        }
    }
    assert!(seen >= 6);
}
