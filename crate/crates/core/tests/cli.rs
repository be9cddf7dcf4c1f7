//! End-to-end CLI contract: exit codes, byte-stable artifacts, the CSV
//! header, and the config echo in the JSON summary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stplab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stplab-cli-{tag}-{}", std::process::id()));
    fs::remove_dir_all(&dir).ok();
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_support_end_to_end() {
    let dir = temp_dir("classify");
    let status = bin()
        .args(["classify-support", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.join("classify_support.json")).unwrap();
    assert!(text.contains("\"kind\": \"IsolatedRight\""));
    assert!(text.contains("\"y\": \"2/3\""));
    assert!(text.contains("\"s_x\": \"1/3\""));
    // The summary embeds the full config under "config".
    assert!(text.contains("\"config\""));
    assert!(text.contains("\"experiment\": \"classify-support\""));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_config_exits_2_and_writes_nothing() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("bad.json");
    fs::write(&cfg, r#"{ "horizon": "not a number" }"#).unwrap();
    let out = bin()
        .args(["kgs-verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("kgs_verify.csv").exists());
    assert!(!dir.join("kgs_verify.json").exists());
    fs::remove_dir_all(&dir).ok();

    let dir = temp_dir("unknownfield");
    let cfg = dir.join("bad.json");
    fs::write(&cfg, r#"{ "horizons": 10 }"#).unwrap();
    let out = bin()
        .args(["kgs-verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "unknown fields must be rejected"
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn precision_exhaustion_exits_3() {
    let dir = temp_dir("budget");
    // 128 bits cannot transport balls along ten thousand Fibonacci times.
    let out = bin()
        .args([
            "rotation-counterexample",
            "--horizon",
            "10000",
            "--bits",
            "128",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn counting_runs_are_byte_identical_with_documented_header() {
    let dir1 = temp_dir("det1");
    let dir2 = temp_dir("det2");
    for dir in [&dir1, &dir2] {
        let status = bin()
            .args([
                "kgs-verify",
                "--horizon",
                "2000",
                "--samples",
                "10",
                "--seed",
                "3",
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let csv1 = fs::read(dir1.join("kgs_verify.csv")).unwrap();
    let csv2 = fs::read(dir2.join("kgs_verify.csv")).unwrap();
    assert_eq!(csv1, csv2);
    let json1 = fs::read(dir1.join("kgs_verify.json")).unwrap();
    let json2 = fs::read(dir2.join("kgs_verify.json")).unwrap();
    assert_eq!(json1, json2);

    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h,sample_index,N,Psi,ratio"));
    // 10 samples x 5 checkpoints, LF line endings throughout.
    assert_eq!(lines.count(), 50);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));

    let summary: serde_json::Value =
        serde_json::from_str(&String::from_utf8(json1).unwrap()).unwrap();
    assert_eq!(summary["config"]["experiment"], "kgs-verify");
    assert_eq!(summary["config"]["samples"], 10);
    assert!(summary["version"].is_string());
    fs::remove_dir_all(&dir1).ok();
    fs::remove_dir_all(&dir2).ok();
}

#[test]
fn flags_override_config_fields() {
    let dir = temp_dir("override");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{ "horizon": 500, "samples": 5, "seed": 1 }"#).unwrap();
    let status = bin()
        .args(["kgs-verify", "--config"])
        .arg(&cfg)
        .args(["--samples", "7", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("kgs_verify.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["samples"], 7);
    assert_eq!(summary["config"]["horizon"], 500);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn t_sequence_csv_schema() {
    let dir = temp_dir("tseq");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{ "n_max": 5 }"#).unwrap();
    let status = bin()
        .args(["t-sequence", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.join("t_sequence.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,t_n");
    assert_eq!(lines[1], "1,1/2");
    assert_eq!(lines[2], "2,1/4");
    assert_eq!(lines[5], "5,1/10");
    fs::remove_dir_all(&dir).ok();
}
