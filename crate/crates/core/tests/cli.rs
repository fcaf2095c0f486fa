use std::path::Path;
use std::process::{Command, Output};

fn hlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlw")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(code(&hlw(&["euclid-counterexample", "--out", &out])), 0);
    assert_eq!(code(&hlw(&["no-such-experiment", "--out", &out])), 64);
    assert_eq!(code(&hlw(&["lw-ratio", "--param", "region=nowhere", "--out", &out])), 65);
    assert_eq!(code(&hlw(&["lw-ratio", "--bogus-flag"])), 65);
    assert_eq!(code(&hlw(&["--help"])), 0);
}

#[test]
fn writes_results_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let o = hlw(&["sharpness", "--res", "32", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.starts_with("op,n,params,resolution,value,conservative,optimistic,seed"));
    assert_eq!(csv.lines().count(), 4);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["exit_code"], 0);
    assert_eq!(meta["manifest"]["experiment"], "sharpness");
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let threads = [None, None, Some("3")];
    for (d, jobs) in dirs.iter().zip(threads) {
        let out = out_arg(d.path());
        let mut args = vec!["search", "--deterministic", "--seed", "5", "--res", "16", "--out", &out];
        args.extend(["--param", "iterations=4", "--param", "restarts=2"]);
        if let Some(j) = jobs {
            args.extend(["--jobs", j]);
        }
        let o = hlw(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["results.csv", "trace.csv"] {
        let first = std::fs::read(dirs[0].path().join(f)).unwrap();
        for d in &dirs[1..] {
            assert_eq!(first, std::fs::read(d.path().join(f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn runs_a_manifest_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let manifest = dir.path().join("m.json");
    let text = serde_json::json!({
        "experiment": "pairing",
        "resolution": 32,
        "output": out,
    });
    std::fs::write(&manifest, text.to_string()).unwrap();
    let o = hlw(&["run", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("results.csv").exists());

    std::fs::write(&manifest, r#"{"experiment": "pairing", "unknown_field": 1}"#).unwrap();
    assert_eq!(code(&hlw(&["run", manifest.to_str().unwrap()])), 65);
}
