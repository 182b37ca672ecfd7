//! End-to-end command line tests: exit codes, determinism, golden files,
//! report schema conformance, and the on-disk memo cache.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oridt"))
}

fn config(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn validate_reports_partitions() {
    let out = run(&["--config", &config("a2_symplectic.json"), "validate"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["partitions"]["q0_plus"], serde_json::json!(["-1"]));
    assert_eq!(v["partitions"]["q1_sigma"], serde_json::json!(["a"]));
    assert_eq!(v["finite_type"]["finite_type"], true);
}

#[test]
fn dilog_identity_example() {
    let out = run(&[
        "--config",
        &config("a2_symplectic.json"),
        "dilog",
        "--identity",
        "a2-symplectic",
        "--bound",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["summary"], "equal through total dimension 4");
}

#[test]
fn orientifold_series_example() {
    let out = run(&[
        "--config",
        &config("a2_symplectic.json"),
        "series",
        "--kind",
        "orientifold",
        "--theta",
        "plus",
        "--bound",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["dim"], serde_json::json!([0, 0]));
    assert_eq!(terms[0]["coeff"], "1");
    assert_eq!(terms[1]["dim"], serde_json::json!([1, 1]));
    assert_eq!(terms[1]["coeff"], "1");
}

#[test]
fn oracle_example_on_k2() {
    let out = run(&[
        "--config",
        &config("k2_symplectic.json"),
        "oracle",
        "--theta",
        "plus",
        "--prime",
        "3",
        "--dim",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["selfdual"]["formula"], "4");
    assert_eq!(v["selfdual"]["oracle"], "4");
    assert_eq!(v["selfdual"]["matches"], true);
}

#[test]
fn wallcross_and_factorize_round() {
    let out = run(&[
        "--config",
        &config("a2_symplectic.json"),
        "wallcross",
        "--theta",
        "plus",
        "--theta",
        "minus",
        "--bound",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["equal"], true);

    let out = run(&[
        "--config",
        &config("a2_symplectic.json"),
        "factorize",
        "--theta",
        "plus",
        "--orientifold",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["residual_ok"], true);
    assert_eq!(v["omega_sigma"][0]["dim"], serde_json::json!([0, 0]));
    assert_eq!(v["omega_sigma"][0]["value"], 1);
    assert_eq!(v["omega_sigma"][1]["dim"], serde_json::json!([1, 1]));
    assert_eq!(v["omega_sigma"][1]["value"], 1);

    let out = run(&[
        "--config",
        &config("a2_symplectic.json"),
        "delta",
        "--d",
        "1,0",
        "--e",
        "0,0",
        "--theta",
        "plus",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["i_value"], 1);
    assert_eq!(v["delta"], 1);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "--config",
        &config("a4_symplectic.json"),
        "series",
        "--kind",
        "orientifold",
        "--theta",
        "std",
        "--bound",
        "4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let args = [
        "--config",
        &config("k2_symplectic.json"),
        "oracle",
        "--theta",
        "plus",
        "--prime",
        "3",
        "--dim",
        "2,2",
    ];
    let one = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn golden_comparison_flag() {
    let dir = std::env::temp_dir().join(format!("oridt-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let args = [
        "--config",
        &config("a2_orthogonal.json"),
        "series",
        "--kind",
        "semistable",
        "--theta",
        "plus",
        "--bound",
        "3",
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    std::fs::write(dir.join("series.json"), &first.stdout).unwrap();

    let golden = dir.to_string_lossy().into_owned();
    let ok = bin()
        .args(args)
        .args(["--golden", &golden])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    std::fs::write(dir.join("series.json"), b"not the same\n").unwrap();
    let bad = bin()
        .args(args)
        .args(["--golden", &golden])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_conform_to_published_schema() {
    let schema_text = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json"),
    )
    .unwrap();
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let required = &schema["commandRequired"];

    let cases: Vec<Vec<&str>> = vec![
        vec!["validate"],
        vec!["series", "--kind", "total", "--bound", "3"],
        vec!["wallcross", "--theta", "plus", "--theta", "minus", "--bound", "3"],
        vec!["factorize", "--theta", "plus", "--bound", "3"],
        vec!["oracle", "--theta", "plus", "--prime", "3", "--dim", "1,1"],
        vec!["dilog", "--identity", "pentagon", "--bound", "3"],
        vec!["delta", "--d", "1,0", "--e", "0,0", "--theta", "plus"],
    ];
    let cfg = config("a2_symplectic.json");
    for case in cases {
        let mut full = vec!["--config", cfg.as_str()];
        full.extend(&case);
        let out = bin().args(&full).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "command {case:?} failed");
        let v = stdout_json(&out);
        assert_eq!(v["schema_version"], 1);
        let command = v["command"].as_str().unwrap();
        for field in required[command].as_array().unwrap() {
            let name = field.as_str().unwrap();
            assert!(
                v.get(name).is_some(),
                "report for {command} is missing required field {name}"
            );
        }
    }
}

#[test]
fn memo_cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("oridt-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let args = [
        "--config",
        &config("k2_symplectic.json"),
        "series",
        "--kind",
        "orientifold",
        "--theta",
        "plus",
        "--bound",
        "4",
    ];
    let first = bin()
        .args(args)
        .env("ORIDT_CACHE", &dir)
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(files.len(), 1, "one cache file per (quiver, theta)");
    let second = bin()
        .args(args)
        .env("ORIDT_CACHE", &dir)
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn error_exit_codes() {
    // missing config: exit 2 with a structured error object
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "usage");

    // unparseable config: exit 2
    let dir = std::env::temp_dir();
    let bad = dir.join(format!("oridt-bad-{}.json", std::process::id()));
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["--config", bad.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&bad).ok();

    // sigma-incompatible stability for an orientifold series: exit 2
    let cfgtext = std::fs::read_to_string(config("a2_symplectic.json")).unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&cfgtext).unwrap();
    cfg["stabilities"]["skew"] = serde_json::json!({"-1": 1, "1": 1});
    let tweaked = dir.join(format!("oridt-skew-{}.json", std::process::id()));
    std::fs::write(&tweaked, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = run(&[
        "--config",
        tweaked.to_str().unwrap(),
        "series",
        "--kind",
        "orientifold",
        "--theta",
        "skew",
        "--bound",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // cap exceeded: exit 3
    cfg["oracle"] = serde_json::json!({"primes": [3], "point_cap": 2});
    std::fs::write(&tweaked, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = run(&[
        "--config",
        tweaked.to_str().unwrap(),
        "oracle",
        "--theta",
        "plus",
        "--prime",
        "3",
        "--dim",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "cap-exceeded");
    std::fs::remove_file(&tweaked).ok();
}
