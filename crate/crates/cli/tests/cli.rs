use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quasifix(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasifix"))
        .args(args)
        .current_dir(cwd)
        .env_remove("QUASIFIX_OUT_DIR")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn certify_quarter(dir: &Path) {
    let o = quasifix(
        &[
            "certify",
            "--map",
            "linear-quarter",
            "--metric",
            "mat2-split-scaled",
            "--regime",
            "forward",
            "--search",
            "--out",
            "cert.json",
        ],
        dir,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn search_finds_one_half() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let v = read_json(&dir.path().join("cert.json"));
    let c = v["certificate"]["a_operator_norm"].as_f64().unwrap();
    assert!((c - 0.5).abs() <= 1e-9, "{c}");
    assert_eq!(v["manifest"]["command"], "certify");
    assert_eq!(v["certificate"]["regime"], "forward-global");
}

#[test]
fn missing_map_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = quasifix(
        &["solve", "--metric", "mat2-split", "--cert", "x.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["check-axioms", "--metric", "mat2-split", "--grid", "1:2"][..],
        &[
            "check-axioms",
            "--metric",
            "mat2-split-scaled",
            "--beta",
            "-1",
        ],
        &[
            "classify",
            "--metric",
            "mat2-split",
            "--seq",
            "1,x",
            "--candidate",
            "0",
        ],
        &["nonsense"],
        &["check-axioms", "--metric", "mat2-split", "--tol", "0"],
    ] {
        assert_eq!(
            quasifix(args, dir.path()).status.code(),
            Some(2),
            "{args:?}"
        );
    }
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"], &["solve", "--help"]] {
        let o = quasifix(args, dir.path());
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn inconsistent_demo_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = quasifix(
        &[
            "demo-integral",
            "--alpha",
            "2",
            "--k",
            "0.3",
            "--report",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("inconsistent"));
    let v = read_json(&dir.path().join("r.json"));
    assert_eq!(v["report"]["regime"], "inconsistent");
    assert!(v["report"]["solve"].is_null());
}

#[test]
fn contractive_demo_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = quasifix(
        &[
            "demo-integral",
            "--alpha",
            "0.5",
            "--k",
            "4",
            "--grid",
            "256",
            "--csv",
            "f.csv",
            "--report",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,f*(x)"));
    assert_eq!(csv.lines().count(), 257);
    let v = read_json(&dir.path().join("r.json"));
    assert_eq!(v["report"]["solve"]["equation_ok"], true);
}

#[test]
fn solve_accepts_wrapped_and_bare_certificates() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let wrapped = read_json(&dir.path().join("cert.json"));
    std::fs::write(
        dir.path().join("bare.json"),
        wrapped["certificate"].to_string(),
    )
    .unwrap();
    for cert in ["cert.json", "bare.json"] {
        let o = quasifix(
            &[
                "solve",
                "--map",
                "linear-quarter",
                "--metric",
                "mat2-split-scaled",
                "--seed",
                "7",
                "--cert",
                cert,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{cert}");
        assert!(stdout(&o).contains("Converged"));
    }
}

#[test]
fn certificate_for_another_metric_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let o = quasifix(
        &[
            "solve",
            "--map",
            "linear-quarter",
            "--metric",
            "mat2-split",
            "--cert",
            "cert.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn max_iter_exhaustion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let o = quasifix(
        &[
            "solve",
            "--map",
            "linear-quarter",
            "--metric",
            "mat2-split-scaled",
            "--seed",
            "7",
            "--cert",
            "cert.json",
            "--max-iter",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MaxIterExceeded"));
}

#[test]
fn solve_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let o = quasifix(
        &[
            "solve",
            "--map",
            "linear-quarter",
            "--metric",
            "mat2-split-scaled",
            "--seed",
            "-3",
            "--cert",
            "cert.json",
            "--trace",
            "t.csv",
            "--report",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&dir.path().join("r.json"));
    let iters = v["report"]["iterations"].as_u64().unwrap() as usize;
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("n,x_n,fwd_step_norm,bwd_step_norm,bound_p")
    );
    assert!(csv.lines().count() > iters);
    // the certificate file is hashed into the manifest
    let inputs = v["manifest"]["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 1);
    assert_eq!(inputs[0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    certify_quarter(dir.path());
    let run = |name: &str| {
        let o = quasifix(
            &[
                "solve",
                "--map",
                "linear-quarter",
                "--metric",
                "mat2-split-scaled",
                "--seed",
                "0.5",
                "--cert",
                "cert.json",
                "--report",
                name,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
        let mut v = read_json(&dir.path().join(name));
        v["manifest"]["timestamp"] = Value::Null;
        v["manifest"]["config"]["command"]["solve"]["report"] = Value::Null;
        v
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn source_date_epoch_fixes_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_quasifix"))
        .args([
            "check-axioms",
            "--metric",
            "mat2-split",
            "--report",
            "r.json",
        ])
        .current_dir(dir.path())
        .env("SOURCE_DATE_EPOCH", "1234")
        .env_remove("QUASIFIX_OUT_DIR")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        read_json(&dir.path().join("r.json"))["manifest"]["timestamp"],
        1234
    );
}

#[test]
fn out_dir_env_redirects_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("outputs");
    let o = Command::new(env!("CARGO_BIN_EXE_quasifix"))
        .args([
            "check-axioms",
            "--metric",
            "periodic",
            "--grid",
            "0,0.25,0.5,0.75",
            "--report",
            "axioms.json",
        ])
        .current_dir(dir.path())
        .env("QUASIFIX_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out.join("axioms.json"));
    assert_eq!(v["report"]["triples_tested"], 64);
    assert!(!dir.path().join("axioms.json").exists());
}

#[test]
fn check_axioms_table_and_random_points() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let o = quasifix(
            &[
                "check-axioms",
                "--metric",
                "mat2-split",
                "--random",
                "6",
                "--seed-rng",
                seed,
            ],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
    };
    let a = run("7");
    assert!(a.contains("points            15"));
    assert!(a.contains("triangle          ok"));
    assert_eq!(a, run("7"));
    let neg = quasifix(
        &[
            "check-axioms",
            "--metric",
            "mat2-split",
            "--grid",
            "-1,-0.5,0",
        ],
        dir.path(),
    );
    assert_eq!(neg.status.code(), Some(0));
    assert_ne!(a, run("8"));
}

#[test]
fn classify_file_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let seq: String = (1..=100)
        .map(|n| format!("{}\n", 1.0 + 1.0 / n as f64))
        .collect();
    std::fs::write(dir.path().join("seq.txt"), seq).unwrap();
    let o = quasifix(
        &[
            "classify",
            "--metric",
            "scalar-forward-one",
            "--seq",
            "seq.txt",
            "--candidate",
            "1",
            "--eps",
            "0.05",
            "--window",
            "50",
            "--trace",
            "t.csv",
            "--report",
            "v.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&dir.path().join("v.json"));
    assert_eq!(v["verdict"]["forward"], "converges");
    assert_eq!(v["verdict"]["backward"], "diverges");
    assert_eq!(v["manifest"]["inputs"][0]["path"], "seq.txt");
    assert!(dir.path().join("t.csv").exists());
}

#[test]
fn certify_with_explicit_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    // 1/√2 along the piecewise orbit is valid, 0.1 is not
    let run = |a: &str| {
        quasifix(
            &[
                "certify",
                "--map",
                "piecewise-quarter",
                "--metric",
                "scalar-backward-one",
                "--regime",
                "orbital",
                "--a",
                a,
            ],
            dir.path(),
        )
    };
    let ok = run("0.7071067811865476");
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(v["certificate"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    assert_eq!(run("0.1").status.code(), Some(1));
    let json = r#"{"realization":"scalar","value":0.75}"#;
    assert_eq!(run(json).status.code(), Some(0));
}

#[test]
fn no_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = quasifix(
        &[
            "certify",
            "--map",
            "piecewise-quarter",
            "--metric",
            "scalar-backward-one",
            "--regime",
            "forward",
            "--search",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no certificate"));
}

#[test]
fn table_map_and_integral_map() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("t.json"),
        "[[1, 0.5], [0.5, 0.25], [0.25, 0.125], [0.125, 0.0625]]",
    )
    .unwrap();
    let o = quasifix(
        &[
            "certify",
            "--map",
            "table",
            "--table",
            "t.json",
            "--metric",
            "mat2-split",
            "--regime",
            "orbital",
            "--seed",
            "1",
            "--orbit-len",
            "2",
            "--a",
            "0.75",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let o = quasifix(
        &[
            "certify",
            "--map",
            "integral",
            "--alpha",
            "0.5",
            "--k",
            "4",
            "--metric",
            "mult-op",
            "--fn-samples",
            "32",
            "--regime",
            "orbital",
            "--a",
            "0.5",
            "--out",
            "c.json",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = quasifix(
        &[
            "solve",
            "--map",
            "integral",
            "--alpha",
            "0.5",
            "--k",
            "4",
            "--metric",
            "mult-op",
            "--fn-samples",
            "32",
            "--cert",
            "c.json",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn gallery_exits_zero_with_two_xfails() {
    let dir = tempfile::tempdir().unwrap();
    let o = quasifix(&["gallery", "--report", "g.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&dir.path().join("g.json"));
    assert_eq!(v["summary"]["xfail"], 2);
    assert_eq!(v["summary"]["fail"], 0);
}
