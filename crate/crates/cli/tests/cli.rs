use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux-lab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("darboux-lab-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (head, rows)
}

#[test]
fn build_two_soliton_csv() {
    let out = run(&["build", "--n", "2", "--kappa", "1,2", "--tau", "0,0"]);
    assert!(out.status.success());
    let (head, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(head, ["x", "V", "psi_1", "psi_2", "re_psi_k", "im_psi_k"]);
    assert_eq!(rows.len(), 41);
    let mid = rows.iter().min_by(|a, b| a[0].abs().total_cmp(&b[0].abs())).unwrap();
    assert!(mid[0].abs() < 1e-12 && (mid[1] + 6.0).abs() < 1e-10, "{mid:?}");
}

#[test]
fn build_free_and_invalid_specs() {
    let out = run(&["build", "--n", "0", "--grid", "11"]);
    assert!(out.status.success());
    let (head, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(head, ["x", "V", "re_psi_k", "im_psi_k"]);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[1] == 0.0));

    let out = run(&["build", "--n", "2", "--kappa", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OrderingViolation"));
    let out = run(&["build", "--n", "3", "--kappa", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("LengthMismatch"));
}

#[test]
fn verify_selections() {
    let (code, v) = json(&["verify", "--all", "--class", "complete-break", "--n", "1", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert!(v["summary"]["total"].as_u64().unwrap() >= 6);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["schema"], "darboux-lab/1");

    let (code, v) = json(&["verify", "--id", "TRIG_IDEN", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert!(v["results"][0]["max_rel_residual"].as_f64().unwrap() <= 1e-13);

    let (code, v) = json(&["verify", "--id", "X7_RED", "--n", "3", "--no-timestamp"]);
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert_eq!(r["threshold"], 1e-7);
    assert!(r["pass"] == true && !r["citation"].as_str().unwrap().is_empty());
}

#[test]
fn verify_on_an_explicit_system() {
    let args = ["verify", "--all", "--kappa", "1", "--tau", "0.2", "--kappa2", "1.4", "--tau2", "-0.3", "--no-timestamp"];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    assert!(v["summary"]["not_applicable"].as_u64().unwrap() > 0);
    let out = run(&["verify", "--id", "A1_ISO01", "--kappa", "1", "--tau", "0.2", "--kappa2", "1.4", "--tau2", "-0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotApplicable"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--id", "NOPE"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--id", "A1_XX01", "--n", "2"]).status.code(), Some(2));
    let (code, v) = json(&["verify", "--id", "A1_XX01", "--tol", "1e-30", "--no-timestamp"]);
    assert_eq!(code, 3);
    assert_eq!(v["summary"]["failed"], 1);
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--id", "TRIG_IDEN,A1_XX02", "--seed", "7", "--no-timestamp"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["verify", "--id", "TRIG_IDEN,A1_XX02", "--seed", "8", "--no-timestamp"]);
    assert_ne!(a.stdout, other.stdout);
    let (_, v) = json(&["verify", "--id", "TRIG_IDEN"]);
    assert!(v["timestamp"].is_u64());
}

#[test]
fn susy_classes_and_orders() {
    let (code, v) = json(&["susy", "--kappa", "1,2", "--tau", "0,0", "--kappa2", "1,2", "--tau2", "0.3,0.7", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "ExactGeneric");
    assert_eq!(v["orders"], serde_json::json!([2, 3, 5, 5]));
    assert!(v["central_charge"]["max_rel_residual"].as_f64().unwrap() <= 1e-8);

    let (code, v) = json(&["susy", "--preset", "special-n2", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "SpecialCequal");
    assert_eq!(v["orders"], serde_json::json!([1, 4, 5, 5]));

    let (code, v) = json(&["susy", "--preset", "common-shift", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "PartialSameLevel");
    let ledger: Vec<u64> = v["order_ledger"]["orders"].as_array().unwrap().iter().map(|o| o[2].as_u64().unwrap()).collect();
    assert_eq!(ledger, [2, 5]);

    let out = run(&["susy", "--kappa", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MissingLowerSpec"));
}

#[test]
fn spectrum_scatter_and_pauli() {
    let dir = scratch("oracles");
    let d = dir.to_str().unwrap();
    let code = run(&["spectrum", "--n", "2", "--kappa", "1,2", "--tau", "0.3,-0.2", "--out", d, "--no-timestamp"]).status.code();
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("spectrum.json")).unwrap()).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-4);
    assert!(std::fs::read_to_string(dir.join("spectrum.csv")).unwrap().starts_with("index,eigenvalue\n"));

    let (code, v) = json(&["scatter", "--k", "0.7", "--kappa", "1,2", "--tau", "0.3,-0.2", "--no-timestamp"]);
    assert_eq!(code, 0);
    assert!(v["momenta"][0]["abs_r"].as_f64().unwrap() <= 1e-6);
    assert!(v["momenta"][0]["phase_error"].as_f64().unwrap() <= 1e-6);

    let out = run(&["pauli", "--preset", "special-n2", "--out", d, "--no-timestamp"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("pauli.json")).unwrap()).unwrap();
    assert!(v["phi"]["deviation"].as_f64().unwrap() <= 1e-9);
    let (head, rows) = csv_rows(&std::fs::read_to_string(dir.join("pauli.csv")).unwrap());
    assert_eq!(head, ["x", "a", "phi", "bz"]);
    assert_eq!(rows.len(), 41);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_under_flags() {
    let dir = scratch("config");
    let file = dir.join("run.cfg");
    std::fs::write(&file, "# two solitons\nkappa = 1,2\ntau = 0.3,-0.2\nk = 0.5\nno-timestamp = true\n").unwrap();
    let f = file.to_str().unwrap();
    let (code, v) = json(&["scatter", "--config", f]);
    assert_eq!(code, 0);
    assert_eq!(v["momenta"][0]["k"], 0.5);
    assert!(v.get("timestamp").is_none());
    let (_, v) = json(&["scatter", "--config", f, "--k", "2"]);
    assert_eq!(v["momenta"][0]["k"], 2.0);
    assert_eq!(v["spec"]["kappa"], serde_json::json!([1.0, 2.0]));

    std::fs::write(&file, "colour = blue\n").unwrap();
    let out = run(&["scatter", "--config", f]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}
