use std::process::Command;

use serde_json::Value;

fn ppkit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ppkit"))
        .args(args)
        .env("PPKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn report(out: &std::process::Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn bounds_on_the_disk_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = ppkit(&["bounds", "--domain", "disk", "--nodes", "100000", "--seed", "42", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["schema"], "ppkit-report v1");
    assert_eq!(r["pass"], true);
    assert_eq!(r["config"]["seed"], 42);
    assert_eq!(r["config"]["nodes"], 100000);
    let a_hat = r["body"]["A_hat"].as_f64().unwrap();
    assert!(a_hat <= 4.0 * 1.01 && a_hat > 3.9, "{a_hat}");
}

#[test]
fn uniform_weight_on_the_quarter_disk_fails_on_the_counterexample() {
    let out = ppkit(&["norming-verify", "--domain", "quarter-disk", "--weight", "uniform"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Im(1/z²) example"), "{stderr}");
    let r = report(&out);
    assert_eq!(r["pass"], false);
    let failing: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|n| n.starts_with("Im(1/z²) example")), "{failing:?}");
}

#[test]
fn usage_errors_exit_with_status_two() {
    for args in [
        &["frobnicate"][..],
        &["green", "--x", "0.5,0"],
        &["bounds", "--domain", "torus"],
        &["bounds", "--domain", "bidisk"],
        &["green", "--x", "1.5,0", "--y", "0,0"],
        &["norming-verify", "--weight", "heavy"],
    ] {
        let out = ppkit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ppkit"))
        .args(["green", "--x", "0.5,0", "--y", "0,0"])
        .env("PPKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(ppkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible_apart_from_the_timestamp() {
    let args = ["embed", "--w", "0.3,0.1,-0.2,0", "--nodes", "2000", "--seed", "7"];
    let (mut a, mut b) = (report(&ppkit(&args)), report(&ppkit(&args)));
    a["timestamp"] = Value::Null;
    b["timestamp"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(a["pass"], true);
    assert_eq!(a["config"]["extra"]["w"], "0.3,0.1,-0.2,0");
}

#[test]
fn green_reports_closed_form_value() {
    let out = ppkit(&["green", "--x", "0.5,0", "--y", "0,0", "--zeta", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let g = r["body"]["green"].as_f64().unwrap();
    assert!((g - 0.5f64.ln()).abs() < 1e-15);
    // P(x, ζ) = (1 - |x|²) / |x - ζ|² = 0.75 / 0.25
    assert!((r["body"]["poisson"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn embed_csv_is_a_sample_file() {
    let out = ppkit(&["embed", "--w", "0.5,0,0,0", "--nodes", "1500", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# ppkit-sample v1 "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1500);
}

#[test]
fn bidisk_classification_from_the_command_line() {
    let out = ppkit(&["classify", "--alpha", "pi/4", "--c", "0.5", "--nodes", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["body"]["kernel"], "bidisk-mixed");
    assert!((r["body"]["c_hat"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn too_few_nodes_is_a_usage_error() {
    assert_eq!(ppkit(&["classify", "--nodes", "10"]).status.code(), Some(2));
}

#[test]
fn short_pinned_sequence_fails_to_settle() {
    let out = ppkit(&["classify", "--c", "0", "--levels", "5", "--nodes", "5000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL classify"));
}
