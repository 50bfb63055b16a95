use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpn"))
        .args(args)
        .env_remove("LPN_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn verify_pf_passes_at_order_30() {
    let out = lpn(&["verify-pf", "--n", "1", "--lambda", "1,2", "--order", "30", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "pass");
}

#[test]
fn text_format_is_one_pass_line() {
    let out = lpn(&["verify-pf", "--lambda", "1,2", "--order", "6", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "PASS pf-annihilation\n");
}

#[test]
fn mirror_map_leading_coefficients() {
    let out = lpn(&["mirror-map", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["coefficients"], serde_json::json!(["1", "2", "5", "14"]));
}

#[test]
fn asymp_at_zero_sum_weights_is_flagged_singular() {
    let out = lpn(&["asymp", "--n", "2", "--lambda", "zeta:3", "--k", "3", "--order", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["a_table"]["status"], "singular");
    assert_eq!(v["weights"].as_array().unwrap().len(), 3);
}

#[test]
fn derive_ode_reports_rational_functions_of_l() {
    let out = lpn(&["derive-ode", "--lambda", "1,2", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(3*L - 4)^-2*("), "{text}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["asymp", "--lambda", "1,2/3", "--order", "8", "--k", "2"];
    let (a, b) = (lpn(&args), lpn(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = lpn(&["mirror-map", "--order", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["order"], 3);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify-pf", "--n", "2", "--lambda", "1,2"],
        vec!["verify-pf", "--lambda", "1,2", "--order", "0"],
        vec!["verify-pf", "--order", "5"],
        vec!["verify-pf", "--lambda", "1,x"],
    ] {
        assert_eq!(lpn(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn degenerate_input_exits_3() {
    assert_eq!(lpn(&["verify-pf", "--lambda", "1,1", "--order", "4"]).status.code(), Some(3));
    assert_eq!(lpn(&["derive-ode", "--lambda", "1,2,4", "--order", "4"]).status.code(), Some(3));
}

#[test]
fn fit_with_too_small_windows_fails() {
    let out = lpn(&["fit", "--lambda", "1,2", "--k", "1", "--j-max", "0", "--e-min", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
}

#[test]
fn cache_is_transparent_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify-asymp", "--lambda", "1,2", "--order", "8", "--k", "3"];
    let plain = lpn(&args);
    let mut cached = args.to_vec();
    cached.extend(["--cache-dir", d]);
    let first = lpn(&cached);
    let files = cache_files(dir.path());
    assert!(!files.is_empty());
    let stamps: Vec<_> = files.iter().map(|p| fs::metadata(p).unwrap().modified().unwrap()).collect();
    let second = lpn(&cached);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(cache_files(dir.path()), files);
    let again: Vec<_> = files.iter().map(|p| fs::metadata(p).unwrap().modified().unwrap()).collect();
    assert_eq!(stamps, again);
}

#[test]
fn changing_order_uses_a_new_cache_entry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    lpn(&["verify-pf", "--lambda", "1,2", "--order", "4", "--cache-dir", d]);
    let before = cache_files(dir.path()).len();
    lpn(&["verify-pf", "--lambda", "1,2", "--order", "5", "--cache-dir", d]);
    assert_eq!(cache_files(dir.path()).len(), 2 * before);
}

#[test]
fn corrupt_cache_entry_is_recomputed_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify-pf", "--lambda", "1,2", "--order", "5", "--cache-dir", d];
    let good = lpn(&args);
    let files = cache_files(dir.path());
    fs::write(&files[0], "{not json").unwrap();
    let out = lpn(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, good.stdout);
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt cache entry"));
    let repaired: Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert!(repaired["rows"].is_array());
}

#[test]
fn tampered_series_is_reported_with_its_first_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify-pf", "--lambda", "1,2", "--order", "4", "--k", "1", "--cache-dir", d];
    assert_eq!(lpn(&args).status.code(), Some(0));
    for path in cache_files(dir.path()) {
        let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        v["rows"][2]["coeffs"][0] = Value::String("12345".into());
        fs::write(&path, v.to_string()).unwrap();
    }
    let out = lpn(&args);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    let mismatch = &v["weights"][0]["first_mismatch"];
    assert!(mismatch["d"].is_u64() && mismatch["z"].is_i64(), "{mismatch}");
    let text = lpn(&[&args[..], &["--format", "text"]].concat());
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.starts_with("FAIL"), "{text}");
}
