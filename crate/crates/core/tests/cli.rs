use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_npovm"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn real(rows: &[&[f64]]) -> Value {
    json!({
        "dim": rows.len(),
        "entries": rows.iter().map(|r| r.iter().map(|x| json!([x])).collect::<Vec<_>>()).collect::<Vec<_>>()
    })
}

fn p(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

#[test]
fn implement_worked_example() {
    let out = run(&["implement", &p(&data("pt_decomposition.json"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["c"].as_f64().unwrap(), 2.0);
    assert!((r["acceptance"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(r["max_ratio_error"].as_f64().unwrap() < 1e-9);
    assert!(r["lemma1_spread"].as_f64().unwrap() < 1e-10);
}

#[test]
fn non_psd_s_is_an_invariant_violation() {
    let dir = TempDir::new().unwrap();
    let dec = json!({
        "dim": 2,
        "terms": {
            "0": [{"map": {"dim": 2, "builtin": "transpose"}, "s": real(&[&[1.5, 0.0], &[0.0, -0.5]])}],
            "1": [{"map": {"dim": 2, "builtin": "identity"}, "s": real(&[&[-0.5, 0.0], &[0.0, 1.5]])}]
        }
    });
    let out = run(&["implement", &write(&dir, "dec.json", &dec)]);
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["status"], "error");
}

#[test]
fn wrong_sum_is_an_invariant_violation() {
    let dir = TempDir::new().unwrap();
    let dec = json!({
        "dim": 2,
        "terms": {"0": [{"map": {"dim": 2, "builtin": "identity"}, "s": real(&[&[1.0, 0.0], &[0.0, 0.5]])}]}
    });
    let out = run(&["implement", &write(&dir, "dec.json", &dec)]);
    assert_eq!(code(&out), 3);
}

#[test]
fn povm_with_wrong_sum_is_rejected() {
    let dir = TempDir::new().unwrap();
    let povm = json!({
        "dim": 2,
        "outcomes": [
            {"label": "0", "matrix": real(&[&[0.5, 0.0], &[0.0, 0.5]])},
            {"label": "r", "matrix": real(&[&[0.2, 0.0], &[0.0, 0.2]])}
        ]
    });
    let state = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let out = run(&[
        "simulate",
        &write(&dir, "povm.json", &povm),
        "--state",
        &write(&dir, "rho.json", &state),
        "--reject",
        "r",
        "--shots",
        "10",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invert_with_the_wrong_constant_fails_the_rejection_condition() {
    let povm = p(&data("pt_povm.json"));
    let k = p(&data("pt_fixed_space.json"));
    let ok = run(&["invert", &povm, "--reject", "2", "--subspace", &k, "--c0", "2"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = run(&["invert", &povm, "--reject", "2", "--subspace", &k, "--c0", "3"]);
    assert_eq!(code(&bad), 5);
    let inferred = run(&["invert", &povm, "--reject", "2", "--subspace", &k]);
    assert_eq!(code(&inferred), 0);
}

#[test]
fn invert_without_rejection_mass_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let povm = json!({
        "dim": 2,
        "outcomes": [
            {"label": "0", "matrix": real(&[&[1.0, 0.0], &[0.0, 1.0]])},
            {"label": "r", "matrix": real(&[&[0.0, 0.0], &[0.0, 0.0]])}
        ]
    });
    let k = json!({"dim": 2, "spanning": [real(&[&[1.0, 0.0], &[0.0, 1.0]])]});
    let out = run(&[
        "invert",
        &write(&dir, "povm.json", &povm),
        "--reject",
        "r",
        "--subspace",
        &write(&dir, "k.json", &k),
    ]);
    assert_eq!(code(&out), 6);
}

#[test]
fn verify_worked_example() {
    let out = run(&[
        "verify",
        &p(&data("pt_npovm.json")),
        &p(&data("pt_povm.json")),
        &p(&data("pt_fixed_space.json")),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn asd_exit_codes() {
    assert_eq!(code(&run(&["asd", &p(&data("orthonormal_family.json"))])), 0);
    assert_eq!(code(&run(&["asd", &p(&data("two_state_family.json"))])), 0);
    assert_eq!(code(&run(&["asd", &p(&data("near_singular_family.json"))])), 3);
    assert_eq!(code(&run(&["asd", &p(&data("nonuniform_family.json"))])), 5);
    let z2 = run(&["asd", &p(&data("z2_rep.json"))]);
    assert_eq!(code(&z2), 0);
    assert!((report(&z2)["c"].as_f64().unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn unreadable_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["implement", &p(&missing)])), 2);
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&run(&["implement", &p(&garbage)])), 2);
    assert_eq!(code(&run(&["demo-pt", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn non_hermitian_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let povm = json!({
        "dim": 2,
        "outcomes": [
            {"label": "0", "matrix": real(&[&[1.0, 0.3], &[0.0, 1.0]])},
            {"label": "r", "matrix": real(&[&[0.0, -0.3], &[0.0, 0.0]])}
        ]
    });
    let state = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let out = run(&[
        "simulate",
        &write(&dir, "povm.json", &povm),
        "--state",
        &write(&dir, "rho.json", &state),
        "--reject",
        "r",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["demo-pt", "--shots", "2000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["demo-pt", "--shots", "2000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.json");
    let out = run(&["implement", &p(&data("pt_decomposition.json")), "--out", &p(&target)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert_eq!(written["command"], "implement");
}

#[test]
fn simulate_matches_expected_rates() {
    let out = run(&[
        "simulate",
        &p(&data("pt_povm.json")),
        "--state",
        &p(&data("pt_rho1.json")),
        "--reject",
        "2",
        "--shots",
        "20000",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let acc = r["acceptance_rate"].as_f64().unwrap();
    assert!((acc - 0.5).abs() < 4.0 * (0.25f64 / 20000.0).sqrt());
}
