use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn molab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molab"))
        .current_dir(dir)
        .env_remove("MOLAB_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write_cfg(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const HALF: &str = r#"{"grid":{"lo":[-1],"hi":[1],"res":[1024]},"growth":{"kind":"power","p":0.5}}"#;

#[test]
fn lux_indicator_power_half_is_measure_squared() {
    let d = tempfile::tempdir().unwrap();
    write_cfg(d.path(), "cfg.json", HALF);
    for (c, r) in [(0.1, 0.25), (-0.5, 0.125), (0.0, 0.75)] {
        let ball = format!("{c},{r}");
        let out = molab(d.path(), &["lux", "--config", "cfg.json", "--ball", &ball]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let norm = json(&out)["results"]["norm"].as_f64().unwrap();
        let exact = (2.0 * r) * (2.0 * r);
        assert!((norm - exact).abs() <= 1e-8 * exact, "{norm} vs {exact}");
    }
    assert!(d.path().join("molab-out/lux.json").exists());
}

#[test]
fn unknown_command_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(molab(d.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(molab(d.path(), &["lux", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_errors_carry_location() {
    let d = tempfile::tempdir().unwrap();
    write_cfg(
        d.path(),
        "bad.json",
        "{\"grid\":{\"lo\":[-1],\"hi\":[1],\"res\":[64]},\n\"growth\":{\"kind\":\"power\",\"p\":\"x\"}}",
    );
    let out = molab(d.path(), &["lux", "--config", "bad.json", "--corpus", "constant"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_input_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(molab(d.path(), &["campanato"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable_across_runs_and_threads() {
    let d = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = molab(d.path(), &["campanato", "--corpus", "log_abs", "--s", "1", "--threads", threads]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, std::fs::read(d.path().join("molab-out/campanato.csv")).unwrap())
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn carleson_refuses_outside_a1_unless_forced() {
    let d = tempfile::tempdir().unwrap();
    write_cfg(
        d.path(),
        "w.json",
        r#"{"grid":{"lo":[-1],"hi":[1],"res":[256]},"growth":{"kind":"weighted_power","p":1,"weight":{"abs_power":0.5}}}"#,
    );
    let out = molab(d.path(), &["carleson", "--config", "w.json", "--corpus", "log_abs"]);
    assert_eq!(out.status.code(), Some(1));
    let out = molab(d.path(), &["carleson", "--config", "w.json", "--corpus", "log_abs", "--force"]);
    assert!(out.status.success());
    let warnings = json(&out)["warnings"].to_string();
    assert!(warnings.contains("forced"), "{warnings}");
}

#[test]
fn atom_files_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let out = molab(d.path(), &["atoms", "make", "--corpus", "random_seeded(5)", "--ball", "0.2,0.25", "--s", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = molab(d.path(), &["atoms", "validate", "--atom", "molab-out/atom.csv"]);
    assert_eq!(json(&out)["results"]["passed"], Value::Bool(true));
    let out = molab(d.path(), &["atoms", "pair", "--atom", "molab-out/atom.csv", "--corpus", "sign"]);
    assert_eq!(json(&out)["results"]["pass"], Value::Bool(true));
}

#[test]
fn plots_are_written() {
    let d = tempfile::tempdir().unwrap();
    assert!(molab(d.path(), &["jn", "--corpus", "log_abs", "--ball", "0,1"]).status.success());
    assert!(molab(d.path(), &["equiv", "--corpus", "sign"]).status.success());
    for f in ["jn.svg", "jn.csv", "equiv.svg"] {
        let text = std::fs::read_to_string(d.path().join("molab-out").join(f)).unwrap();
        assert!(!text.is_empty());
    }
}
