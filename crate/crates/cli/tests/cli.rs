use std::path::Path;
use std::process::{Command, Output};

use fracmix::special::ml;
use tempfile::TempDir;

fn fracmix(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmix"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("FRACMIX_LOG", "error")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing from {text}"))
        .parse()
        .unwrap()
}

const TINY_T: &str = r#"{"domain": {"kind": "interval", "length": 3.141592653589793}, "T": 0.1, "t1": 1.0, "t2": 0.05}"#;

#[test]
fn forward_reproduces_initial_data_and_boundary() {
    let dir = TempDir::new().unwrap();
    let o = fracmix(&["forward", "--orders", "0.7,1.5", "--grid-points", "33"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("tail_bound = "));
    let mut rows = csv::Reader::from_path(dir.path().join("solution.csv")).unwrap();
    assert_eq!(rows.headers().unwrap(), vec!["x", "t", "u"]);
    let mut initial = 0;
    for r in rows.records() {
        let r = r.unwrap();
        let (x, t, u): (f64, f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        if x == 0.0 || x == 1.0 {
            assert_eq!(u, 0.0);
        }
        if t == -50.0 {
            assert!((u - x * (1.0 - x)).abs() < 1e-4, "x {x}: {u}");
            initial += 1;
        }
    }
    assert_eq!(initial, 33);
    let modes = std::fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 33);
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        assert!(fracmix(&["forward", "--grid-points", "17"], d.path()).status.success());
    }
    for f in ["solution.csv", "modes.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn small_depth_is_an_audit_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), TINY_T);
    let o = fracmix(&["forward", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("is not positive"));
    let o = fracmix(&["verify", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(7));
    assert!(stdout(&o).contains("FAIL delta-positive"));
}

#[test]
fn single_mode_observation_matches_scalar_formula() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"domain": {"kind": "interval", "length": 3.141592653589793}, "phi": {"name": "coefficients", "values": [0.8]},
            "modes": 1, "box": {"alpha1": 0.1, "beta1": 1.1, "beta2": 1.6}}"#,
    );
    let o = fracmix(&["observe", "--config", &cfg, "--orders", "0.5,1.4"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let obs: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("observation.json")).unwrap()).unwrap();

    let delta = |t: f64| t * ml(1.4, 2.0, -t.powf(1.4)).unwrap() - ml(1.4, 1.0, -t.powf(1.4)).unwrap();
    let d2 = 0.8 * delta(25.0) / delta(50.0);
    assert!((obs["d2"].as_f64().unwrap() - d2).abs() <= 1e-13 * d2.abs());
    let d1 = (ml(0.5, 1.0, -(10f64).sqrt()).unwrap() * 0.8 / delta(50.0)).powi(2);
    assert!((obs["d1"].as_f64().unwrap() - d1).abs() <= 1e-13 * d1);
    assert!(d1 > 0.0);
    assert_eq!(obs["mode"], "standard");

    let o = fracmix(&["observe", "--config", &cfg, "--orders", "0.5,1.4", "--swapped"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"mode\": \"swapped\""));
}

#[test]
fn observe_then_invert_round_trip() {
    for swapped in [false, true] {
        let dir = TempDir::new().unwrap();
        let mut args = vec!["observe", "--orders", "0.35,1.75"];
        if swapped {
            args.push("--swapped");
        }
        assert!(fracmix(&args, dir.path()).status.success());
        let obs = dir.path().join("observation.json");
        let o = fracmix(&["invert", "--observation", obs.to_str().unwrap()], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!((report_value(&text, "alpha_hat") - 0.35).abs() <= 1e-7);
        assert!((report_value(&text, "beta_hat") - 1.75).abs() <= 1e-7);
        assert_eq!(std::fs::read_to_string(dir.path().join("recovery.txt")).unwrap(), text);
    }
}

#[test]
fn out_of_range_observation_is_a_solvability_violation() {
    let dir = TempDir::new().unwrap();
    assert!(fracmix(&["observe"], dir.path()).status.success());
    let path = dir.path().join("observation.json");
    let mut obs: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    obs["d2"] = serde_json::json!(obs["d2"].as_f64().unwrap() * 100.0);
    std::fs::write(&path, obs.to_string()).unwrap();
    let o = fracmix(&["invert", "--observation", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.contains("violation = beta-above") && text.contains("bracket = "), "{text}");
}

#[test]
fn malformed_inputs_are_io_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"t1\": 10").unwrap();
    let o = fracmix(&["invert", "--observation", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(5));
    let o = fracmix(&["forward", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(5));
    let missing = dir.path().join("missing.json");
    let o = fracmix(&["invert", "--observation", missing.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn invalid_orders_and_usage() {
    let dir = TempDir::new().unwrap();
    assert_eq!(fracmix(&["forward", "--orders", "1.2,1.5"], dir.path()).status.code(), Some(1));
    assert_eq!(fracmix(&["forward", "--orders", "0.5"], dir.path()).status.code(), Some(2));
}

#[test]
fn verify_default_config_passes() {
    let dir = TempDir::new().unwrap();
    let o = fracmix(&["verify"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn verify_near_two_keeps_e2_monotone() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), r#"{"box": {"alpha1": 0.1, "beta1": 1.5, "beta2": 1.95}, "modes": 8}"#);
    let o = fracmix(&["verify", "--config", &cfg], dir.path());
    let text = stdout(&o);
    assert!(text.contains("PASS e2-decreasing"), "{text}");
}

#[test]
fn ml_eval_prints_value() {
    let dir = TempDir::new().unwrap();
    let o = fracmix(&["ml-eval", "2", "1", "-4"], dir.path());
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2f64.cos()).abs() < 1e-14);
}
