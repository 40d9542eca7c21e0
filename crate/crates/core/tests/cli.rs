//! End-to-end runs of the `dephasim` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn dephasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dephasim"))
        .args(args)
        .env_remove("DEPHASIM_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn central() -> Value {
    json!({ "c_up": [std::f64::consts::FRAC_1_SQRT_2, 0.0], "c_down": [std::f64::consts::FRAC_1_SQRT_2, 0.0] })
}

fn mode(omega0: f64, omega: f64, big_omega: f64, p_up: f64, lambda: [f64; 2]) -> Value {
    json!({
        "omega0": omega0, "omega": omega, "big_omega": big_omega,
        "alpha": [p_up.sqrt(), 0.0], "beta": [(1.0 - p_up).sqrt(), 0.0],
        "lambda": lambda,
    })
}

fn two_mode_coherent() -> Value {
    json!({
        "central": central(),
        "modes": [mode(0.3, 0.2, 1.0, 0.7, [0.5, 0.1]), mode(0.8, 0.1, 1.3, 0.2, [-0.3, 0.4])],
        "phonons": { "kind": "coherent" },
        "time": { "start": 0.0, "end": 5.0, "points": 40 },
    })
}

fn ensemble_config(n_modes: usize) -> Value {
    json!({
        "central": central(),
        "ensemble": { "n_modes": n_modes, "seed": 7 },
        "phonons": { "kind": "coherent" },
        "time": { "start": 0.0, "end": 10.0, "points": 101 },
    })
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn eval_writes_csv_with_exact_origin() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &two_mode_coherent());
    let out = dir.path().join("r.csv");
    let o = dephasim(&[
        "eval",
        "--config",
        &cfg,
        "--method",
        "coherent",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("t,re_r,im_r,abs_r"));
    assert_eq!(
        text.lines().nth(1),
        Some("0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0")
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r[3] <= 1.0 + 1e-12));
    assert!(!text.contains('\r'));
}

#[test]
fn every_method_runs_and_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut thermal = two_mode_coherent();
    thermal["phonons"] = json!({ "kind": "thermal", "temperature": 0.8 });
    let coherent = write_config(&dir, "c.json", &two_mode_coherent());
    let thermal = write_config(&dir, "t.json", &thermal);
    for (cfg, method) in [
        (&coherent, "coherent"),
        (&coherent, "short-time"),
        (&coherent, "gaussian"),
        (&coherent, "spin-only"),
        (&coherent, "oracle"),
        (&thermal, "thermal-paper"),
        (&thermal, "thermal-half"),
        (&thermal, "oracle"),
    ] {
        let a = dephasim(&["eval", "--config", cfg, "--method", method]);
        let b = dephasim(&[
            "eval",
            "--config",
            cfg,
            "--method",
            method,
            "--threads",
            "2",
        ]);
        assert!(
            a.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{method}");
    }
}

#[test]
fn seeded_ensemble_is_deterministic_and_seed_sensitive() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &ensemble_config(6));
    let run = |seed: &str| {
        dephasim(&[
            "eval", "--config", &cfg, "--method", "coherent", "--seed", seed,
        ])
        .stdout
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn gaussian_on_polarized_bath_is_sum_of_squared_couplings() {
    let dir = TempDir::new().unwrap();
    let value = json!({
        "central": central(),
        "modes": [mode(0.3, 0.2, 1.0, 1.0, [0.5, 0.0]), mode(0.7, 0.15, 0.9, 1.0, [0.0, 2.0])],
        "phonons": { "kind": "coherent" },
        "time": { "start": 0.0, "end": 3.0, "points": 31 },
    });
    let cfg = write_config(&dir, "p.json", &value);
    let o = dephasim(&["eval", "--config", &cfg, "--method", "gaussian"]);
    assert!(o.status.success());
    let sum = 0.2f64 * 0.2 + 0.15 * 0.15;
    for row in csv_rows(&stdout(&o)) {
        let expected = (-2.0 * sum * row[0] * row[0]).exp();
        assert!((row[3] - expected).abs() < 1e-15, "{row:?}");
    }
}

#[test]
fn schema_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let mut both = two_mode_coherent();
    both["ensemble"] = json!({ "n_modes": 3 });
    let mut unknown = two_mode_coherent();
    unknown["modes"][1]["omegaa"] = json!(1.0);
    let mut neither = two_mode_coherent();
    neither.as_object_mut().unwrap().remove("modes");
    for (name, value) in [("both", both), ("unknown", unknown), ("neither", neither)] {
        let cfg = write_config(&dir, name, &value);
        let o = dephasim(&["eval", "--config", &cfg, "--method", "coherent"]);
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"central\": ").unwrap();
    let o = dephasim(&[
        "eval",
        "--config",
        bad.to_str().unwrap(),
        "--method",
        "coherent",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn model_errors_exit_3_and_name_the_mode() {
    let dir = TempDir::new().unwrap();
    let mut value = two_mode_coherent();
    value["modes"][1]["alpha"] = json!([0.9, 0.0]);
    let cfg = write_config(&dir, "n.json", &value);
    let o = dephasim(&["eval", "--config", &cfg, "--method", "coherent"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains('1'));

    let mut thermal = two_mode_coherent();
    thermal["phonons"] = json!({ "kind": "thermal", "temperature": 1.0 });
    let cfg = write_config(&dir, "t.json", &thermal);
    let o = dephasim(&["eval", "--config", &cfg, "--method", "coherent"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_config_is_an_io_error() {
    let o = dephasim(&[
        "eval",
        "--config",
        "/nonexistent/run.json",
        "--method",
        "coherent",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_coherent_passes_and_writes_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &two_mode_coherent());
    let table = dir.path().join("err.csv");
    let o = dephasim(&[
        "compare",
        "--config",
        &cfg,
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    assert!(report.contains("status: pass"));
    let worst: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("max_abs_error_coherent: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(worst < 1e-8);
    assert_eq!(std::fs::read_to_string(&table).unwrap().lines().count(), 41);
}

#[test]
fn compare_thermal_names_half_coth() {
    let dir = TempDir::new().unwrap();
    let value = json!({
        "central": central(),
        "modes": [mode(0.3, 0.2, 1.0, 0.7, [0.0, 0.0])],
        "phonons": { "kind": "thermal", "temperature": 1.0 },
        "time": { "start": 0.0, "end": 5.0, "points": 30 },
    });
    let cfg = write_config(&dir, "t.json", &value);
    let o = dephasim(&["compare", "--config", &cfg]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("coth_variant_matching_oracle: half"));
}

#[test]
fn truncation_ceiling_surfaces_as_compute_error() {
    let dir = TempDir::new().unwrap();
    let mut value = json!({
        "central": central(),
        "modes": [mode(0.3, 5.0, 1.0, 0.5, [0.0, 0.0])],
        "phonons": { "kind": "coherent" },
        "time": { "start": 0.0, "end": 5.0, "points": 10 },
    });
    value["oracle"] = json!({ "n_max_ceiling": 8 });
    let cfg = write_config(&dir, "x.json", &value);
    let o = dephasim(&["compare", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr)
        .to_lowercase()
        .contains("trunc"));
}

#[test]
fn limits_pass_on_default_and_zero_coupling() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &ensemble_config(5));
    let o = dephasim(&["limits", "--config", &cfg]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report = stdout(&o);
    for check in [
        "zurek_limit: pass",
        "large_omega_limit: pass",
        "low_temperature: pass",
    ] {
        assert!(report.contains(check), "{report}");
    }

    let mut value = two_mode_coherent();
    value["modes"][0]["omega"] = json!(0.0);
    value["modes"][1]["omega"] = json!(0.0);
    let cfg = write_config(&dir, "z.json", &value);
    let o = dephasim(&["limits", "--config", &cfg]);
    assert!(o.status.success());
    let report = stdout(&o);
    assert!(report
        .lines()
        .filter(|l| l.starts_with("zurek k=") || l.starts_with("large_omega k="))
        .all(|l| l.contains("sup_distance=0.0000000000000000e0")));
}

#[test]
fn temperature_sweep_is_monotone() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &two_mode_coherent());
    let out = dir.path().join("sweep.csv");
    let o = dephasim(&[
        "sweep",
        "--config",
        &cfg,
        "--axis",
        "temperature",
        "--range",
        "0.1:10:25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("T,abs_r_at_t_star"));
    let col: Vec<f64> = csv_rows(&text).iter().map(|r| r[1]).collect();
    assert_eq!(col.len(), 25);
    assert!(col.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn single_point_sweeps_emit_one_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &ensemble_config(4));
    for (axis, range) in [("temperature", "2:2:1"), ("n-modes", "20:20:1")] {
        let o = dephasim(&["sweep", "--config", &cfg, "--axis", axis, "--range", range]);
        assert!(
            o.status.success(),
            "{axis}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(stdout(&o).lines().count(), 2, "{axis}");
    }
}

#[test]
fn n_modes_sweep_reports_gap() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.json", &ensemble_config(4));
    let o = dephasim(&[
        "sweep", "--config", &cfg, "--axis", "n-modes", "--range", "10:200:3",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        vec![10.0, 105.0, 200.0]
    );
    assert!(rows.iter().all(|r| r[3] < 0.05));
}

#[test]
fn threads_env_var_is_accepted() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &two_mode_coherent());
    let base = dephasim(&["eval", "--config", &cfg, "--method", "coherent"]);
    let o = Command::new(env!("CARGO_BIN_EXE_dephasim"))
        .args(["eval", "--config", &cfg, "--method", "coherent"])
        .env("DEPHASIM_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(o.stdout, base.stdout);
    assert!(Path::new(&cfg).exists());
}
