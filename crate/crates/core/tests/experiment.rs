use std::path::Path;
use std::process::Command;

use fracsource::experiment::{
    emit_plot_script, load_config, persist_results, resolve_seed, run_experiment, verify_suite, ExperimentConfig,
};
use fracsource::inverse::Method;
use fracsource::Error;

fn small(extra: &str) -> ExperimentConfig {
    let text = format!(
        r#"{{"alpha": 1.5, "beta": 1.5, "intensity": "exp2", "source_truth": "poly4",
            "fine": {{"h": 0.01, "tau": 0.004}}, "coarse": {{"h": 0.025, "tau": 0.02}},
            "n_modes": 10, "seed": 4{extra}}}"#
    );
    ExperimentConfig::from_json(&text, Path::new(".")).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn runs_are_byte_identical() {
    let cfg = small(r#", "methods": ["tikhonov", "spectral_modes"]"#);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let mut o = run_experiment(&cfg).unwrap();
        persist_results(&mut o, d.path()).unwrap();
    }
    for f in ["trace.csv", "reconstruction.csv", "eigensystem.json"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f} differs");
    }
}

#[test]
fn persisted_csv_reads_back() {
    let cfg = small(r#", "methods": ["tikhonov", "spectral"]"#);
    let mut o = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    persist_results(&mut o, dir.path()).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("reconstruction.csv")).unwrap();
    let head: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(head, ["x", "f_true", "f_hat_tikhonov", "f_hat_spectral"]);
    let rows: Vec<Vec<f64>> = rdr.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), o.x.len());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], o.x[i]);
        assert_eq!(row[1], o.f_true[i]);
        assert_eq!(row[2], o.results[0].f_hat[i]);
    }
    let mut rdr = csv::Reader::from_path(dir.path().join("trace.csv")).unwrap();
    let n = rdr.records().collect::<Result<Vec<_>, _>>().unwrap().len();
    assert_eq!(n, o.trace_noisy.phi.len());
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["seed"], 4);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 4);
    assert_eq!(m["metrics"].as_array().unwrap().len(), 2);
}

#[test]
fn persist_overwrites_an_existing_directory() {
    let cfg = small("");
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a/b");
    let mut o = run_experiment(&cfg).unwrap();
    persist_results(&mut o, &nested).unwrap();
    std::fs::write(nested.join("trace.csv"), "junk").unwrap();
    persist_results(&mut o, &nested).unwrap();
    assert!(read(&nested.join("trace.csv")).starts_with("t,phi_clean,phi_noisy\n"));
    // no temporary files left behind
    assert!(std::fs::read_dir(&nested).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().starts_with('.')));
}

#[test]
fn plot_script_needs_persisted_results() {
    let cfg = small(r#", "methods": ["tikhonov", "spectral_modes"]"#);
    let mut o = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let e = emit_plot_script(&o.manifest, dir.path()).unwrap_err();
    assert!(matches!(e, Error::IOError { .. }));
    assert_eq!(e.exit_code(), 5);
    persist_results(&mut o, dir.path()).unwrap();
    let p = emit_plot_script(&o.manifest, dir.path()).unwrap();
    let s = read(&p);
    // f_true plus both reconstructions
    assert!(s.contains("using 1:2") && s.contains("using 1:3") && s.contains("using 1:4"));
}

#[test]
fn mismatched_orders_record_a_failure_and_keep_tikhonov() {
    let text = r#"{"alpha": 1.4, "beta": 1.6, "fine": {"h": 0.01, "tau": 0.004}, "coarse": {"h": 0.025, "tau": 0.02},
                   "n_modes": 5, "methods": ["tikhonov", "spectral_modes"]}"#;
    let cfg = ExperimentConfig::from_json(text, Path::new(".")).unwrap();
    let o = run_experiment(&cfg).unwrap();
    assert!(o.result(Method::Tikhonov).is_some());
    let f = o.first_failure().unwrap();
    assert_eq!((f.method, f.exit_code), (Method::SpectralModes, 18));
    assert!(o.manifest.notes.iter().any(|n| n.contains("alpha = beta")));
}

#[test]
fn inverse_crime_needs_an_override() {
    let grids = r#", "fine": {"h": 0.02, "tau": 0.02}, "coarse": {"h": 0.02, "tau": 0.02}"#;
    let text = format!(r#"{{"alpha": 1.5, "beta": 1.5, "n_modes": 5{grids}}}"#);
    let cfg = ExperimentConfig::from_json(&text, Path::new(".")).unwrap();
    assert!(matches!(run_experiment(&cfg), Err(Error::InverseCrime)));
    let text = format!(r#"{{"alpha": 1.5, "beta": 1.5, "n_modes": 5, "allow_inverse_crime": true{grids}}}"#);
    let cfg = ExperimentConfig::from_json(&text, Path::new(".")).unwrap();
    let o = run_experiment(&cfg).unwrap();
    assert!(o.manifest.model_error < 1e-12);
}

#[test]
fn config_validation_collects_every_problem() {
    let text =
        r#"{"alpha": 2.5, "intensity": "cosh", "delta": -1, "methods": ["magic"], "fine": {"h": 0.3, "tau": 0.001}}"#;
    match ExperimentConfig::from_json(text, Path::new(".")) {
        Err(Error::ValidationError(v)) => {
            for key in ["alpha", "beta", "intensity", "delta", "methods", "fine.h"] {
                assert!(v.iter().any(|m| m.starts_with(key)), "no message for {key}: {v:?}");
            }
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"alpha": 1.5, "beta": 1.5, "bogus": 1}"#, Path::new(".")),
        Err(Error::ParseError { .. })
    ));
    assert!(matches!(ExperimentConfig::from_json("{ not json", Path::new(".")), Err(Error::ParseError { .. })));
}

#[test]
fn sample_files_resolve_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = String::from("x,f\n");
    for i in 0..=50 {
        let x = i as f64 / 50.0;
        s.push_str(&format!("{x},{}\n", x * (1.0 - x)));
    }
    std::fs::write(dir.path().join("f.csv"), s).unwrap();
    let cfg_path = dir.path().join("c.json");
    std::fs::write(&cfg_path, r#"{"alpha": 1.5, "beta": 1.5, "source_truth": {"samples_file": "f.csv"}}"#).unwrap();
    let cfg = load_config(&cfg_path).unwrap();
    let src = cfg.source();
    assert!((src.eval(0.3) - 0.21).abs() < 1e-3);
    std::fs::write(&cfg_path, r#"{"alpha": 1.5, "beta": 1.5, "source_truth": {"samples_file": "missing.csv"}}"#)
        .unwrap();
    assert!(matches!(load_config(&cfg_path), Err(Error::ValidationError(_))));
    assert_eq!(load_config(&dir.path().join("nope.json")).unwrap_err().exit_code(), 5);
}

#[test]
fn seed_precedence() {
    assert_eq!(resolve_seed(1, None, None).unwrap(), 1);
    assert_eq!(resolve_seed(1, None, Some("9")).unwrap(), 9);
    assert_eq!(resolve_seed(1, Some(3), Some("9")).unwrap(), 3);
    assert!(resolve_seed(1, None, Some("nine")).is_err());
}

#[test]
fn verify_suite_passes() {
    let checks = verify_suite();
    assert!(checks.len() >= 8);
    for c in &checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracsource"))
}

#[test]
fn cli_run_writes_results_and_honours_the_seed_variable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": 1.5, "beta": 1.5, "source_truth": "poly4", "seed": 1,
            "fine": {"h": 0.01, "tau": 0.004}, "coarse": {"h": 0.025, "tau": 0.02}, "n_modes": 5}"#,
    )
    .unwrap();
    let run = |out: &str, env: Option<&str>, extra: &[&str]| {
        let mut c = cli();
        c.args(["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join(out).to_str().unwrap()]).args(extra);
        match env {
            Some(v) => c.env("FRACSOURCE_SEED", v),
            None => c.env_remove("FRACSOURCE_SEED"),
        };
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        read(&dir.path().join(out).join("trace.csv"))
    };
    let base = run("a", None, &[]);
    assert_eq!(run("b", Some("1"), &[]), base);
    assert_ne!(run("c", Some("2"), &[]), base);
    assert_eq!(run("d", Some("2"), &["--seed", "1"]), base);
    assert!(dir.path().join("a/plot.gp").is_file());
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("c/manifest.json"))).unwrap();
    assert_eq!(m["config"]["seed"], 2);
    run("e", None, &["--delta", "0.05", "--method", "both"]);
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("e/manifest.json"))).unwrap();
    assert_eq!(m["config"]["delta"], 0.05);
    assert_eq!(m["metrics"].as_array().unwrap().len(), 2);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"alpha": 3.0}"#).unwrap();
    let o =
        cli().args(["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
    let o =
        cli().args(["run", "--config", "/nonexistent.json", "--out", dir.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(5));
    let o = cli().args(["eigens", "--beta", "1.5", "--n", "3"]).output().unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["beta"], 1.5);
    let o = cli().args(["eigens", "--beta", "0.5", "--n", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cli_verify() {
    let o = cli().arg("verify").output().unwrap();
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().count() >= 8 && s.lines().all(|l| l.starts_with("[PASS]")));
}
