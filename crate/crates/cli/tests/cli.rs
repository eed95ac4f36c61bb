use std::path::Path;
use std::process::{Command, Output};

fn fieldloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fieldloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compare_schemes_reports_distinct_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let out = fieldloc(&["compare-schemes", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&dir.path().join("compare_schemes.json"));
    let reports = json["results"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["scheme"], "Standard");
    assert_eq!(reports[0]["fundamentality_verdict"], false);
    assert_eq!(reports[0]["reasons"], serde_json::json!(["no local number operator"]));
    assert_eq!(reports[1]["scheme"], "NewtonWigner");
    assert_eq!(reports[1]["fundamentality_verdict"], false);
    assert_eq!(reports[1]["reasons"], serde_json::json!(["strong microcausality defect"]));
    assert!(dir.path().join("schemes.csv").exists());
}

#[test]
fn antilocality_mass_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = fieldloc(&[
        "antilocality",
        "--sweep-mass",
        "0.5,1,2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("antilocality_rates.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "mass");
    assert_eq!(&headers[3], "fitted_rate");
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let mass: f64 = rec[0].parse().unwrap();
        let rate: f64 = rec[3].parse().unwrap();
        assert!((rate - mass).abs() < 0.2 * mass, "mass {mass}: rate {rate}");
        n += 1;
    }
    assert_eq!(n, 3);
}

#[test]
fn missing_config_names_the_path() {
    let out = fieldloc(&["vacuum", "--config", "/no/such/dir/run.json"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/no/such/dir/run.json"), "{err}");
}

#[test]
fn invalid_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema\": \"fieldloc-run/1\"}").unwrap();
    let out = fieldloc(&["vacuum", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn unknown_subcommand_fails() {
    let out = fieldloc(&["levitate"]);
    assert!(!out.status.success());
}

#[test]
fn module_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fieldloc_cli::config::DEFAULT_CONFIG
        .replace("\"region2\": { \"start\": 123, \"len\": 4 }", "\"region2\": { \"start\": 41, \"len\": 4 }");
    let path = dir.path().join("overlap.json");
    std::fs::write(&path, cfg).unwrap();
    let out = fieldloc(&[
        "microcausality",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("disjoint"));
}

#[test]
fn default_config_subcommand_round_trips() {
    let out = fieldloc(&["default-config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    fieldloc_cli::RunConfig::parse(&text, Path::new("stdout")).unwrap();
}

#[test]
fn seed_override_changes_sampled_outputs_only() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let out = fieldloc(&["antilocality", "--seed", seed, "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success());
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "antilocality_rates.csv"), read(&b, "antilocality_rates.csv"));
    assert_ne!(read(&a, "antilocality_tails.csv"), read(&b, "antilocality_tails.csv"));
}
