mod common;

use std::path::Path;
use std::process::{Command, Output};

fn meanlip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanlip"))
        .args(args)
        .env_remove("MEANLIP_MAX_SAMPLES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn csv_values(text: &str) -> Vec<(f64, f64)> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let h = rdr.headers().unwrap().clone();
    let pi = h.iter().position(|c| c == "parameter").unwrap();
    let vi = h.iter().position(|c| c == "value").unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (r[pi].parse().unwrap(), r[vi].parse().unwrap())
        })
        .collect()
}

#[test]
fn means_examples() {
    let o = meanlip(&["means", "--fn", "monomial:3", "--space", "hardy", "--p", "4", "--r", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("grid_kind,parameter,value,samples_used,converged\n"), "{text}");
    assert_eq!(csv_values(&text), vec![(0.5, 0.125)]);

    let o = meanlip(&["means", "--fn", "monomial:1", "--space", "bergman", "--p", "2", "--r", "0.8"]);
    let v = csv_values(&stdout(&o))[0].1;
    assert!((v - 0.565685424949238).abs() < 1e-9);
}

#[test]
fn lacunary_grid_matches_coefficient_oracle() {
    let o = meanlip(&["means", "--fn", "lacunary:0.5", "--space", "bergman", "--p", "2", "--grid", "4:10"]);
    assert!(o.status.success());
    let rows = csv_values(&stdout(&o));
    assert_eq!(rows.len(), 7);
    let c = common::lacunary(0.5, 62);
    for (r, v) in rows {
        let want = common::bergman2_sq(&c, r).sqrt();
        assert!(common::rel(v, want) < 1e-10, "r={r}: {v} vs {want}");
    }
}

#[test]
fn fit_examples() {
    let o = meanlip(&["fit", "--fn", "monomial:1", "--condition", "c", "--space", "hardy", "--p", "2"]);
    assert!(o.status.success());
    assert!((json(&o)["alpha_hat"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    // (b) on Lacunary(1/4) in A²: the Bergman weight adds 1/2 to the
    // exponent, so the fit lands near 3/4.
    let o = meanlip(&["fit", "--fn", "lacunary:0.25", "--condition", "b", "--space", "bergman", "--p", "2"]);
    assert!(o.status.success());
    let a = json(&o)["alpha_hat"].as_f64().unwrap();
    assert!((a - 0.75).abs() < 0.1, "{a}");
}

#[test]
fn fit_recovers_a_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let mut text = String::from("grid_kind,parameter,value\n");
    for k in 3..=12 {
        let x = 2f64.powi(-k);
        text += &format!("radius_to_one,{},{}\n", 1.0 - x, 3.0 * x.powf(0.37));
    }
    std::fs::write(&path, text).unwrap();
    let o = meanlip(&["fit", "--csv", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!((json(&o)["alpha_hat"].as_f64().unwrap() - 0.37).abs() < 1e-10);
    let o = meanlip(&["fit", "--csv", path.to_str().unwrap(), "--offset", "-1"]);
    assert!((json(&o)["alpha_hat"].as_f64().unwrap() - 1.37).abs() < 1e-10);
}

#[test]
fn verify_examples() {
    let o = meanlip(&["verify", "--fn", "monomial:1", "--space", "hardy", "--p", "2", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = meanlip(&["verify", "--fn", "constant", "--space", "hardy", "--p", "2"]);
    let report = json(&o);
    assert_eq!(report["degenerate"], serde_json::Value::Bool(true));
    assert!(stdout(&o).contains("ZeroModulus") || stdout(&o).to_lowercase().contains("modulus"));

    let o = meanlip(&["verify", "--fn", "monomial:1", "--space", "hardy", "--p", "2", "--alpha", "0.3"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn weights_examples() {
    let o = meanlip(&["weights", "--w", "power:0.5"]);
    assert_eq!(json(&o)["admissible"], true);
    let o = meanlip(&["weights", "--w", "power:1"]);
    assert_eq!(json(&o)["admissible"], false);
    let o = meanlip(&["weights", "--w", "powerlog:1,1"]);
    let v = json(&o);
    assert_eq!(v["dini"], true);
    assert_eq!(v["condition_b"], false);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| meanlip(args).status.code();
    assert_eq!(code(&["means", "--fn", "bogus", "--r", "0.5"]), Some(2));
    assert_eq!(code(&["means", "--fn", "monomial:1", "--p", "0.5", "--r", "0.5"]), Some(2));
    assert_eq!(code(&["means", "--fn", "monomial:1", "--grid", "1:20"]), Some(2));
    assert_eq!(code(&["means", "--fn", "geometric", "--space", "hardy", "--p", "2", "--r", "1"]), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    std::fs::write(&one, "parameter,value\n0.5,1\n").unwrap();
    assert_eq!(code(&["fit", "--csv", one.to_str().unwrap()]), Some(4));
    assert_eq!(code(&["verify", "--fn", "monomial:1", "--space", "bergman", "--w", "power:0.5"]), Some(5));
    assert_eq!(code(&["verify", "--fn", "lacunary:1", "--space", "hardy", "--w", "power:1"]), Some(5));
    assert_eq!(code(&["fit", "--csv", dir.path().join("missing.csv").to_str().unwrap()]), Some(1));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["fit", "--fn", "lacunary:0.5", "--condition", "a", "--space", "hardy", "--p", "2", "--format", "json"];
    let a = meanlip(&args);
    let b = meanlip(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn files_are_written_whole_or_not_at_all() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("means.json");
    let o = meanlip(&["means", "--fn", "monomial:2", "--grid", "3:6", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);

    let bad = dir.path().join("bad.csv");
    let o = meanlip(&["means", "--fn", "geometric", "--space", "hardy", "--p", "2", "--r", "1", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!Path::new(&bad).exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"space": "bergman", "p": 2, "format": "json"}"#).unwrap();
    let o = meanlip(&["--config", cfg.to_str().unwrap(), "means", "--fn", "monomial:1", "--r", "0.8"]);
    let v = json(&o);
    assert!((v[0]["value"].as_f64().unwrap() - 0.565685424949238).abs() < 1e-9);
    // Flags win over the file.
    let o = meanlip(&["--config", cfg.to_str().unwrap(), "means", "--fn", "monomial:1", "--r", "0.8", "--space", "hardy"]);
    assert!((json(&o)[0]["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    std::fs::write(&cfg, r#"{"nonsense": 1}"#).unwrap();
    let o = meanlip(&["--config", cfg.to_str().unwrap(), "means", "--fn", "monomial:1", "--r", "0.8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_listing() {
    let o = meanlip(&["corpus"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["monomial:5", "lacunary:0.75", "binomial:0.5", "geometric", "log"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn verify_default_corpus_in_bergman() {
    let o = meanlip(&["verify", "--corpus", "default", "--space", "bergman", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let skipped: Vec<&str> = v["skipped"].as_array().unwrap().iter().map(|s| s["function"].as_str().unwrap()).collect();
    assert_eq!(skipped, vec!["geometric"]);
}
