use std::fs;
use std::process::{Command, Output};

use fraccalc::rheology::{Material, ViscoModel};
use serde_json::Value;

fn fraccalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraccalc")).args(args).env_remove("FRACCALC_CONFIG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV, skipping comments and the column line.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (columns, data)
}

#[test]
fn ml_point_value() {
    let o = fraccalc(&["ml", "--alpha", "2", "--z", "-1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.5403023058681398\n");
}

#[test]
fn ml_range_has_provenance_header() {
    let o = fraccalc(&["ml", "--alpha", "1", "--z-min", "-1", "--z-max", "1", "--steps", "2"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# fraccalc "));
    assert_eq!(lines.next().unwrap(), "# command: ml");
    assert!(lines.next().unwrap().starts_with("# params: {"));
    let (cols, data) = rows(&text);
    assert_eq!(cols, ["z", "value"]);
    assert_eq!(data.len(), 3);
    assert!((data[2][1] - 1f64.exp()).abs() < 1e-15);
}

#[test]
fn oscillator_classical_csv() {
    let o = fraccalc(&[
        "osc", "--alpha", "2", "--omega", "1", "--x0", "1", "--v0", "0", "--t-max", "10", "--steps", "1000",
    ]);
    assert!(o.status.success());
    let (cols, data) = rows(&stdout(&o));
    assert_eq!(cols, ["t", "x_closed", "x_volterra", "abs_diff"]);
    assert_eq!(data.len(), 1001);
    for r in data {
        assert!((r[1] - r[0].cos()).abs() <= 1e-8);
    }
}

#[test]
fn figure_columns_match_closed_forms() {
    let o = fraccalc(&["figures", "--id", "fig7", "--alphas", "0.1,0.5,0.9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    assert_eq!(header.len(), 7);
    let mut lines = text.lines().filter(|l| !l.starts_with('#')).skip(1);
    assert!(lines.next().unwrap().starts_with("0,inf,inf,inf,0,0,0"));
    let (_, data) = rows(&text.lines().filter(|l| !l.contains("inf")).collect::<Vec<_>>().join("\n"));
    let unit = Material::new(1.0, 1.0).unwrap();
    for (i, alpha) in [0.1, 0.5, 0.9].into_iter().enumerate() {
        let m = ViscoModel::scott_blair(unit, alpha).unwrap();
        for r in &data {
            assert_eq!(r[1 + i], m.relaxation_at(r[0]));
            assert_eq!(r[4 + i], m.creep_at(r[0]));
        }
    }
}

#[test]
fn impulse_weights_in_header() {
    let text = stdout(&fraccalc(&["figures", "--id", "fig1", "--steps", "10"]));
    assert!(text.contains("# impulse newton-G 1\n"));
    let text = stdout(&fraccalc(&["visco", "--model", "voigt", "--eta", "2.5", "--steps", "10"]));
    assert!(text.contains("# impulse G 2.5\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["fde", "--nu", "0.5", "--lambda", "-1", "--b", "1", "--steps", "400"];
    let a = fraccalc(&args);
    let b = fraccalc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(fraccalc(&["--help"]).status.code(), Some(0));
    assert_eq!(fraccalc(&["frobnicate"]).status.code(), Some(1));
    let o = fraccalc(&["ml", "--alpha", "x", "--z", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--alpha"));
    let o = fraccalc(&["ml", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--z"));
    let o = fraccalc(&["osc", "--alpha", "1.5", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--out"));
    assert_eq!(fraccalc(&["osc", "--alpha", "1.5", "--mu", "0.1"]).status.code(), Some(1));
    assert_eq!(fraccalc(&["osc", "--alpha", "3"]).status.code(), Some(1));
    // residual oracle rejects this solution
    assert_eq!(fraccalc(&["fde", "--nu", "0.2", "--lambda", "1", "--b", "1"]).status.code(), Some(2));
    assert_eq!(fraccalc(&["osc", "--alpha", "1.5", "--rel-tol", "1e-9"]).status.code(), Some(2));
}

#[test]
fn verify_subset_and_override() {
    let o = fraccalc(&["verify-all", "--only", "ml-pairs"]);
    assert!(o.status.success());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    assert!(checks.iter().all(|c| c["group"] == "ml-pairs" && c["id"].as_str().unwrap().starts_with("ml-pair-")));
    let o = fraccalc(&["verify-all", "--only", "ml-identities,oscillator", "--rel-tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["all_pass"], false);
    assert_eq!(fraccalc(&["verify-all", "--only", "nothing"]).status.code(), Some(1));
}

#[test]
fn laplace_check_csv() {
    let o = fraccalc(&["laplace-check", "--suite", "pairs"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "id,group,max_error,tolerance,pass");
    assert!(body[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"steps": 4, "t_max": 2, "osc": {"alpha": 1.5, "steps": 8}}"#).unwrap();
    let via_env =
        Command::new(env!("CARGO_BIN_EXE_fraccalc")).args(["osc"]).env("FRACCALC_CONFIG", &cfg).output().unwrap();
    assert!(via_env.status.success(), "{}", stderr(&via_env));
    let (_, data) = rows(&stdout(&via_env));
    // command section beats top level
    assert_eq!(data.len(), 9);
    assert_eq!(data[8][0], 2.0);
    let flag = fraccalc(&["--config", cfg.to_str().unwrap(), "osc", "--steps", "2"]);
    assert_eq!(rows(&stdout(&flag)).1.len(), 3);
    let out = dir.path().join("x.json");
    let o = fraccalc(&[
        "--config",
        cfg.to_str().unwrap(),
        "visco",
        "--model",
        "maxwell",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    // top-level steps applies when the command has no section
    assert_eq!(doc["data"]["t"].as_array().unwrap().len(), 5);
    fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(fraccalc(&["--config", cfg.to_str().unwrap(), "ml", "--alpha", "1", "--z", "0"]).status.code(), Some(1));
}
