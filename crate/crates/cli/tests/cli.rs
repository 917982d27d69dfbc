use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finegame"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn nums(v: &Value) -> Vec<f64> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_f64().expect("number"))
        .collect()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&v).expect("schema compiles")
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn write(dir: &tempfile::TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pd_ghz_example() {
    let o = run(&[
        "scenario",
        "--id",
        "pd-ghz",
        "--params",
        r#"{"a": [0.6, 0], "b": [0.8, 0]}"#,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["scenario_id"], "pd-ghz");
    assert_valid(&schema("report.schema.json"), &r);
    // off the balanced state there are no reference values to compare against
    assert_eq!(nums(&r["inputs"]["a"]), [0.6, 0.0]);
}

#[test]
fn pd_classical_equilibrium() {
    let o = run(&["scenario", "--id", "pd-classical"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(nums(&r["payoffs"]), [1.0, 1.0, 1.0]);
    let certs: Vec<&Value> = r["ne_findings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["type"] == "certificate" && f["is_ne"] == true)
        .collect();
    assert_eq!(certs.len(), 1);
    assert_eq!(nums(&certs[0]["triple"]), [0.0, 0.0, 0.0]);
    for c in r["paper_checks"].as_array().unwrap() {
        assert!(c["abs_diff"].as_f64().unwrap() <= 1e-9, "{c}");
    }
}

#[test]
fn all_reports_match_schema_and_repeat() {
    let a = run(&["scenario", "--all"]);
    let b = run(&["scenario", "--all"]);
    let c = run(&["scenario", "--all", "--parallel"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let reports = stdout_json(&a);
    assert_eq!(reports.as_array().unwrap().len(), 8);
    assert_valid(&schema("report.schema.json"), &reports);
    let deviating: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| !r["paper_deviation"].is_null())
        .map(|r| r["scenario_id"].as_str().unwrap())
        .collect();
    assert_eq!(deviating, ["pd-product"]);
}

#[test]
fn seeded_samples_repeat() {
    let args = [
        "scenario",
        "--id",
        "pd-continuum",
        "--params",
        r#"{"samples": 50}"#,
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["inputs"]["seed"], 11);
}

#[test]
fn out_file_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["scenario", "--id", "pd-product", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let direct = run(&["scenario", "--id", "pd-product"]);
    assert_eq!(fs::read(&out).unwrap(), direct.stdout);

    let md = run(&["scenario", "--id", "pd-product", "--format", "md"]);
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("| scenario | quantity | paper value | computed | \\|Δ\\| |"));
    assert!(text.contains("**paper_deviation:**"));
}

#[test]
fn marginals_fine_and_inversion() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = json!({"kind": "ghz", "a": [h, 0.0], "b": h});
    assert_valid(&schema("state.schema.json"), &state);
    let sp = write(&dir, "ghz.json", &state);

    let o = run(&["marginals", "--state", s(&sp)]);
    assert_eq!(code(&o), 0);
    let m = stdout_json(&o);
    assert_valid(&schema("marginals.schema.json"), &m);
    assert_eq!(m["convention"], "parity");
    assert_eq!(m["p_ab"], 1.0);
    let mp = dir.path().join("m.json");
    fs::write(&mp, &o.stdout).unwrap();

    // converted to conjunction values the set has a joint distribution
    let o = run(&["fine", "--marginals", s(&mp)]);
    assert_eq!(code(&o), 0);
    let f = stdout_json(&o);
    assert_eq!(f["bell_report"]["satisfied"], true);
    assert!(f["joint"].is_array());

    // read literally it violates three inequalities
    let o = run(&["fine", "--marginals", s(&mp), "--literal"]);
    assert_eq!(code(&o), 1);
    let f = stdout_json(&o);
    assert_eq!(f["bell_report"]["satisfied"], false);
    assert!(f["no_joint"].is_object());

    let o = run(&["invert-marginals", "--marginals", s(&mp)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["status"], "feasible");

    let bad = json!({"lambda": 0.5, "mu": 0.5, "nu": 0.5, "p_ab": 0.0, "p_bc": 0.0, "p_ac": 0.0, "xi": 0.5,
                     "convention": "parity"});
    let bp = write(&dir, "bad.json", &bad);
    let o = run(&["invert-marginals", "--marginals", s(&bp)]);
    assert_eq!(code(&o), 1);
    let inv = stdout_json(&o);
    assert_eq!(inv["status"], "infeasible");
}

#[test]
fn equilibrium_modes() {
    let dir = tempfile::tempdir().unwrap();
    let game = json!({"kind": "pd3"});
    assert_valid(&schema("game.schema.json"), &game);
    let gp = write(&dir, "pd.json", &game);

    let o = run(&["ne", "--game", s(&gp), "--mode", "grid", "--resolution", "5"]);
    assert_eq!(code(&o), 0);
    let found = stdout_json(&o);
    assert_eq!(found.as_array().unwrap().len(), 1);
    assert_eq!(nums(&found[0]["triple"]), [0.0, 0.0, 0.0]);

    let o = run(&["ne", "--game", s(&gp), "--triple", "1,1,1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(nums(&stdout_json(&o)["player_slack"]), [-2.0, -2.0, -2.0]);

    let o = run(&["ne", "--game", s(&gp), "--mode", "interior", "--format", "md"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("| triple | [0.29289321881345"));

    let mut rows = vec![[0.0; 3]; 8];
    rows[0] = [1.0, 0.0, 0.0];
    let lopsided = json!({"kind": "custom", "rows": rows});
    assert_valid(&schema("game.schema.json"), &lopsided);
    let lp = write(&dir, "lopsided.json", &lopsided);
    let o = run(&["ne", "--game", s(&lp), "--mode", "interior"]);
    assert_eq!(code(&o), 2, "interior solve needs a symmetric table");
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = json!({"lambda": 0.5, "mu": 0.5, "nu": 0.5, "p_ab": 0.9, "p_bc": 0.1, "p_ac": 0.1, "xi": 0.0,
                     "convention": "conjunction"});
    let bp = write(&dir, "bad.json", &bad);
    let o = run(&["fine", "--marginals", s(&bp)]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("p_ab"));

    let o = run(&["scenario", "--id", "pd-ghz", "--params", r#"{"bogus": 1}"#]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("params.bogus"));

    let o = run(&[
        "scenario",
        "--id",
        "pd-classical",
        "--params",
        r#"{"pd": [7, 9, 3, 0, 4, 5]}"#,
    ]);
    assert_eq!(code(&o), 2);

    let o = run(&["scenario", "--id", "nope"]);
    assert_eq!(code(&o), 2);

    let o = run(&["marginals", "--state", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);

    let w = write(&dir, "w.json", &json!({"kind": "w", "c": [1, 1, 1]}));
    let o = run(&["marginals", "--state", s(&w)]);
    assert_eq!(code(&o), 2);

    let o = run(&["ne", "--game", s(&w), "--triple", "0.5,0.5"]);
    assert_eq!(code(&o), 2);

    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}
