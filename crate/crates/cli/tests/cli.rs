use grushin_cli::{run, EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION};
use std::path::PathBuf;

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grushin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn argv(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

#[test]
fn constant_prints_and_exits_cleanly() {
    assert_eq!(run(argv(&["constant", "--n", "1"])), EXIT_OK);
}

#[test]
fn unknown_estimate_is_a_configuration_error() {
    assert_eq!(run(argv(&["verify", "--estimate", "nonsense"])), EXIT_CONFIG);
}

#[test]
fn inadmissible_aniso_defaults_are_refused() {
    assert_eq!(run(argv(&["verify", "--estimate", "aniso_schrodinger", "--n", "2"])), EXIT_CONFIG);
}

#[test]
fn transform_then_evolve_round_trip_files() {
    let coeffs = tmp("c.json");
    let series = tmp("s.json");
    let cfg = tmp("t.toml");
    std::fs::write(
        &cfg,
        "[transform]\nn = 1\nmax_degree = 8\nlambda = { layout = \"uniform\", half_count = 10, spacing = 0.2 }\ntime = { half_width = 8.0, count = 32 }\nx_order = 32\nbox_order = 16\n",
    )
    .unwrap();
    assert_eq!(run(argv(&["transform", "--config", cfg.to_str().unwrap(), "--out", coeffs.to_str().unwrap()])), EXIT_OK);
    assert_eq!(
        run(argv(&["evolve", "--input", coeffs.to_str().unwrap(), "--times", "0,-1.5,2", "--out", series.to_str().unwrap()])),
        EXIT_OK
    );
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&series).unwrap()).unwrap();
    assert_eq!(v["times"].as_array().unwrap().len(), 3);
}

#[test]
fn report_with_failing_rows_exits_with_validation_code() {
    let out = tmp("r.json");
    assert_eq!(
        run(argv(&["verify", "--estimate", "prop11", "--format", "json", "--out", out.to_str().unwrap()])),
        EXIT_OK
    );
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    v["rows"][0]["pass"] = serde_json::Value::Bool(false);
    std::fs::write(&out, v.to_string()).unwrap();
    assert_eq!(run(argv(&["report", out.to_str().unwrap()])), EXIT_VALIDATION);
}
