use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn dimers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimers")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn spec(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn poly_prints_the_normalized_square_octagon_polynomial() {
    let o = dimers(&["poly", "--spec", &spec("square_octagon.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "P = 5 - z - 1/z - w - 1/w");
}

#[test]
fn poly_json_carries_schema_and_terms() {
    let o = dimers(&["poly", "--spec", &spec("honeycomb.json"), "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "poly");
    assert_eq!(v["polynomial"]["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn phase_of_square_octagon_at_zero_field_is_gaseous() {
    let o = dimers(&["phase", "--spec", &spec("square_octagon.json"), "--bx", "0", "--by", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "gaseous, component slope (0,0)");
}

#[test]
fn zn_matches_the_square_torus_count() {
    let o = dimers(&["zn", "--spec", &spec("square.json"), "--n", "2"]);
    assert_eq!(stdout(&o).trim(), "Z(G_2) = 24");
}

#[test]
fn missing_spec_and_bad_arguments_exit_2() {
    assert_eq!(dimers(&["poly", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(dimers(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dimers(&["zn", "--spec", &spec("square.json"), "--n", "0"]).status.code(), Some(2));
    assert_eq!(dimers(&["variance", "--spec", &spec("square.json"), "--range", "5,2"]).status.code(), Some(2));
}

#[test]
fn invalid_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"whites\": []}").unwrap();
    assert_eq!(dimers(&["poly", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unreachable_tolerance_exits_3() {
    let o = dimers(&["ronkin", "--spec", &spec("honeycomb.json"), "--resolution", "3", "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("amoeba.svg");
    let args = ["amoeba", "--spec", &spec("square.json"), "--resolution", "40", "--svg", svg.to_str().unwrap()];
    assert_eq!(dimers(&args).status.code(), Some(0));
    let csv = dir.path().join("amoeba.csv");
    assert!(csv.exists(), "figure commands also write their CSV");
    fs::write(&svg, "keep").unwrap();
    assert_eq!(dimers(&args).status.code(), Some(2));
    assert_eq!(fs::read_to_string(&svg).unwrap(), "keep");
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(dimers(&forced).status.code(), Some(0));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<?xml"));
}

#[test]
fn four_by_four_amoeba_has_five_holes_two_strips_four_tentacles() {
    let o = dimers(&["amoeba", "--spec", &spec("square_4x4_weighted.json")]);
    assert_eq!(stdout(&o).trim(), "5 bounded, 2 semi-bounded, 4 unbounded complement components");
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let o = dimers(&[
            "sample", "--spec", &spec("honeycomb.json"), "--n", "6", "--count", "3", "--sweeps", "20", "--seed", seed,
            "--json", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(path).unwrap()
    };
    assert_eq!(run("5", "a.json"), run("5", "b.json"));
    assert_ne!(run("5", "c.json"), run("6", "d.json"));
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = dimers(&["loops", "--spec", &spec("honeycomb.json"), "--sizes", "4,6", "--runs", "40", "--csv", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn harnack_reports_a_clean_check_for_honeycomb() {
    let o = dimers(&["harnack", "--spec", &spec("honeycomb.json"), "--samples", "50", "--hex", "2", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert!(v["transfer"]["identity"]["max_relative_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["transfer"]["eigenvalues"]["holds"], true);
}
