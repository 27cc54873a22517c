use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatecheck")).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatecheck")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn plate() -> String {
    program("d3_plate.scp").display().to_string()
}

#[test]
fn validate_clean_program() {
    let o = run(&["validate", &plate()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ok"));
}

#[test]
fn validate_reports_diagnostics_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scp");
    let text = std::fs::read_to_string(program("d3_plate.scp")).unwrap();
    std::fs::write(&bad, text.replacen("q 1 1 ACTIVE boundary=start", "q 1 1 ACTIVE", 1)).unwrap();
    let o = run(&["validate", bad.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("needs a boundary id"), "{v}");
}

#[test]
fn usage_and_io_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["distance"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "/nonexistent/x.scp"]).status.code(), Some(2));
    assert_eq!(run(&["distance", &plate(), "--rounds", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn distance_json_parses() {
    let o = run(&["distance", &plate(), "--rounds", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["distance"], 3);
    assert_eq!(v["rings_checked"], false);
    let witness = v["nests"][0]["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 3);
}

#[test]
fn distance_can_write_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = run(&["distance", &plate(), "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["distance"], 3);
}

#[test]
fn weighted_distance_adds_costs() {
    let o = run(&["distance", &plate(), "--rounds", "2", "--json", "--weighted", "0.001", "--nest", "dual"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nests = v["nests"].as_array().unwrap();
    assert_eq!(nests.len(), 1);
    let cost = nests[0]["pairs"][0]["weighted_cost"].as_f64().unwrap();
    assert!(cost > 0.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["distance", "--json", "--rounds", "4"];
    let with = |n: &str| {
        Command::new(env!("CARGO_BIN_EXE_gatecheck"))
            .env("GATECHECK_THREADS", n)
            .args(args)
            .arg(plate())
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(with("1"), with("4"));
}

#[test]
fn export_names_files_after_program_and_nest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["export", &plate(), "--rounds", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().flatten().map(|e| e.file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["d3_plate.dual.json", "d3_plate.primal.json"]);

    let o = run(&["export", &plate(), "--nest", "primal", "--format", "obj", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let obj = std::fs::read_to_string(dir.path().join("d3_plate.primal.obj")).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("v ")));
    assert!(obj.lines().any(|l| l.starts_with("l ")));
}

#[test]
fn export_under_a_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let o = run(&["export", &plate(), "--out", file.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_logic_plate_passes_and_wrong_table_fails() {
    let o = run(&["verify-logic", &plate(), "--trials", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    let o = run(&["verify-logic", &plate(), "--trials", "20", "--table", "hadamard"]);
    assert_eq!(o.status.code(), Some(1));
}
