use std::path::Path;
use std::process::{Command, Output};

fn lien(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lien"))
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
        .env_remove("LIEN_BUDGET")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn triangle_z2_has_two_classes() {
    let o = lien(&["h1", "--nerve", "triangle.json", "--group", "Z2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\nclasses: 2\n"));
}

#[test]
fn tetrahedron_z2_band_has_two_classes() {
    let o = lien(&["h2", "--nerve", "tetrahedron.json", "--band", "Z2-trivial.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\nclasses: 2\n"));
}

#[test]
fn bad_cocycle_names_the_failing_triple() {
    let o = lien(&["verify", "--cocycle2", "bad-cocycle.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(U0,U1,U2)"));
    assert!(stdout(&o).contains("valid: false"));
}

#[test]
fn small_budget_exits_with_three() {
    let o = lien(&["--budget", "10", "h1", "--nerve", "triangle.json", "--group", "S3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("budget exceeded"));
}

#[test]
fn budget_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lien"))
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
        .env("LIEN_BUDGET", "10")
        .args(["h1", "--nerve", "triangle.json", "--group", "S3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_file_is_a_validation_error() {
    let o = lien(&["h1", "--nerve", "nowhere.json", "--group", "Z2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn unknown_group_is_a_validation_error() {
    let o = lien(&["h1", "--nerve", "triangle.json", "--group", "Z0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsorted_tuple_key_is_rejected() {
    let dir = std::env::temp_dir().join(format!("lien-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let doc = serde_json::json!({
        "nerve": corpus.join("tetrahedron.json").to_string_lossy(),
        "band": { "K": "Z2" },
        "g": { "(U1,U0,U2)": "1" }
    });
    let path = dir.join("unsorted.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = lien(&["verify", "--cocycle2", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("increasing order"), "{}", stderr(&o));
}

#[test]
fn timing_is_opt_in() {
    let plain = lien(&["h1", "--nerve", "triangle.json", "--group", "Z2"]);
    assert!(!stdout(&plain).contains("timing"));
    let timed = lien(&["--timing", "h1", "--nerve", "triangle.json", "--group", "Z2"]);
    assert!(stdout(&timed).contains("timing: "));
}

#[test]
fn not_a_prestack_cannot_be_stackified() {
    let o = lien(&["stackify", "--space", "pseudo-circle.json", "--presheaf", "presheaf-constant-S3.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not a prestack"));
}
