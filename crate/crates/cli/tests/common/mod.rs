//! The bundled corpus runs shared by the golden and acceptance targets.

use std::path::{Path, PathBuf};
use std::process::Command;

/// Name, arguments relative to the corpus directory, expected exit code.
pub const CASES: &[(&str, &str, i32)] = &[
    ("h1-triangle-Z2", "h1 --nerve triangle.json --group Z2", 0),
    ("h1-triangle-S3", "h1 --nerve triangle.json --group S3.json", 0),
    ("h1-pseudo-circle-S3", "h1 --space pseudo-circle.json --group S3", 0),
    (
        "h1-two-opens-Z2xZ2",
        "h1 --space pseudo-circle.json --cover pseudo-circle-two-opens.json --group Z2xZ2",
        0,
    ),
    ("h1-triangle-explicit-Z2", "h1 --nerve triangle.json --group Z2-explicit.json", 0),
    ("h2-tetrahedron-Z2", "h2 --nerve tetrahedron.json --band Z2-trivial.json", 0),
    ("h2-tetrahedron-S3", "h2 --nerve tetrahedron.json --band S3-trivial.json", 0),
    ("h2-triangle-Z3-inverted", "h2 --band Z3-inverted.json", 0),
    ("torsors-pseudo-circle-S3", "classify-torsors --space pseudo-circle.json --group S3", 0),
    ("torsors-pseudo-circle-Z3", "classify-torsors --space pseudo-circle.json --group Z3.json", 0),
    (
        "descent-constant-S3",
        "descent-check --space pseudo-circle.json --presheaf presheaf-constant-S3.json",
        0,
    ),
    (
        "descent-torsors-Z2",
        "descent --space pseudo-circle.json --presheaf presheaf-torsors-Z2.json --check both",
        0,
    ),
    (
        "stackify-torsors-S3",
        "stackify --space pseudo-circle.json --presheaf presheaf-torsors-S3.json",
        0,
    ),
    ("stackify-product", "stackify --space pseudo-circle.json --presheaf presheaf-product.json", 0),
    ("obstruction-Z2", "obstruction --cocycle2 obstruction-Z2.json", 0),
    ("roundtrip-Z2", "gerbe-roundtrip --cocycle2 Z2-nontrivial.json", 0),
    ("extension-product", "extension-class --extension extension-product.json", 0),
    ("extension-z4", "extension-class --extension extension-z4.json", 0),
    ("verify-bad-cocycle", "verify --cocycle2 bad-cocycle.json", 2),
    ("verify-cocycle1", "verify --cocycle1 cocycle1-triangle.json", 0),
    ("verify-band", "verify --band Z3-inverted.json", 0),
];

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run(args: &str, extra: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_lien"))
        .current_dir(corpus())
        .env_remove("LIEN_BUDGET")
        .args(extra)
        .args(args.split_whitespace())
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 report"),
        out.status.code().unwrap_or(-1),
    )
}
