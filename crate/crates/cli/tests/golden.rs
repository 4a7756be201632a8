//! Checked-in reports for the bundled corpus, in text and JSON, and their
//! independence from the number of worker threads.
//!
//! `LIEN_UPDATE_GOLDEN=1 cargo test -p lien-cli --test golden` rewrites them.

mod common;

use common::{golden_dir, run, CASES};

#[test]
fn reports_match_golden_files() {
    let update = std::env::var_os("LIEN_UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for &(name, args, code) in CASES {
        for (format, ext) in [("text", "txt"), ("json", "json")] {
            let (out, got) = run(args, &["--format", format]);
            assert_eq!(got, code, "{name} ({format}) exited with {got}");
            let path = golden_dir().join(format!("{name}.{ext}"));
            if update {
                std::fs::write(&path, &out).unwrap();
                continue;
            }
            let want = std::fs::read_to_string(&path)
                .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
            if want != out {
                mismatches.push(format!("{name}.{ext}"));
            }
        }
    }
    assert!(mismatches.is_empty(), "reports differ: {mismatches:?}");
}

#[test]
fn reports_do_not_depend_on_workers() {
    for &(name, args, _) in CASES {
        let (one, _) = run(args, &["--jobs", "1", "--format", "json"]);
        let (four, _) = run(args, &["--jobs", "4", "--format", "json"]);
        assert_eq!(one, four, "{name}");
        let (again, _) = run(args, &["--jobs", "4", "--format", "json"]);
        assert_eq!(four, again, "{name}");
    }
}
