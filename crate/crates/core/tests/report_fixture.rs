//! The shipped acceptance summary must reproduce its recorded report byte
//! for byte.

use std::path::PathBuf;

use ppw::report::{build_report, emit_outputs, Verdict};
use ppw::sweep::read_summary;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn report_matches_golden_file() {
    let summary = read_summary(&fixture("acceptance_summary.csv")).unwrap();
    let report = build_report(&summary);
    let golden = std::fs::read_to_string(fixture("acceptance_report.txt")).unwrap();
    assert_eq!(report.text, golden);
}

#[test]
fn recorded_verdicts() {
    let summary = read_summary(&fixture("acceptance_summary.csv")).unwrap();
    let report = build_report(&summary);
    let verdict = |e: &str, m: &str| {
        report
            .groups
            .iter()
            .find(|g| g.ensemble == e && g.manifold == m)
            .map(|g| g.verdict)
            .unwrap()
    };
    for (e, m) in [
        ("harmonic", "sphere2"),
        ("spherical", "sphere2"),
        ("gaf", "sphere2"),
        ("harmonic", "torus2"),
        ("harmonic_pinf", "torus2"),
        ("harmonic", "torus2-lattice"),
        ("jittered", "torus3"),
    ] {
        assert_eq!(verdict(e, m), Verdict::Pass, "{e} on {m}");
    }
    assert_eq!(verdict("iid", "sphere2"), Verdict::Fail);
    assert_eq!(verdict("iid", "torus2"), Verdict::Pass);
}

#[test]
fn emitted_files() {
    let dir = std::env::temp_dir().join(format!("ppw-fixture-{}", std::process::id()));
    let out = emit_outputs(&fixture("acceptance_summary.csv"), &dir).unwrap();
    assert_eq!(out.plots.len(), out.report.groups.len());
    for p in &out.plots {
        let svg = std::fs::read_to_string(p).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<path"));
    }
    assert_eq!(std::fs::read_to_string(&out.report_path).unwrap(), out.report.text);
}
