use siegel_core::harness::{report_summary, run_pipeline, RunConfig, MANIFEST};
use std::fs;
use std::path::Path;

const EXPECTED: &[&str] = &[
    "config.json",
    "characters.csv",
    "diagnostics.csv",
    "zeros.csv",
    "audits.csv",
    "anchors.csv",
    "bvp.json",
    "family.json",
    "identities.json",
    "failures.json",
];

fn smoke(dir: &Path, workers: usize) {
    let mut cfg = RunConfig::minimal(4, 5, (0.0, 10.0));
    cfg.max_characters = Some(4);
    cfg.workers = Some(workers);
    cfg.output = dir.to_path_buf();
    let rep = run_pipeline(&cfg).unwrap();
    assert_eq!(rep.workers, workers);
}

#[test]
fn smoke_run_is_complete_and_reproducible() {
    let base = tempfile::tempdir().unwrap();
    let (a, b) = (base.path().join("a"), base.path().join("b"));
    smoke(&a, 1);
    smoke(&b, 2);
    for name in EXPECTED.iter().chain([&MANIFEST]) {
        assert!(a.join(name).exists(), "missing {name}");
    }
    for name in EXPECTED {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs");
    }

    let s = report_summary(&a).unwrap();
    assert!(s.rows.len() >= 12);
    assert!(s.checksum_failures.is_empty());
    assert!(!s.render().is_empty());

    let fam = a.join("family.json");
    let mut text = fs::read_to_string(&fam).unwrap();
    text.push(' ');
    fs::write(&fam, text).unwrap();
    let t = report_summary(&a).unwrap();
    assert_eq!(t.checksum_failures, vec!["family.json".to_string()]);
}

#[test]
fn summary_needs_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(report_summary(dir.path()).is_err());
}
