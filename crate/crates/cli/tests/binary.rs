use std::path::Path;
use std::process::{Command, Output};

use ergolab_cli::ExperimentReport;

fn ergolab(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .env("ERGOLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn list_names_every_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(dir.path(), &["list"]);
    assert!(out.status.success());
    let listing = text(&out.stdout);
    for name in ["pnt", "katai", "matched-blocks", "nu2-counterexample", "poly-omega"] {
        assert!(listing.lines().any(|l| l == name), "{name} missing");
    }
    for e in ergolab_cli::REGISTRY {
        assert!(listing.contains(e.statement));
    }
}

#[test]
fn reruns_are_byte_identical_and_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "pnt", "N=1e3,1e5,1e4"];
    let a = ergolab(dir.path(), &args);
    let b = ergolab(dir.path(), &args);
    assert!(a.status.success(), "{}", text(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    // the second run loads the cached sieve
    assert!(dir.path().join("spf-100000.bin").exists());

    let csv = text(&a.stdout);
    let report = ExperimentReport::from_csv(&csv).unwrap();
    assert_eq!(report.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1000, 10_000, 100_000]);
    assert_eq!(report.to_csv(), csv);
    assert!(!csv.contains('\r'));
}

#[test]
fn out_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("davenport.cfg");
    std::fs::write(&cfg, "# two scales\nN = 1e3,1e4\nalpha = 1/4\n").unwrap();
    let csv_path = dir.path().join("out.csv");
    let out = ergolab(
        dir.path(),
        &["run", "davenport", "alpha=1/5", "--config", cfg.to_str().unwrap(), "--out", csv_path.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(out.stdout.is_empty());
    let report = ExperimentReport::from_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows.iter().all(|r| r.params.starts_with("alpha=1/5;")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(ergolab(p, &["run", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(ergolab(p, &["run", "pnt", "M=3"]).status.code(), Some(2));
    assert_eq!(ergolab(p, &["run", "pnt", "N"]).status.code(), Some(2));
    assert_eq!(ergolab(p, &["run", "pnt", "--config", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(ergolab(p, &["bogus"]).status.code(), Some(2));

    let strict = ergolab(p, &["run", "matched-blocks", "mode=strict", "cap=1e5", "N=1e5"]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(text(&strict.stderr).contains("would suffice"));

    // bounded blocks below 10^5 cannot reach the measure bound
    let accept = ergolab(p, &["run", "matched-blocks", "cap=1e5", "N=1e5", "--accept"]);
    assert_eq!(accept.status.code(), Some(1));
    let err = text(&accept.stderr);
    assert!(err.contains("PASS matched-blocks property_a"));
    assert!(err.contains("FAIL matched-blocks measure_b1"));

    let ok = ergolab(p, &["run", "pnt", "N=1e6", "--accept"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(text(&ok.stderr).contains("PASS pnt mean_liouville N=1000000"));
}

#[test]
fn sieve_subcommand_writes_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(dir.path(), &["sieve", "--limit", "2e4"]);
    assert!(out.status.success());
    let path = dir.path().join("spf-20000.bin");
    let s = ergolab::arith::FactorSieve::read_cache(&path).unwrap();
    assert_eq!(s, ergolab::arith::FactorSieve::new(20_000).unwrap());
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], b"ERGOSPF1");
    assert_eq!(bytes.len(), 16 + 4 * 20_001);
}
