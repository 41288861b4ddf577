use std::collections::BTreeMap;

use equidist::harness::{scan_alpha, scan_beta, SampleStatus, ScanConfig};
use equidist::Tabular;

fn small_beta(samples: usize, n: usize) -> ScanConfig {
    let mut cfg = ScanConfig::beta_default();
    cfg.samples = samples;
    cfg.n = n;
    cfg
}

#[test]
fn same_seed_gives_identical_csv() {
    let cfg = small_beta(12, 512);
    let a = scan_beta(&cfg).unwrap().to_csv();
    let b = scan_beta(&cfg).unwrap().to_csv();
    assert_eq!(a.as_bytes(), b.as_bytes());
    let mut other = cfg.clone();
    other.seed = 2;
    assert_ne!(scan_beta(&other).unwrap().to_csv(), a);
}

#[test]
fn counts_add_up() {
    let mut map = BTreeMap::new();
    map.insert("samples".to_string(), "10".to_string());
    map.insert("n".to_string(), "256".to_string());
    map.insert("overrides".to_string(), "2;3/2".to_string());
    let cfg = ScanConfig::beta_default().apply(&map).unwrap();
    let r = scan_beta(&cfg).unwrap();
    assert_eq!(r.samples.len(), 12);
    assert_eq!(r.passes + r.fails + r.errors, r.samples.len());
    assert_eq!(r.samples[0].status, SampleStatus::Fail);
    assert!((r.pass_fraction - r.passes as f64 / 12.0).abs() < 1e-15);

    let mut a = ScanConfig::alpha_default();
    a.samples = 8;
    a.n = 256;
    let r = scan_alpha(&a).unwrap();
    assert_eq!(r.passes + r.fails + r.errors, 8);
}

#[test]
fn pass_fraction_does_not_drop_with_length() {
    let short = scan_beta(&small_beta(100, 4096)).unwrap();
    let long = scan_beta(&small_beta(100, 16384)).unwrap();
    assert!(
        long.pass_fraction >= short.pass_fraction - 0.03,
        "{} at 16384 vs {} at 4096",
        long.pass_fraction,
        short.pass_fraction
    );
}
