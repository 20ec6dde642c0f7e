//! Acceptance suite: every verification criterion at its stated tolerance
//! and runtime budget, one test (and one printed PASS/FAIL line) each,
//! plus byte-level determinism of the `verify-all` reports.

use polyrellich_cli::verify::{self, VerifyConfig};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

fn cfg() -> VerifyConfig {
    VerifyConfig {
        quick: true,
        seed: 0,
    }
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyrellich-acceptance-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn check(id: usize, name: &str, budget: Duration, run: impl FnOnce() -> (bool, String)) {
    let start = Instant::now();
    let (passed, detail) = run();
    let elapsed = start.elapsed();
    println!(
        "[{}] criterion {:>2} {:<26} ({:>8.2?})  {}",
        if passed { "PASS" } else { "FAIL" },
        id,
        name,
        elapsed,
        detail
    );
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
    assert!(
        elapsed <= budget,
        "criterion {id} ({name}) exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_01_moment_constant() {
    check(1, "moment constant", Duration::from_secs(1), || {
        verify::criterion_moment(&cfg())
    });
}

#[test]
fn criterion_02_half_space_pseudodistance() {
    check(2, "half-space pseudodistance", Duration::from_secs(1), || {
        verify::criterion_half_space(&cfg())
    });
}

#[test]
fn criterion_03_pointwise_comparisons() {
    check(3, "pointwise comparisons", Duration::from_secs(30), || {
        verify::criterion_pointwise(&cfg())
    });
}

#[test]
fn criterion_04_dyadic_decomposition() {
    check(4, "dyadic decomposition", Duration::from_secs(30), || {
        verify::criterion_whitney(&cfg())
    });
}

#[test]
fn criterion_05_eigenvalue_sandwich() {
    check(5, "eigenvalue sandwich", Duration::from_secs(30), || {
        verify::criterion_eigenvalues(&cfg())
    });
}

#[test]
fn criterion_06_ratio_fuzz() {
    check(6, "ratio fuzz", Duration::from_secs(60), || {
        verify::criterion_hardy_fuzz(&cfg())
    });
}

#[test]
fn criterion_07_sharpness_sweep() {
    let dir = tmpdir("c7");
    check(7, "sharpness sweep", Duration::from_secs(60), || {
        verify::criterion_sharpness(&cfg(), &dir)
    });
}

#[test]
fn criterion_08_trace_sandwich() {
    let dir = tmpdir("c8");
    check(8, "trace sandwich", Duration::from_secs(60), || {
        verify::criterion_trace_sandwich(&cfg(), &dir)
    });
}

#[test]
fn criterion_09_resolvent_sandwich() {
    check(9, "resolvent sandwich", Duration::from_secs(30), || {
        verify::criterion_resolvent(&cfg())
    });
}

/// Criterion 10: two `verify-all --quick` runs with the same seed emit
/// byte-identical reports. One run is capped to a single worker thread so
/// the reports are also independent of the thread count.
#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_polyrellich");
    let out1 = tmpdir("c10-a");
    let out2 = tmpdir("c10-b");

    let run1 = Command::new(bin)
        .args(["verify-all", "--quick", "--seed", "0", "--out"])
        .arg(&out1)
        .output()
        .expect("spawn verify-all");
    assert!(
        run1.status.success(),
        "first verify-all failed:\n{}",
        String::from_utf8_lossy(&run1.stdout)
    );

    let run2 = Command::new(bin)
        .args(["verify-all", "--quick", "--seed", "0", "--out"])
        .arg(&out2)
        .env("POLYRELLICH_THREADS", "1")
        .output()
        .expect("spawn verify-all");
    assert!(run2.status.success());

    let mut compared = 0;
    for name in ["verify.csv", "sharpness.csv", "trace.csv"] {
        let a = std::fs::read(out1.join(name)).unwrap_or_else(|_| panic!("{name} missing"));
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identically seeded runs");
        compared += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "[PASS] criterion 10 determinism                ({elapsed:>8.2?})  {compared} report files byte-identical across runs and thread counts"
    );
    // Two full suite executions must fit comfortably in the quick budget.
    assert!(elapsed <= Duration::from_secs(300));

    // A different seed must still pass, reseeding every sampler.
    let out3 = tmpdir("c10-c");
    let run3 = Command::new(bin)
        .args(["verify-all", "--quick", "--seed", "1", "--out"])
        .arg(&out3)
        .output()
        .unwrap();
    assert!(run3.status.success(), "seed 1 verification failed");
}
