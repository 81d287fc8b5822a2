//! One line per acceptance criterion, written to stderr so it shows without
//! `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use decay_core::examples::example_v0;
use decay_core::indicators::decay_indicator;
use decay_core::suite::{self, Outcome};

fn report(out: &Outcome, extra: &[String]) {
    let failures: Vec<&String> = out.failures.iter().chain(extra).collect();
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {:>2}: {verdict}  {}: {}", out.id, out.title, out.detail);
    for f in failures.iter().take(12) {
        let _ = writeln!(err, "    {f}");
    }
    if failures.len() > 12 {
        let _ = writeln!(err, "    ... {} more", failures.len() - 12);
    }
    assert!(failures.is_empty(), "criterion {}: {} failures", out.id, failures.len());
}

fn timed(id: u32, limit: Duration) {
    let start = Instant::now();
    let out = suite::run(id);
    let took = start.elapsed();
    let extra = if took > limit { vec![format!("took {took:.1?}, limit {limit:?}")] } else { vec![] };
    report(&out, &extra);
}

#[test]
fn criterion_01_v0_ratio() {
    let mut extra = Vec::new();
    for (n, r) in [(1u32, 0.0), (3, 0.0), (3, 1.0)] {
        let start = Instant::now();
        let _ = example_v0(n, r, 32).and_then(|(p, meta)| decay_indicator(&p, r, &meta.rho_grid));
        if start.elapsed() > Duration::from_secs(10) {
            extra.push(format!("n={n} r={r}: took {:?}", start.elapsed()));
        }
    }
    report(&suite::run(1), &extra);
}

#[test]
fn criterion_02_w0_characters() {
    timed(2, Duration::from_secs(60));
}

#[test]
fn criterion_03_w0_selected_limits() {
    report(&suite::run(3), &[]);
}

#[test]
fn criterion_04_gaussian_closed_form() {
    report(&suite::run(4), &[]);
}

#[test]
fn criterion_05_exponent_law() {
    report(&suite::run(5), &[]);
}

#[test]
fn criterion_06_equivalence_chain() {
    timed(6, Duration::from_secs(300));
}

#[test]
fn criterion_07_norm_equivalence() {
    report(&suite::run(7), &[]);
}

#[test]
fn criterion_08_identities() {
    report(&suite::run(8), &[]);
}

#[test]
fn criterion_09_structural_invariants() {
    report(&suite::run(9), &[]);
}

#[test]
fn criterion_10_navier_stokes_out_of_scope() {
    let readme = include_str!("../../../README.md");
    let mut extra = Vec::new();
    if !(readme.contains("Navier-Stokes") && readme.contains("low-frequency")) {
        extra.push(String::from("README does not document the periodic-grid obstruction"));
    }
    report(&suite::run(10), &extra);
}
