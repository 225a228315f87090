//! Acceptance criteria 1 to 11, one test each. Every test prints a single
//! PASS/FAIL line on standard error; the handle is written directly so the
//! line survives the test harness's output capture.

use std::io::Write;

use tfe10::cli::verify::run_criterion;

fn check(id: usize) {
    let outcome = run_criterion(id);
    let _ = writeln!(std::io::stderr().lock(), "{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_kernel_normalization() {
    check(1);
}

#[test]
fn criterion_02_kernel_decay_law() {
    check(2);
}

#[test]
fn criterion_03_biorthogonality() {
    check(3);
}

#[test]
fn criterion_04_semigroup_convergence() {
    check(4);
}

#[test]
fn criterion_05_simple_eigenvalue_shift() {
    check(5);
}

#[test]
fn criterion_06_nonlinear_profile_at_unit_exponent() {
    check(6);
}

#[test]
fn criterion_07_homotopy_limit() {
    check(7);
}

#[test]
fn criterion_08_branch_trace() {
    check(8);
}

#[test]
fn criterion_09_linear_eigenfamily() {
    check(9);
}

#[test]
fn criterion_10_unstable_model_algebra() {
    check(10);
}

#[test]
fn criterion_11_branch_count_engines() {
    check(11);
}
