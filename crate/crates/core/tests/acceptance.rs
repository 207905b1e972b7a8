//! End-to-end acceptance suite: one test per criterion, each printing its
//! pass/fail line. Criteria 8, 11 and 12 share one reference Hopf run.

use kdlab_core::acceptance as acc;

fn run(result: acc::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.detail);
}

#[test]
fn criterion_01_transition_point() {
    run(acc::criterion_01_transition_point());
}

#[test]
fn criterion_02_coefficients() {
    run(acc::criterion_02_coefficients());
}

#[test]
fn criterion_03_quadrature_fidelity() {
    run(acc::criterion_03_quadrature_fidelity());
}

#[test]
fn criterion_04_eigenvalue_structure() {
    run(acc::criterion_04_eigenvalue_structure());
}

#[test]
fn criterion_05_branch() {
    run(acc::criterion_05_branch());
}

#[test]
fn criterion_06_pairings() {
    run(acc::criterion_06_pairings());
}

#[test]
fn criterion_07_linear_decay() {
    run(acc::criterion_07_linear_decay());
}

#[test]
fn criterion_08_hopf_amplitude() {
    run(acc::criterion_08_hopf_amplitude());
}

#[test]
fn criterion_09_scaling_sine() {
    run(acc::criterion_09_scaling_sine());
}

#[test]
fn criterion_10_scaling_second_harmonic() {
    run(acc::criterion_10_scaling_second_harmonic());
}

#[test]
fn criterion_11_oracle_equivalence() {
    run(acc::criterion_11_oracle_equivalence());
}

#[test]
fn criterion_12_finite_n() {
    run(acc::criterion_12_finite_n());
}

#[test]
fn criterion_13_reduced_model() {
    run(acc::criterion_13_reduced_model());
}

#[test]
fn criterion_14_below_onset_decay() {
    run(acc::criterion_14_below_onset_decay());
}
