//! Acceptance gate: each test reproduces one headline numerical result
//! end to end and enforces its runtime budget. Run with `--nocapture` to
//! see the PASS/FAIL line and evidence for every criterion.

use iga_spectral::checks::{self, CheckResult};

fn enforce(result: CheckResult, seconds_budget: Option<f64>) {
    let verdict = if result.passed { "PASS" } else { "FAIL" };
    println!("{verdict} {} ({:.2}s)\n  {}", result.id, result.seconds, result.details);
    if let Some(budget) = seconds_budget {
        assert!(
            result.seconds < budget,
            "{} took {:.2}s, budget {budget}s",
            result.id,
            result.seconds
        );
    }
    assert!(result.passed, "{} failed:\n  {}", result.id, result.details);
}

#[test]
fn dispersion_coefficients() {
    enforce(checks::check_dispersion_coefficients(), Some(10.0));
}

#[test]
fn tau_sweep_optima() {
    enforce(checks::check_tau_sweep_optima(), Some(30.0));
}

#[test]
fn convergence_1d() {
    enforce(checks::check_convergence_1d(), Some(10.0));
}

#[test]
fn convergence_3d() {
    enforce(checks::check_convergence_3d(), Some(30.0));
}

#[test]
fn kronecker_oracle() {
    enforce(checks::check_kronecker_oracle(), Some(60.0));
}

#[test]
fn schrodinger_gauss_table() {
    enforce(checks::check_schrodinger_gauss_table(), Some(20.0));
}

#[test]
fn schrodinger_blended_table() {
    enforce(checks::check_schrodinger_blended_table(), None);
}

#[test]
fn spectrum_branch() {
    enforce(checks::check_spectrum_branch(), Some(60.0));
}

#[test]
fn property_suites() {
    enforce(checks::check_property_smoke(), None);
}
