//! Acceptance suite: one criterion per test, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them) and pinned to its runtime budget.

use raagws_core::suites::*;
use std::time::Duration;

fn assert_criterion(outcome: SuiteOutcome, budget: Duration) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
    assert!(
        outcome.seconds < budget.as_secs_f64(),
        "{} exceeded its {:?} budget",
        outcome.name,
        budget
    );
}

#[test]
fn criterion_1_length_change_formula() {
    assert_criterion(suite_length_change(0xC0FFEE, 10_000), Duration::from_secs(60));
}

#[test]
fn criterion_2_counting_lemmas() {
    assert_criterion(suite_counting(0xBEEF, 10_000), Duration::from_secs(60));
}

#[test]
fn criterion_3_blowup_soundness() {
    assert_criterion(suite_blowup(), Duration::from_secs(120));
}

#[test]
fn criterion_4_treelike_characterization_and_exchange() {
    assert_criterion(suite_treelike(), Duration::from_secs(300));
}

#[test]
fn criterion_5_peak_reduction_roundtrip() {
    assert_criterion(suite_peak(0x5EED, 500), Duration::from_secs(600));
}

#[test]
fn criterion_6_minimality_and_uniqueness() {
    assert_criterion(suite_minimality(), Duration::from_secs(120));
}

#[test]
fn criterion_7_hll_and_pushing_witnesses() {
    assert_criterion(suite_hll_pushing(), Duration::from_secs(600));
}

#[test]
fn criterion_8_stargraph_geometry_consistency() {
    assert_criterion(suite_stargeom(0xA11CE, 5_000), Duration::from_secs(60));
}

#[test]
fn spine_descent_properties() {
    assert_criterion(suite_spine(), Duration::from_secs(300));
}
