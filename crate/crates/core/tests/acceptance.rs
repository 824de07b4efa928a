//! One test per acceptance criterion; each prints a PASS/FAIL line.
//!
//! Criteria run one at a time (a shared lock) so their runtime budgets are
//! measured without contention from each other.

use std::sync::Mutex;

use powerfpp::acceptance::{self, Outcome};

static SERIAL: Mutex<()> = Mutex::new(());

fn check(criterion: fn() -> Outcome) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = criterion();
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_closed_form_critical_times() {
    check(acceptance::criterion_1);
}

#[test]
fn criterion_02_complete_graph_sandwich() {
    check(acceptance::criterion_2);
}

#[test]
fn criterion_03_diagonal_constant() {
    check(acceptance::criterion_3);
}

#[test]
fn criterion_04_f_boundary_values() {
    check(acceptance::criterion_4);
}

#[test]
fn criterion_05_sup_f_classification() {
    check(acceptance::criterion_5);
}

#[test]
fn criterion_06_paw_margin() {
    check(acceptance::criterion_6);
}

#[test]
fn criterion_07_identity_suite() {
    check(acceptance::criterion_7);
}

#[test]
fn criterion_08_walk_suite() {
    check(acceptance::criterion_8);
}

#[test]
fn criterion_09_monte_carlo_f() {
    check(acceptance::criterion_9);
}

#[test]
fn criterion_10_desk_scale_simulation() {
    check(acceptance::criterion_10);
}

#[test]
fn criterion_11_success_lower_bound() {
    check(acceptance::criterion_11);
}

#[test]
fn criterion_12_sum_of_exponentials() {
    check(acceptance::criterion_12);
}
