//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line.  `germcalc selftest` runs the same checks from the CLI.

use germcalc::accept::{run_one, CriterionResult};

fn check(id: u32) {
    let r: CriterionResult = run_one(id, 0xACCE97);
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_paper_value_table() {
    check(1);
}

#[test]
fn criterion_02_level_identities() {
    check(2);
}

#[test]
fn criterion_03_eh_shift_laws() {
    check(3);
}

#[test]
fn criterion_04_oracle_equivalence() {
    check(4);
}

#[test]
fn criterion_05_inverse_height_bound() {
    check(5);
}

#[test]
fn criterion_06_expansiveness_of_exp() {
    check(6);
}

#[test]
fn criterion_07_angle_positivity() {
    check(7);
}

#[test]
fn criterion_08_unit_behavior() {
    check(8);
}

#[test]
fn criterion_09_half_boundedness() {
    check(9);
}

#[test]
fn criterion_10_domain_calculus() {
    check(10);
}
