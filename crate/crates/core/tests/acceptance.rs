//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. Run with `--nocapture` to see the lines for passing criteria too.

use cpdshift_core::acceptance::{self, AcceptanceConfig, CriterionOutcome};

fn check(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_stampfli_bullets() {
    check(acceptance::criterion_1_stampfli_bullets(&AcceptanceConfig::default()));
}

#[test]
fn criterion_02_boundary_flip() {
    check(acceptance::criterion_2_boundary_flip(&AcceptanceConfig::default()));
}

#[test]
fn criterion_03_q_poly_identities() {
    check(acceptance::criterion_3_q_poly_identities(&AcceptanceConfig::default()));
}

#[test]
fn criterion_04_triplet_roundtrip() {
    check(acceptance::criterion_4_triplet_roundtrip(&AcceptanceConfig::default()));
}

#[test]
fn criterion_05_subnormal_pipeline() {
    check(acceptance::criterion_5_subnormal_pipeline(&AcceptanceConfig::default()));
}

#[test]
fn criterion_06_power_transform_law() {
    check(acceptance::criterion_6_power_transform_law(&AcceptanceConfig::default()));
}

#[test]
fn criterion_07_root_harnesses() {
    check(acceptance::criterion_7_root_harnesses(&AcceptanceConfig::default()));
}

#[test]
fn criterion_08_three_isometry_example() {
    check(acceptance::criterion_8_three_isometry_example(&AcceptanceConfig::default()));
}

#[test]
fn criterion_09_scaling_witness() {
    check(acceptance::criterion_9_scaling_witness(&AcceptanceConfig::default()));
}

#[test]
fn criterion_10_brute_force_oracle() {
    check(acceptance::criterion_10_brute_force_oracle(&AcceptanceConfig::default()));
}
