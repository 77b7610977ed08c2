//! Standalone randomized property suites: series ring laws, reversion and
//! Lambert/Moebius round trips, polytope degree laws, reduction soundness
//! against the period-map oracle, and Cartier-theta commutation.
//!
//! Run with `cargo test --test properties`.

mod common;

#[test]
fn series_ring_laws_hold_on_random_triples() {
    common::series_ring_laws(120);
}

#[test]
fn reversion_round_trips_and_matches_lagrange_inversion() {
    common::reversion_round_trips(80);
}

#[test]
fn lambert_and_moebius_sums_are_mutually_inverse() {
    common::lambert_round_trips(100);
}

#[test]
fn degree_is_subadditive_and_the_cone_criterion_holds() {
    common::degree_subadditivity_and_cone_criterion(500);
}

#[test]
fn reduction_agrees_with_the_period_map_oracle() {
    common::reduction_soundness(20);
}

#[test]
fn cartier_commutes_with_the_logarithmic_derivatives() {
    common::cartier_theta_commutation(50);
}
