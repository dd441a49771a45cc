use std::f64::consts::PI;

use num_complex::Complex64;

use mazer::dressed::{evaluate_interaction, DressedStateCoordinates};
use mazer::experiment::sweep::solve_channels;
use mazer::experiment::verify_trapping;
use mazer::field::{trapping_state_coordinates, TrappingState};
use mazer::par::Execution;
use mazer::profile::{ModeProfile, DEFAULT_SIGMA_RATIO};
use mazer::scattering::{Branch, SolverMethod};

const TOL: f64 = 1e-8;
const TRUNCATION: f64 = 1e-12;

fn lengths() -> Vec<f64> {
    (0..=40).map(|i| 0.5 * f64::from(i)).collect()
}

#[test]
fn tilted_trapping_state_is_no_longer_inert() {
    // nudging θ on a single sector re-opens the coupling to the other branch
    let state = TrappingState::new(Complex64::from_polar(0.5, PI / 7.0), Branch::Minus, 2).unwrap();
    let exact = trapping_state_coordinates(&state, TRUNCATION).unwrap();
    let mut modes = exact.modes().to_vec();
    modes[1].theta -= 1e-3;
    let tilted = DressedStateCoordinates::new(2, modes, exact.lower().to_vec()).unwrap();

    let base = ModeProfile::gaussian(1.0, DEFAULT_SIGMA_RATIO).unwrap();
    let mut largest: f64 = 0.0;
    for kl in lengths() {
        let profile = base.with_length(kl).unwrap();
        let pairs = solve_channels(&profile, 2, 0.1, exact.sector_count(), TOL, SolverMethod::Auto).unwrap();
        let inert = evaluate_interaction(&exact, &pairs).unwrap();
        assert!(inert.delta_sigma_aa.abs() < 1e-12, "kL={kl}: {:e}", inert.delta_sigma_aa);
        largest = largest.max(evaluate_interaction(&tilted, &pairs).unwrap().delta_sigma_aa.abs());
    }
    assert!(largest > 1e-6, "perturbed state stayed inert: {largest:e}");
}

#[test]
fn trapping_does_not_mean_transparent() {
    let state = TrappingState::new(Complex64::new(0.5, 0.0), Branch::Plus, 1).unwrap();
    let profile = ModeProfile::sech2(1.0).unwrap();
    let report = verify_trapping(&state, &profile, &[0.1], &lengths(), TOL, TRUNCATION, Execution::Sequential).unwrap();
    assert!(report.passed());
    assert!(report.max_reflection > 1e-3, "R = {:e}", report.max_reflection);
}

#[test]
fn single_branch_reflection_matches_general_path() {
    for sign in [Branch::Plus, Branch::Minus] {
        let state = TrappingState::new(Complex64::from_polar(0.6, 0.3), sign, 2).unwrap();
        let coords = trapping_state_coordinates(&state, TRUNCATION).unwrap();
        for &kl in &[0.5, 2.0, 7.5] {
            let profile = ModeProfile::sech2(kl).unwrap();
            let pairs = solve_channels(&profile, 2, 0.1, coords.sector_count(), TOL, SolverMethod::Auto).unwrap();
            let general = evaluate_interaction(&coords, &pairs).unwrap().reflection;
            // only the occupied branch scatters; the lower manifold passes freely
            let direct: f64 = coords
                .modes()
                .iter()
                .zip(&pairs)
                .map(|(mode, pair)| mode.weight * mode.weight * pair.branch(sign).reflectance())
                .sum();
            assert!((general - direct).abs() < 1e-12, "{sign:?} kL={kl}: {general} vs {direct}");
        }
    }
}

#[test]
fn trapping_holds_for_every_profile_and_both_signs() {
    let gamma = Complex64::from_polar(0.5, PI / 7.0);
    let profiles = [
        ModeProfile::mesa(1.0).unwrap(),
        ModeProfile::sech2(1.0).unwrap(),
        ModeProfile::gaussian(1.0, DEFAULT_SIGMA_RATIO).unwrap(),
    ];
    for profile in &profiles {
        for sign in [Branch::Plus, Branch::Minus] {
            let state = TrappingState::new(gamma, sign, 2).unwrap();
            let report = verify_trapping(&state, profile, &[0.01, 0.1], &lengths(), TOL, TRUNCATION, Execution::Sequential)
                .unwrap();
            assert!(report.passed(), "{:?} {sign:?}: {report:?}", profile.kind());
            assert!(report.max_delta_p < 1e-12);
        }
    }
}
