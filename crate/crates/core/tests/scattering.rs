use std::f64::consts::PI;

use num_complex::Complex64;

use mazer::profile::{ModeProfile, DEFAULT_SIGMA_RATIO};
use mazer::scattering::{
    coupling_strength, emission_probability_fock, solve_channel_pairs, solve_mesa_analytic, solve_numeric, Branch,
    ChannelSpec, NumericSolver, SolverMethod,
};
use mazer::MazerError;

/// Closed-form |t|² for ±c² sech²(x/a). Written as T = s/(s + g) so that
/// deep barriers keep their relative precision.
fn poschl_teller_transmission(coupling: f64, momentum: f64, width: f64, branch: Branch) -> f64 {
    let s = (PI * momentum * width).sinh().powi(2);
    let lambda = 4.0 * coupling * coupling * width * width;
    let g = match branch {
        Branch::Minus => (0.5 * PI * (1.0 + lambda).sqrt()).cos().powi(2),
        Branch::Plus if lambda > 1.0 => (0.5 * PI * (lambda - 1.0).sqrt()).cosh().powi(2),
        Branch::Plus => (0.5 * PI * (1.0 - lambda).sqrt()).cos().powi(2),
    };
    s / (s + g)
}

#[test]
fn sech2_matches_poschl_teller() {
    for &c in &[0.5, 1.0, 2.21] {
        for &k in &[0.05, 0.1, 0.5] {
            for &kl in &[0.5, 1.0, 2.0, 4.0] {
                let profile = ModeProfile::sech2(kl).unwrap();
                for branch in [Branch::Plus, Branch::Minus] {
                    let amps = solve_numeric(&ChannelSpec::new(c, k, branch, &profile), 1e-10).unwrap();
                    let exact = poschl_teller_transmission(c, k, kl, branch);
                    let got = amps.transmittance();
                    assert!(
                        (got - exact).abs() <= 1e-8 * exact.max(1e-2),
                        "c={c} k={k} kL={kl} {branch:?}: {got:e} vs {exact:e}"
                    );
                }
            }
        }
    }
}

#[test]
fn reflectionless_wells_stay_reflectionless_at_every_momentum() {
    for j in 1..=3u32 {
        let kl = f64::from(j * (j + 1)).sqrt();
        let profile = ModeProfile::sech2(kl).unwrap();
        for &k in &[0.001, 0.01, 0.1, 1.0, 3.0] {
            let amps = solve_numeric(&ChannelSpec::new(1.0, k, Branch::Minus, &profile), 1e-10).unwrap();
            assert!(amps.r.norm() < 1e-7, "j={j} k={k}: |r| = {:e}", amps.r.norm());
        }
        // the barrier with the same strength reflects
        let barrier = solve_numeric(&ChannelSpec::new(1.0, 0.1, Branch::Plus, &profile), 1e-10).unwrap();
        assert!(barrier.reflectance() > 0.5);
    }
}

#[test]
fn gaussian_channels_match_reference_integration() {
    // adaptive DOP853 at rtol 1e-13, same phase convention
    let cases = [
        (1.0, 0.1, 3.0, Branch::Minus, (-0.546_803_792_604_74, 0.603_053_057_562_89), (0.430_265_871_220_26, 0.390_133_185_233_20)),
        (1.0, 0.1, 3.0, Branch::Plus, (-0.902_776_280_597_26, 0.430_110_321_841_53), (-1.348_081_025_587e-4, -2.829_542_822_903e-4)),
        (2.21, 0.3, 1.5, Branch::Minus, (-0.553_945_710_838_81, 0.348_719_462_157_00), (0.402_757_254_767_21, 0.639_785_495_215_86)),
    ];
    for (c, k, kl, branch, r, t) in cases {
        let profile = ModeProfile::gaussian(kl, DEFAULT_SIGMA_RATIO).unwrap();
        let amps = solve_numeric(&ChannelSpec::new(c, k, branch, &profile), 1e-10).unwrap();
        for (got, want) in [(amps.r, Complex64::new(r.0, r.1)), (amps.t, Complex64::new(t.0, t.1))] {
            assert!((got - want).norm() < 1e-8, "c={c} k={k} kL={kl} {branch:?}: {got} vs {want}");
        }
    }
}

#[test]
fn numeric_mesa_agrees_with_closed_form_in_phase_and_modulus() {
    let tol = 1e-8;
    for &kl in &[0.3, 2.0, 6.0, 13.7] {
        let profile = ModeProfile::mesa(kl).unwrap();
        for &(c, k) in &[(1.0, 0.1), (2.21, 0.01), (1.0, 1.0), (0.5, 2.0)] {
            for branch in [Branch::Plus, Branch::Minus] {
                let spec = ChannelSpec::new(c, k, branch, &profile);
                let exact = solve_mesa_analytic(&spec).unwrap();
                let num = solve_numeric(&spec, tol).unwrap();
                assert!((exact.r.norm() - num.r.norm()).abs() <= 10.0 * tol);
                assert!((exact.t.norm() - num.t.norm()).abs() <= 10.0 * tol);
                // phases only where the modulus carries them
                if exact.r.norm() > 1e-3 {
                    assert!((exact.r / num.r).arg().abs() <= 10.0 * tol / exact.r.norm());
                }
                if exact.t.norm() > 1e-3 {
                    assert!((exact.t / num.t).arg().abs() <= 10.0 * tol / exact.t.norm());
                }
            }
        }
    }
}

#[test]
fn opaque_barrier_needs_renormalisation_and_still_conserves_flux() {
    // κ_n κL = 400: e^{κ_n L} overflows a double
    let profile = ModeProfile::mesa(40.0).unwrap();
    let spec = ChannelSpec::new(10.0, 0.1, Branch::Plus, &profile);
    let amps = solve_numeric(&spec, 1e-8).unwrap();
    assert!(amps.flux_defect <= 1e-8);
    assert!(amps.t.norm() < 1e-100);
    assert!((amps.r.norm() - 1.0).abs() < 1e-8);
    let exact = solve_mesa_analytic(&spec).unwrap();
    assert!((amps.r - exact.r).norm() < 1e-7);
}

#[test]
fn m_photon_channels_only_depend_on_the_coupling() {
    // (m=1, n=23) and (m=3, n=1) share κ_n = ⁴√24
    let c1 = coupling_strength(1, 23);
    let c3 = coupling_strength(3, 1);
    assert!((c1 - c3).abs() < 1e-15);
    for &kl in &[0.7, 3.1, 9.4] {
        let profile = ModeProfile::sech2(kl / c1).unwrap();
        let a = solve_channel_pairs(&profile, 0.1, &[c1], 1e-8, SolverMethod::Auto).unwrap()[0];
        let b = solve_channel_pairs(&profile, 0.1, &[c3], 1e-8, SolverMethod::Auto).unwrap()[0];
        let pa = emission_probability_fock(a.kernel()).unwrap();
        let pb = emission_probability_fock(b.kernel()).unwrap();
        assert!((pa - pb).abs() <= 1e-10);
    }
}

#[test]
fn shared_grid_pairs_match_single_solves() {
    let profile = ModeProfile::gaussian(7.5, DEFAULT_SIGMA_RATIO).unwrap();
    let couplings: Vec<f64> = (0..12).map(|n| coupling_strength(2, n)).collect();
    let solver = NumericSolver::new(&profile, 0.1, 1e-8).unwrap();
    let pairs = solver.solve_pairs(&couplings).unwrap();
    for (pair, &c) in pairs.iter().zip(&couplings) {
        assert_eq!(pair.coupling, c);
        for branch in [Branch::Plus, Branch::Minus] {
            let single = solver.solve(c, branch).unwrap();
            let shared = pair.branch(branch);
            assert!((single.r - shared.r).norm() < 2e-8 && (single.t - shared.t).norm() < 2e-8);
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let profile = ModeProfile::sech2(2.0).unwrap();
    for tol in [1e-15, 1e-3, f64::NAN] {
        assert!(matches!(
            solve_numeric(&ChannelSpec::new(1.0, 0.1, Branch::Plus, &profile), tol),
            Err(MazerError::InvalidInput(_))
        ));
    }
    for k in [0.0, -0.1, f64::INFINITY] {
        assert!(solve_numeric(&ChannelSpec::new(1.0, k, Branch::Plus, &profile), 1e-8).is_err());
        assert!(solve_mesa_analytic(&ChannelSpec::new(1.0, k, Branch::Plus, &ModeProfile::mesa(2.0).unwrap())).is_err());
    }
    assert!(emission_probability_fock(Complex64::new(1.01, 0.0)).is_err());
}
