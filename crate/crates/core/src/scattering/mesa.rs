use num_complex::Complex64;

use super::{ChannelSpec, ScatteringAmplitudes};
use crate::error::{MazerError, Result};
use crate::profile::ProfileKind;

/// Closed-form amplitudes for the mesa (square) profile.
///
/// With `q² = k² ∓ κ_n²`, `C = cos(qL)` and `S = sin(qL)/q` (both even in q, so
/// real for barriers and wells alike):
///
/// ```text
/// t = 1 / (C − i (k² + q²) S / 2k)
/// r = i (q² − k²) S / 2k · t
/// ```
///
/// Evanescent channels use `C = cosh(pL)`, `S = sinh(pL)/p` with `p² = −q²`,
/// scaled by `2e^{−pL}` so deep barriers never overflow.
pub fn solve_mesa_analytic(spec: &ChannelSpec<'_>) -> Result<ScatteringAmplitudes> {
    spec.validate()?;
    if spec.profile.kind() != ProfileKind::Mesa {
        return Err(MazerError::invalid("analytic solution requires a mesa profile"));
    }
    let k = spec.momentum;
    let len = spec.profile.length();
    if len == 0.0 || spec.coupling == 0.0 {
        return Ok(ScatteringAmplitudes::free());
    }
    let q2 = k * k - spec.potential_scale();
    let x2 = q2 * len * len;

    // (C, S, prefactor) with t = prefactor / denominator.
    let (c, s, prefactor) = if x2.abs() < 1e-8 {
        // removable singularity at q → 0
        (1.0 - 0.5 * x2, len * (1.0 - x2 / 6.0), 1.0)
    } else if q2 > 0.0 {
        let q = q2.sqrt();
        let (sin, cos) = (q * len).sin_cos();
        (cos, sin / q, 1.0)
    } else {
        let p = (-q2).sqrt();
        let decay = (-2.0 * p * len).exp();
        (1.0 + decay, (1.0 - decay) / p, 2.0 * (-p * len).exp())
    };

    let denom = Complex64::new(c, -(k * k + q2) * s / (2.0 * k));
    let t = prefactor / denom;
    let r = Complex64::new(0.0, (q2 - k * k) * s / (2.0 * k)) / denom;
    Ok(ScatteringAmplitudes::new(r, t))
}

/// Fabry–Perot-like approximation of the mesa emission probability,
/// `½[1 + ½ sin(2κ_nL)] / [1 + (κ_n/2k)² sin²(κ_nL)]`.
///
/// Only meaningful inside [`mesa_approx_regime`].
pub fn mesa_approx_emission(momentum: f64, coupling: f64, length: f64) -> f64 {
    let x = coupling * length;
    let ratio = coupling / (2.0 * momentum);
    let sin = x.sin();
    0.5 * (1.0 + 0.5 * (2.0 * x).sin()) / (1.0 + ratio * ratio * sin * sin)
}

/// `exp(κ_nL) > threshold` and `(κ_n/2k)² exp(κ_nL) sin(κ_nL) > threshold`,
/// evaluated in log space. The sine is taken with its sign.
pub fn mesa_approx_regime(momentum: f64, coupling: f64, length: f64, threshold: f64) -> bool {
    let x = coupling * length;
    let log_threshold = threshold.ln();
    if !(x > log_threshold) {
        return false;
    }
    let sin = x.sin();
    if sin <= 0.0 {
        return false;
    }
    2.0 * (coupling / (2.0 * momentum)).ln() + x + sin.ln() > log_threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ModeProfile;
    use crate::scattering::{emission_kernel, emission_probability_fock, Branch};
    use std::f64::consts::PI;

    fn solve(k: f64, c: f64, len: f64, branch: Branch) -> ScatteringAmplitudes {
        let p = ModeProfile::mesa(len).unwrap();
        solve_mesa_analytic(&ChannelSpec::new(c, k, branch, &p)).unwrap()
    }

    #[test]
    fn free_particle() {
        for len in [0.0, 1.0, 7.5] {
            let a = solve(0.3, 0.0, len, Branch::Plus);
            assert_eq!(a.r, Complex64::new(0.0, 0.0));
            assert_eq!(a.t, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn well_transmission_resonance() {
        let len = PI / 1.01f64.sqrt();
        let a = solve(0.1, 1.0, len, Branch::Minus);
        assert!(a.r.norm() < 1e-14);
        assert!((a.t.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn deep_tunneling_asymptote() {
        let (k, c, len) = (0.1, 1.0, 10.0);
        let a = solve(k, c, len, Branch::Plus);
        let p2: f64 = c * c - k * k;
        let asymptote = 16.0 * k * k * p2 / (k * k + p2).powi(2) * (-2.0 * p2.sqrt() * len).exp();
        assert!((a.transmittance() / asymptote - 1.0).abs() < 1e-6);
        assert!((a.transmittance() - 3.6e-10).abs() < 0.1e-10);
    }

    #[test]
    fn flux_conserved_across_regimes() {
        for &k in &[0.01, 0.1, 1.0, 3.0] {
            for &c in &[0.5, 1.0, 2.21, 10.0] {
                for &len in &[0.1, 1.0, 5.0, 40.0, 400.0] {
                    for branch in [Branch::Plus, Branch::Minus] {
                        let a = solve(k, c, len, branch);
                        assert!(a.flux_defect < 1e-12, "k={k} c={c} L={len} {branch:?}: {}", a.flux_defect);
                    }
                }
            }
        }
    }

    #[test]
    fn continuous_through_q_zero() {
        // k = κ_n on the barrier branch: q = 0 exactly.
        let at = solve(1.0, 1.0, 2.0, Branch::Plus);
        let above = solve(1.0 + 1e-7, 1.0, 2.0, Branch::Plus);
        let below = solve(1.0 - 1e-7, 1.0, 2.0, Branch::Plus);
        assert!((at.t - above.t).norm() < 1e-6);
        assert!((at.t - below.t).norm() < 1e-6);
        assert!((at.r - below.r).norm() < 1e-6);
    }

    #[test]
    fn approx_values() {
        // sin(κ_nL) = 0 gives exactly one half
        assert!((mesa_approx_emission(0.1, 1.0, PI) - 0.5).abs() < 1e-15);
        // κ_nL = π/2: sin(2κ_nL) = 0, sin²(κ_nL) = 1
        let v = mesa_approx_emission(0.1, 1.0, PI / 2.0);
        assert!((v - 1.0 / 52.0).abs() < 1e-15);
        // large k/κ_n: denominator -> 1
        let x: f64 = 0.7;
        let v = mesa_approx_emission(1e9, 1.0, x);
        assert!((v - 0.5 * (1.0 + 0.5 * (2.0 * x).sin())).abs() < 1e-12);
    }

    #[test]
    fn approx_tracks_exact_deep_in_regime() {
        let (k, c) = (0.01, 1.0);
        let mut checked = 0;
        for i in 0..=400 {
            let len = 7.0 + 0.01 * i as f64;
            if !mesa_approx_regime(k, c, len, 1e3) {
                continue;
            }
            let plus = solve(k, c, len, Branch::Plus);
            let minus = solve(k, c, len, Branch::Minus);
            let exact = emission_probability_fock(emission_kernel(&plus, &minus)).unwrap();
            assert!((exact - mesa_approx_emission(k, c, len)).abs() < 1e-2, "L={len}");
            checked += 1;
        }
        assert!(checked > 50);
    }

    #[test]
    fn regime_predicate() {
        assert!(!mesa_approx_regime(0.1, 1.0, 1.0, 1e3)); // e^1 too small
        assert!(mesa_approx_regime(0.1, 1.0, 2.0 * PI + 1.0, 1e3));
        assert!(!mesa_approx_regime(0.1, 1.0, 3.0 * PI + 1.0, 1e3)); // sin < 0
    }
}
