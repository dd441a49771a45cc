//! Cavity field mode functions u(z).
//!
//! Positions and lengths are dimensionless (measured in units of 1/κ). The
//! mesa profile occupies `[0, κL]`; the sech² and Gaussian profiles are
//! centred on `κL / 2` so the free regions `z < 0` and `z > κL` keep their
//! meaning for every profile.

use std::sync::Arc;

use crate::error::{MazerError, Result};

/// σ/L giving the Gaussian the same area as sech²(z/L).
pub const DEFAULT_SIGMA_RATIO: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Mesa,
    Sech2,
    Gaussian,
    Sampled,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Mesa => "mesa",
            ProfileKind::Sech2 => "sech2",
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Sampled => "sampled",
        }
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = MazerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mesa" => Ok(ProfileKind::Mesa),
            "sech2" => Ok(ProfileKind::Sech2),
            "gaussian" => Ok(ProfileKind::Gaussian),
            "sampled" => Ok(ProfileKind::Sampled),
            other => Err(MazerError::invalid(format!("unknown profile kind `{other}`"))),
        }
    }
}

/// A cavity mode function with a fixed interaction length.
///
/// Sampled profiles store `(s, u)` pairs where `s = z / κL`, so changing the
/// length rescales the sampled shape the same way it rescales the analytic
/// ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    kind: ProfileKind,
    length: f64,
    sigma_ratio: f64,
    samples: Option<Arc<[(f64, f64)]>>,
}

impl ModeProfile {
    pub fn mesa(length: f64) -> Result<Self> {
        Self::analytic(ProfileKind::Mesa, length, DEFAULT_SIGMA_RATIO)
    }

    pub fn sech2(length: f64) -> Result<Self> {
        Self::analytic(ProfileKind::Sech2, length, DEFAULT_SIGMA_RATIO)
    }

    pub fn gaussian(length: f64, sigma_ratio: f64) -> Result<Self> {
        if !(sigma_ratio.is_finite() && sigma_ratio > 0.0) {
            return Err(MazerError::invalid(format!(
                "gaussian sigma ratio must be positive, got {sigma_ratio}"
            )));
        }
        Self::analytic(ProfileKind::Gaussian, length, sigma_ratio)
    }

    pub fn sampled(length: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        check_length(length)?;
        if samples.len() < 2 {
            return Err(MazerError::invalid("sampled profile needs at least two samples"));
        }
        for pair in samples.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(MazerError::invalid(
                    "sampled profile abscissae must be strictly increasing",
                ));
            }
        }
        for &(s, u) in &samples {
            if !s.is_finite() || !u.is_finite() || u < 0.0 {
                return Err(MazerError::invalid(format!(
                    "sampled profile value ({s}, {u}) must be finite with u >= 0"
                )));
            }
        }
        Ok(ModeProfile {
            kind: ProfileKind::Sampled,
            length,
            sigma_ratio: DEFAULT_SIGMA_RATIO,
            samples: Some(samples.into()),
        })
    }

    fn analytic(kind: ProfileKind, length: f64, sigma_ratio: f64) -> Result<Self> {
        check_length(length)?;
        Ok(ModeProfile {
            kind,
            length,
            sigma_ratio,
            samples: None,
        })
    }

    /// Same shape, different interaction length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        check_length(length)?;
        Ok(ModeProfile {
            length,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn sigma_ratio(&self) -> f64 {
        self.sigma_ratio
    }

    /// Centre of symmetry for the sech² and Gaussian shapes.
    pub fn center(&self) -> f64 {
        0.5 * self.length
    }

    /// Largest value the profile takes.
    pub fn peak(&self) -> f64 {
        match &self.samples {
            Some(samples) => samples.iter().map(|s| s.1).fold(0.0, f64::max),
            None => 1.0,
        }
    }

    /// True when the profile cannot scatter anything.
    pub fn is_null(&self) -> bool {
        self.length == 0.0 || self.peak() == 0.0
    }

    /// u(z), rejecting non-finite positions.
    pub fn evaluate(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(MazerError::invalid(format!("position must be finite, got {z}")));
        }
        Ok(self.value(z))
    }

    /// u(z) without argument checks; the solver's hot path.
    #[inline]
    pub fn value(&self, z: f64) -> f64 {
        let len = self.length;
        if len == 0.0 {
            return 0.0;
        }
        match self.kind {
            ProfileKind::Mesa => {
                if z > 0.0 && z < len {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::Sech2 => {
                let x = ((z - 0.5 * len) / len).abs();
                if x > 350.0 {
                    return 0.0;
                }
                // sech²x = 4e^{-2x} / (1 + e^{-2x})²
                let e = (-2.0 * x).exp();
                let d = 1.0 + e;
                4.0 * e / (d * d)
            }
            ProfileKind::Gaussian => {
                let d = (z - 0.5 * len) / (self.sigma_ratio * len);
                (-0.5 * d * d).exp()
            }
            ProfileKind::Sampled => {
                let samples = self.samples.as_deref().unwrap_or(&[]);
                interpolate(samples, z / len)
            }
        }
    }

    /// Smallest interval outside which u(z) < ε.
    pub fn support_bounds(&self, threshold: f64) -> Result<(f64, f64)> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(MazerError::invalid(format!(
                "support threshold must lie in (0, 1), got {threshold}"
            )));
        }
        let len = self.length;
        match self.kind {
            ProfileKind::Mesa => Ok((0.0, len)),
            ProfileKind::Sech2 => {
                // sech²(x) = ε  <=>  x = arcosh(1/√ε)
                let half = len * (1.0 / threshold.sqrt()).acosh();
                Ok((self.center() - half, self.center() + half))
            }
            ProfileKind::Gaussian => {
                let sigma = self.sigma_ratio * len;
                let half = sigma * (2.0 * (1.0 / threshold).ln()).sqrt();
                Ok((self.center() - half, self.center() + half))
            }
            ProfileKind::Sampled => {
                let samples = self.samples.as_deref().unwrap_or(&[]);
                sampled_support(samples, threshold).map(|(a, b)| (a * len, b * len))
            }
        }
    }

    /// Profile values on `2 * steps + 1` equally spaced nodes spanning
    /// `[z_min, z_max]` (step endpoints and midpoints).
    ///
    /// A mesa domain is its closed support, where the integrator must see the
    /// interior value 1 even at the two edge nodes.
    pub(crate) fn sample_nodes(&self, z_min: f64, z_max: f64, steps: usize) -> Vec<f64> {
        let count = 2 * steps + 1;
        if self.kind == ProfileKind::Mesa {
            return vec![1.0; count];
        }
        let dz = (z_max - z_min) / (2 * steps) as f64;
        (0..count).map(|i| self.value(z_min + dz * i as f64)).collect()
    }
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length >= 0.0 {
        Ok(())
    } else {
        Err(MazerError::invalid(format!(
            "interaction length must be finite and non-negative, got {length}"
        )))
    }
}

fn interpolate(samples: &[(f64, f64)], s: f64) -> f64 {
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return 0.0,
    };
    if s < first.0 || s > last.0 {
        return 0.0;
    }
    let idx = samples.partition_point(|p| p.0 <= s);
    if idx == 0 {
        return first.1;
    }
    if idx >= samples.len() {
        return last.1;
    }
    let (s0, u0) = samples[idx - 1];
    let (s1, u1) = samples[idx];
    u0 + (u1 - u0) * (s - s0) / (s1 - s0)
}

fn sampled_support(samples: &[(f64, f64)], threshold: f64) -> Result<(f64, f64)> {
    if samples.iter().all(|p| p.1 == 0.0) {
        return Err(MazerError::invalid("sampled profile is identically zero"));
    }
    let first = samples.iter().position(|p| p.1 >= threshold);
    let last = samples.iter().rposition(|p| p.1 >= threshold);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            // Nothing reaches the threshold: collapse onto the peak.
            let (s, _) = samples
                .iter()
                .copied()
                .fold((samples[0].0, -1.0), |acc, p| if p.1 > acc.1 { p } else { acc });
            return Ok((s, s));
        }
    };
    // Walk outwards to the exact linear crossing of the threshold.
    let lo = if first == 0 {
        samples[0].0
    } else {
        crossing(samples[first - 1], samples[first], threshold)
    };
    let hi = if last + 1 == samples.len() {
        samples[last].0
    } else {
        crossing(samples[last + 1], samples[last], threshold)
    };
    Ok((lo, hi))
}

/// Position between `below` (u < ε) and `above` (u ≥ ε) where the
/// interpolant equals ε.
fn crossing(below: (f64, f64), above: (f64, f64), threshold: f64) -> f64 {
    let frac = (threshold - below.1) / (above.1 - below.1);
    below.0 + frac * (above.0 - below.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mesa_inside_and_outside() {
        let p = ModeProfile::mesa(6.0).unwrap();
        assert_eq!(p.evaluate(3.0).unwrap(), 1.0);
        assert_eq!(p.evaluate(-0.1).unwrap(), 0.0);
        assert_eq!(p.evaluate(6.5).unwrap(), 0.0);
    }

    #[test]
    fn sech2_peak_is_one() {
        let p = ModeProfile::sech2(1.0).unwrap();
        assert_eq!(p.evaluate(p.center()).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_one_sigma() {
        let ratio = (2.0 / PI).sqrt();
        let p = ModeProfile::gaussian(1.0, ratio).unwrap();
        let sigma = ratio;
        let u = p.evaluate(p.center() + sigma).unwrap();
        assert!((u - (-0.5f64).exp()).abs() < 1e-15);
        assert!((u - 0.606_531).abs() < 1e-6);
    }

    #[test]
    fn non_finite_position_rejected() {
        let p = ModeProfile::sech2(1.0).unwrap();
        assert!(p.evaluate(f64::NAN).is_err());
        assert!(p.evaluate(f64::INFINITY).is_err());
    }

    #[test]
    fn mesa_support_is_exact() {
        let p = ModeProfile::mesa(5.0).unwrap();
        assert_eq!(p.support_bounds(1e-12).unwrap(), (0.0, 5.0));
    }

    #[test]
    fn sech2_support_half_width() {
        let p = ModeProfile::sech2(1.0).unwrap();
        let (lo, hi) = p.support_bounds(1e-12).unwrap();
        // arcsech(1e-6) = ln((1 + sqrt(1 - 1e-12)) / 1e-6)
        let expected = ((1.0 + (1.0f64 - 1e-12).sqrt()) / 1e-6).ln();
        assert!((hi - p.center() - expected).abs() < 1e-10);
        assert!((hi - p.center() - 14.5087).abs() < 1e-4);
        assert!((p.center() - lo - expected).abs() < 1e-10);
        let edge = p.evaluate(hi).unwrap();
        assert!((edge - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn gaussian_support_half_width() {
        let ratio = (2.0 / PI).sqrt();
        let p = ModeProfile::gaussian(1.0, ratio).unwrap();
        let (_, hi) = p.support_bounds(1e-12).unwrap();
        let half = hi - p.center();
        assert!((half / ratio - (2.0 * 1e12f64.ln()).sqrt()).abs() < 1e-12);
        assert!((half / ratio - 7.434).abs() < 1e-3);
    }

    #[test]
    fn sampled_interpolates_and_vanishes_outside() {
        let p = ModeProfile::sampled(2.0, vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
        assert!((p.evaluate(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p.evaluate(1.0).unwrap(), 1.0);
        assert_eq!(p.evaluate(-0.1).unwrap(), 0.0);
        assert_eq!(p.evaluate(2.1).unwrap(), 0.0);
        let (lo, hi) = p.support_bounds(0.5).unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sampled_all_zero_support_is_error() {
        let p = ModeProfile::sampled(1.0, vec![(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(p.support_bounds(1e-6).is_err());
    }

    #[test]
    fn sampled_rejects_bad_samples() {
        assert!(ModeProfile::sampled(1.0, vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(ModeProfile::sampled(1.0, vec![(0.0, -1.0), (1.0, 1.0)]).is_err());
        assert!(ModeProfile::sampled(1.0, vec![(0.0, f64::NAN), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn negative_length_rejected() {
        assert!(ModeProfile::mesa(-1.0).is_err());
        assert!(ModeProfile::gaussian(1.0, 0.0).is_err());
    }
}
