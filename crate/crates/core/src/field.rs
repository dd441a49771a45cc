//! Photon-number distributions and perfect trapping states.

use num_complex::Complex64;

use crate::dressed::DressedStateCoordinates;
use crate::error::{MazerError, Result};
use crate::scattering::Branch;

/// Default truncation: the discarded tail weight.
pub const DEFAULT_TRUNCATION: f64 = 1e-10;

/// Hard cap on generated photon numbers.
const MAX_PHOTONS: usize = 1 << 20;

/// Tolerated normalization error of user-supplied distributions.
const CUSTOM_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Fock,
    Coherent,
    SqueezedCoherent,
    Custom,
}

/// Parameters a distribution was generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionParams {
    Fock { n: usize },
    Coherent { alpha: Complex64 },
    SqueezedCoherent { alpha: Complex64, squeeze: f64, phase: f64 },
    Custom,
}

/// Truncated pure field state: amplitudes c(n) and p(n) = |c(n)|².
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    amplitudes: Vec<Complex64>,
    p: Vec<f64>,
    params: DistributionParams,
    deficit: f64,
}

impl PhotonDistribution {
    fn from_amplitudes(amplitudes: Vec<Complex64>, params: DistributionParams) -> Self {
        let p: Vec<f64> = amplitudes.iter().map(|c| c.norm_sqr()).collect();
        let deficit = (1.0 - p.iter().sum::<f64>()).max(0.0);
        PhotonDistribution {
            amplitudes,
            p,
            params,
            deficit,
        }
    }

    pub fn kind(&self) -> DistributionKind {
        match self.params {
            DistributionParams::Fock { .. } => DistributionKind::Fock,
            DistributionParams::Coherent { .. } => DistributionKind::Coherent,
            DistributionParams::SqueezedCoherent { .. } => DistributionKind::SqueezedCoherent,
            DistributionParams::Custom => DistributionKind::Custom,
        }
    }

    pub fn params(&self) -> DistributionParams {
        self.params
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// p(n), zero beyond the truncation.
    pub fn probability(&self, n: usize) -> f64 {
        self.p.get(n).copied().unwrap_or(0.0)
    }

    /// 1 − Σp(n) ≥ 0.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    /// Largest photon number kept.
    pub fn n_max(&self) -> usize {
        self.p.len().saturating_sub(1)
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// p(n)/Σp, so that the truncated distribution sums to one.
    pub fn normalized_probabilities(&self) -> Vec<f64> {
        let total: f64 = self.p.iter().sum();
        self.p.iter().map(|p| p / total).collect()
    }

    /// c(n)/√Σp.
    pub fn normalized_amplitudes(&self) -> Vec<Complex64> {
        let scale = 1.0 / self.p.iter().sum::<f64>().sqrt();
        self.amplitudes.iter().map(|c| c * scale).collect()
    }

    /// Weights for absorption by a ground-state atom: p(n+m) indexed by the
    /// channel n.
    pub fn absorption_weights(&self, m: u32) -> Vec<f64> {
        self.p.iter().skip(m as usize).copied().collect()
    }
}

/// Point mass at `n`.
pub fn fock(n: usize) -> PhotonDistribution {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n + 1];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    PhotonDistribution::from_amplitudes(amplitudes, DistributionParams::Fock { n })
}

/// Poisson distribution with mean `mean` (real α = √n̄).
pub fn coherent(mean: f64, truncation: f64) -> Result<PhotonDistribution> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(MazerError::invalid(format!("mean photon number must be finite and >= 0, got {mean}")));
    }
    coherent_amplitude(Complex64::new(mean.sqrt(), 0.0), truncation)
}

/// Coherent state |α⟩, amplitudes e^{−|α|²/2} αⁿ/√n! built in log space.
pub fn coherent_amplitude(alpha: Complex64, truncation: f64) -> Result<PhotonDistribution> {
    check_truncation(truncation)?;
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(MazerError::invalid("coherent amplitude must be finite"));
    }
    let mean = alpha.norm_sqr();
    let params = DistributionParams::Coherent { alpha };
    if mean == 0.0 {
        return Ok(PhotonDistribution::from_amplitudes(vec![Complex64::new(1.0, 0.0)], params));
    }
    let log_alpha = alpha.norm().ln();
    let arg = alpha.arg();
    let mut amplitudes = Vec::new();
    let mut total = 0.0;
    let mut log_fact = 0.0;
    for n in 0..MAX_PHOTONS {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let log_mag = -0.5 * mean + n as f64 * log_alpha - 0.5 * log_fact;
        let c = Complex64::from_polar(log_mag.exp(), n as f64 * arg);
        total += c.norm_sqr();
        amplitudes.push(c);
        if 1.0 - total <= truncation || (n as f64 > mean + 20.0 && c.norm_sqr() < 1e-300) {
            return Ok(PhotonDistribution::from_amplitudes(amplitudes, params));
        }
    }
    Err(MazerError::invalid(format!("coherent state with n̄ = {mean} needs more than {MAX_PHOTONS} photons")))
}

/// Squeezed coherent state |α, re^{iθ}⟩ = S(re^{iθ}) D(α)|0⟩.
///
/// ```text
/// c(n) = e^{inθ/2} (tanh r)^{n/2} / √cosh r · h_n(z) · exp(−|α|²/2 + ½ e^{−iθ} α² tanh r)
/// z    = α e^{−iθ/2} / √sinh 2r
/// ```
///
/// where `h_n = H_n / √(2ⁿ n!)` follows the normalized Hermite recurrence
/// `h_{n+1} = z √(2/(n+1)) h_n − √(n/(n+1)) h_{n−1}`, kept in scaled form with
/// a running log-magnitude.
pub fn squeezed_coherent(alpha: Complex64, squeeze: f64, phase: f64, truncation: f64) -> Result<PhotonDistribution> {
    check_truncation(truncation)?;
    if !(squeeze.is_finite() && squeeze >= 0.0) {
        return Err(MazerError::invalid(format!("squeeze parameter must be finite and >= 0, got {squeeze}")));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite() && phase.is_finite()) {
        return Err(MazerError::invalid("squeezed state parameters must be finite"));
    }
    if squeeze == 0.0 {
        let mut dist = coherent_amplitude(alpha, truncation)?;
        dist.params = DistributionParams::SqueezedCoherent { alpha, squeeze, phase };
        return Ok(dist);
    }

    let tanh = squeeze.tanh();
    let log_tanh = tanh.ln();
    let z = alpha * Complex64::from_polar(1.0, -0.5 * phase) / (2.0 * squeeze).sinh().sqrt();
    // ln of the n-independent factor exp(−|α|²/2 + ½ e^{−iθ} α² tanh r) / √cosh r
    let log_prefactor = -0.5 * alpha.norm_sqr()
        + 0.5 * tanh * Complex64::from_polar(1.0, -phase) * alpha * alpha
        - Complex64::new(0.5 * squeeze.cosh().ln(), 0.0);

    let mut amplitudes = Vec::new();
    let mut total = 0.0;
    // h_{n−1}, h_n scaled by e^{−log_scale}
    let mut prev = Complex64::new(0.0, 0.0);
    let mut curr = Complex64::new(1.0, 0.0);
    let mut log_scale = 0.0;
    let mut cancelled = false;
    // p(n−1): squeezed vacua vanish on every odd n
    let mut previous_p = 1.0;
    let mean = alpha.norm_sqr() + squeeze.sinh().powi(2);

    for n in 0..MAX_PHOTONS {
        let log = log_prefactor
            + Complex64::new(log_scale + 0.5 * n as f64 * log_tanh, 0.5 * n as f64 * phase);
        let c = if curr == Complex64::new(0.0, 0.0) {
            curr
        } else {
            log.exp() * curr
        };
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(MazerError::Numerical {
                index: n,
                reason: "squeezed amplitude is not finite".to_string(),
            });
        }
        total += c.norm_sqr();
        amplitudes.push(c);
        let last = std::mem::replace(&mut previous_p, c.norm_sqr());
        if 1.0 - total <= truncation || (n as f64 > mean + 20.0 && c.norm_sqr() + last < 1e-300) {
            break;
        }

        let nf = n as f64;
        let grow = z * (2.0 / (nf + 1.0)).sqrt() * curr;
        let shrink = prev * (nf / (nf + 1.0)).sqrt();
        let next = grow - shrink;
        // Consecutive Hermite polynomials share no zeros, so two cancelled
        // steps in a row mean the recurrence has lost all its digits.
        let lost = next.norm() < 1e-15 * (grow.norm() + shrink.norm());
        if lost && cancelled {
            return Err(MazerError::Numerical {
                index: n + 1,
                reason: "Hermite recurrence lost all significant digits".to_string(),
            });
        }
        cancelled = lost;
        prev = curr;
        curr = next;
        let size = curr.norm().max(prev.norm());
        if size > 1e100 || (size < 1e-100 && size > 0.0) {
            prev /= size;
            curr /= size;
            log_scale += size.ln();
        }
    }

    let dist = PhotonDistribution::from_amplitudes(
        amplitudes,
        DistributionParams::SqueezedCoherent { alpha, squeeze, phase },
    );
    if dist.deficit > truncation.max(1e-8) {
        return Err(MazerError::Numerical {
            index: dist.n_max(),
            reason: format!("squeezed distribution lost normalization (deficit {:.3e})", dist.deficit),
        });
    }
    Ok(dist)
}

/// User-supplied p(n), renormalized to unit sum. Amplitudes are taken real
/// and non-negative.
pub fn custom(p: Vec<f64>) -> Result<PhotonDistribution> {
    if p.is_empty() {
        return Err(MazerError::invalid("custom distribution is empty"));
    }
    for (n, &v) in p.iter().enumerate() {
        if !(v.is_finite() && v >= 0.0) {
            return Err(MazerError::invalid(format!("p({n}) = {v} must be finite and >= 0")));
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > CUSTOM_NORM_TOLERANCE {
        return Err(MazerError::invalid(format!("custom distribution sums to {total}, expected 1")));
    }
    let amplitudes = p.iter().map(|v| Complex64::new((v / total).sqrt(), 0.0)).collect();
    Ok(PhotonDistribution::from_amplitudes(amplitudes, DistributionParams::Custom))
}

fn check_truncation(truncation: f64) -> Result<()> {
    if truncation > 0.0 && truncation < 1.0 {
        Ok(())
    } else {
        Err(MazerError::invalid(format!("truncation must lie in (0, 1), got {truncation}")))
    }
}

/// Perfect trapping state
/// `|γ±⟩ = (γᵐ|a⟩ ± |b⟩)/√(1+|γ|²ᵐ) ⊗ √(1−|γ|²) Σ γⁿ|n⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappingState {
    pub gamma: Complex64,
    /// Which dressed branch every sector occupies.
    pub sign: Branch,
    pub m: u32,
}

impl TrappingState {
    pub fn new(gamma: Complex64, sign: Branch, m: u32) -> Result<Self> {
        if !(gamma.norm() < 1.0) {
            return Err(MazerError::invalid(format!("trapping state needs |γ| < 1, got {}", gamma.norm())));
        }
        if m == 0 {
            return Err(MazerError::invalid("photon order m must be at least 1"));
        }
        Ok(TrappingState { gamma, sign, m })
    }

    /// Atomic amplitudes (c_a, c_b).
    pub fn atom(&self) -> (Complex64, Complex64) {
        let norm = (1.0 + self.gamma.norm().powi(2 * self.m as i32)).sqrt();
        (self.gamma.powu(self.m) / norm, Complex64::new(self.sign.sign(), 0.0) / norm)
    }

    /// Field amplitudes √(1−|γ|²) γⁿ for n ≤ n_max.
    pub fn field(&self, n_max: usize) -> Vec<Complex64> {
        let scale = (1.0 - self.gamma.norm_sqr()).sqrt();
        let mut power = Complex64::new(1.0, 0.0);
        (0..=n_max)
            .map(|_| {
                let c = power * scale;
                power *= self.gamma;
                c
            })
            .collect()
    }
}

/// Dressed coordinates of a trapping state, truncated to tail weight
/// `truncation`. Each sector holds a single dressed state, so θ_n is exactly
/// 0 (sign +) or π (sign −).
pub fn trapping_state_coordinates(state: &TrappingState, truncation: f64) -> Result<DressedStateCoordinates> {
    check_truncation(truncation)?;
    let TrappingState { gamma, sign, m } = *state;
    let g2 = gamma.norm_sqr();
    let norm = ((1.0 - g2) / (1.0 + g2.powi(m as i32))).sqrt();

    let lower: Vec<Complex64> = (1..=m)
        .map(|j| sign.sign() * norm * gamma.powu(m - j))
        .collect();

    // sectors n ≥ 0: √2 · norm · γ^{n+m} on |sign, n⟩
    let mut modes = Vec::new();
    let mut amp = std::f64::consts::SQRT_2 * norm * gamma.powu(m);
    // remaining tail weight beyond the current sector: 2 norm² |γ|^{2(n+m)} / (1 − |γ|²)
    let mut tail = if g2 == 0.0 {
        0.0
    } else {
        2.0 * norm * norm * g2.powi(m as i32) / (1.0 - g2)
    };
    while tail > truncation && modes.len() < MAX_PHOTONS {
        let pair = match sign {
            Branch::Plus => (amp, Complex64::new(0.0, 0.0)),
            Branch::Minus => (Complex64::new(0.0, 0.0), amp),
        };
        modes.push(pair);
        tail -= amp.norm_sqr();
        amp *= gamma;
    }
    DressedStateCoordinates::from_dressed_amplitudes(m, &modes, &lower)?.truncated(truncation)
}
