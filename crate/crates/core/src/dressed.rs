//! Dressed-state coordinates of a pure atom–field state and the observables
//! they determine after scattering.
//!
//! Sector `n ≥ 0` is spanned by `|±,n⟩ = (|a,n⟩ ± |b,n+m⟩)/√2` with amplitudes
//!
//! ```text
//! c⁺_n = w_n e^{iχ_n} cos(θ_n/2)
//! c⁻_n = w_n e^{i(χ_n−φ_n)} sin(θ_n/2)
//! ```
//!
//! The lower manifold `|b, m−j⟩` (j = 1…m) has amplitudes `w_{−j} e^{iχ_{−j}}`
//! and never interacts with the cavity.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{MazerError, Result};
use crate::scattering::{ChannelPair, KERNEL_TOLERANCE};

/// Allowed error in Σw² = 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Amplitudes below this are treated as exact zeros when extracting angles.
const ZERO_AMPLITUDE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoordinates {
    pub weight: f64,
    pub theta: f64,
    pub phi: f64,
    pub chi: f64,
}

impl ModeCoordinates {
    /// Canonical record for an empty sector.
    pub const ZERO: ModeCoordinates = ModeCoordinates {
        weight: 0.0,
        theta: PI / 2.0,
        phi: 0.0,
        chi: 0.0,
    };

    fn from_amplitudes(plus: Complex64, minus: Complex64) -> Self {
        let (a, b) = (plus.norm(), minus.norm());
        if a < ZERO_AMPLITUDE && b < ZERO_AMPLITUDE {
            return ModeCoordinates::ZERO;
        }
        let (chi, phi) = if a == 0.0 {
            (minus.arg(), 0.0)
        } else if b == 0.0 {
            (plus.arg(), 0.0)
        } else {
            (plus.arg(), plus.arg() - minus.arg())
        };
        ModeCoordinates {
            weight: a.hypot(b),
            theta: 2.0 * b.atan2(a),
            phi: wrap(phi),
            chi: wrap(chi),
        }
    }

    /// (c⁺, c⁻)
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        (
            Complex64::from_polar(self.weight * c, self.chi),
            Complex64::from_polar(self.weight * s, self.chi - self.phi),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerCoordinates {
    pub weight: f64,
    pub chi: f64,
}

/// Joint state in the bare basis, as produced by
/// [`DressedStateCoordinates::to_joint_amplitudes`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitudes {
    excited: Vec<Complex64>,
    ground: Vec<Complex64>,
}

impl JointAmplitudes {
    /// ⟨a,n|ψ⟩
    pub fn excited(&self, n: usize) -> Complex64 {
        self.excited.get(n).copied().unwrap_or_default()
    }

    /// ⟨b,n|ψ⟩
    pub fn ground(&self, n: usize) -> Complex64 {
        self.ground.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited.iter().chain(&self.ground).map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedStateCoordinates {
    m: u32,
    modes: Vec<ModeCoordinates>,
    /// `lower[j − 1]` holds w_{−j}.
    lower: Vec<LowerCoordinates>,
}

impl DressedStateCoordinates {
    pub fn new(m: u32, modes: Vec<ModeCoordinates>, lower: Vec<LowerCoordinates>) -> Result<Self> {
        if m == 0 {
            return Err(MazerError::invalid("photon order m must be at least 1"));
        }
        if lower.len() != m as usize {
            return Err(MazerError::invalid(format!(
                "expected {m} lower-manifold coordinates, got {}",
                lower.len()
            )));
        }
        for (n, mode) in modes.iter().enumerate() {
            let ok = (0.0..=1.0 + NORMALIZATION_TOLERANCE).contains(&mode.weight)
                && (0.0..=PI).contains(&mode.theta)
                && mode.phi.is_finite()
                && mode.chi.is_finite();
            if !ok {
                return Err(MazerError::invalid(format!("mode {n} coordinates out of range: {mode:?}")));
            }
        }
        if lower.iter().any(|l| !(l.weight >= 0.0 && l.chi.is_finite())) {
            return Err(MazerError::invalid("lower-manifold coordinates out of range"));
        }
        let coords = DressedStateCoordinates { m, modes, lower };
        let total = coords.total_weight();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MazerError::invalid(format!("dressed-state weights sum to {total}, expected 1")));
        }
        Ok(coords)
    }

    /// Coordinates from dressed amplitudes: `modes[n] = (c⁺_n, c⁻_n)` and
    /// `lower[j − 1]` the amplitude of `|b, m−j⟩`. Entangled states enter
    /// here directly. The global phase is fixed by χ_{−m} = 0.
    pub fn from_dressed_amplitudes(m: u32, modes: &[(Complex64, Complex64)], lower: &[Complex64]) -> Result<Self> {
        if lower.len() != m as usize {
            return Err(MazerError::invalid(format!(
                "expected {m} lower-manifold amplitudes, got {}",
                lower.len()
            )));
        }
        let rotation = match lower.last() {
            Some(c) if c.norm() > 0.0 => Complex64::from_polar(1.0, -c.arg()),
            _ => Complex64::new(1.0, 0.0),
        };
        let modes = modes
            .iter()
            .map(|&(p, q)| ModeCoordinates::from_amplitudes(p * rotation, q * rotation))
            .collect();
        let mut lower: Vec<_> = lower
            .iter()
            .map(|&c| {
                let c = c * rotation;
                LowerCoordinates {
                    weight: c.norm(),
                    chi: if c.norm() > 0.0 { wrap(c.arg()) } else { 0.0 },
                }
            })
            .collect();
        if let Some(last) = lower.last_mut() {
            last.chi = 0.0;
        }
        DressedStateCoordinates::new(m, modes, lower)
    }

    /// Expand `(c_a|a⟩ + c_b|b⟩) ⊗ Σ c(n)|n⟩` over the dressed basis.
    pub fn from_product_state(c_a: Complex64, c_b: Complex64, field: &[Complex64], m: u32) -> Result<Self> {
        if m == 0 {
            return Err(MazerError::invalid("photon order m must be at least 1"));
        }
        let atom_norm = c_a.norm_sqr() + c_b.norm_sqr();
        if (atom_norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MazerError::invalid(format!("atomic state has norm² {atom_norm}, expected 1")));
        }
        let field_norm: f64 = field.iter().map(|c| c.norm_sqr()).sum();
        if (field_norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MazerError::invalid(format!("field state has norm² {field_norm}, expected 1")));
        }
        let c = |n: usize| field.get(n).copied().unwrap_or_default();
        let m_us = m as usize;
        let modes: Vec<_> = (0..field.len())
            .map(|n| {
                let (sa, sb) = (c_a * c(n), c_b * c(n + m_us));
                ((sa + sb) * FRAC_1_SQRT_2, (sa - sb) * FRAC_1_SQRT_2)
            })
            .collect();
        // |b, m−j⟩ for j = 1…m
        let lower: Vec<_> = (1..=m_us).map(|j| c_b * c(m_us - j)).collect();
        Self::from_dressed_amplitudes(m, &modes, &lower)
    }

    /// Keep sectors up to the smallest N with Σ w² ≥ 1 − ε (lower manifold
    /// included) and renormalize.
    pub fn truncated(&self, truncation: f64) -> Result<Self> {
        if !(truncation > 0.0 && truncation < 1.0) {
            return Err(MazerError::invalid(format!("truncation must lie in (0, 1), got {truncation}")));
        }
        let total = self.total_weight();
        let mut kept = self.lower.iter().map(|l| l.weight * l.weight).sum::<f64>();
        let mut len = 0;
        while len < self.modes.len() && kept < total - truncation {
            kept += self.modes[len].weight.powi(2);
            len += 1;
        }
        // trailing empty sectors carry nothing
        while len > 0 && self.modes[len - 1].weight == 0.0 {
            len -= 1;
        }
        let scale = 1.0 / kept.sqrt();
        let modes = self.modes[..len]
            .iter()
            .map(|mode| ModeCoordinates {
                weight: mode.weight * scale,
                ..*mode
            })
            .collect();
        let lower = self
            .lower
            .iter()
            .map(|l| LowerCoordinates {
                weight: l.weight * scale,
                ..*l
            })
            .collect();
        Ok(DressedStateCoordinates {
            m: self.m,
            modes,
            lower,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modes(&self) -> &[ModeCoordinates] {
        &self.modes
    }

    pub fn lower(&self) -> &[LowerCoordinates] {
        &self.lower
    }

    /// Number of interacting sectors kept (N_max + 1).
    pub fn sector_count(&self) -> usize {
        self.modes.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.weight * m.weight).sum::<f64>()
            + self.lower.iter().map(|l| l.weight * l.weight).sum::<f64>()
    }

    /// Σ_{j=1}^{m} w_{−j}²
    pub fn lower_weight(&self) -> f64 {
        self.lower.iter().map(|l| l.weight * l.weight).sum()
    }

    /// Back to the bare basis |a,n⟩, |b,n⟩.
    pub fn to_joint_amplitudes(&self) -> JointAmplitudes {
        let m = self.m as usize;
        let mut excited = vec![Complex64::default(); self.modes.len()];
        let mut ground = vec![Complex64::default(); self.modes.len() + m];
        for (n, mode) in self.modes.iter().enumerate() {
            let (p, q) = mode.amplitudes();
            excited[n] = (p + q) * FRAC_1_SQRT_2;
            ground[n + m] = (p - q) * FRAC_1_SQRT_2;
        }
        for (j, low) in self.lower.iter().enumerate() {
            ground[m - (j + 1)] = Complex64::from_polar(low.weight, low.chi);
        }
        JointAmplitudes { excited, ground }
    }

    /// σ_aa(0) = ½[1 − Σ w_{−n}² + Σ w_n² sin θ_n cos φ_n]
    pub fn sigma_aa_initial(&self) -> f64 {
        let interference: f64 = self
            .modes
            .iter()
            .map(|m| m.weight * m.weight * m.theta.sin() * m.phi.cos())
            .sum();
        0.5 * (1.0 - self.lower_weight() + interference)
    }
}

fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Δ_n = (w²/2) sin θ [Re(e^{iφ} K) − cos φ]
pub fn delta_n(weight: f64, theta: f64, phi: f64, kernel: Complex64) -> f64 {
    let rotated = Complex64::from_polar(1.0, phi) * kernel;
    0.5 * weight * weight * theta.sin() * (rotated.re - phi.cos())
}

fn deltas(coords: &DressedStateCoordinates, kernels: &[Complex64]) -> Result<Vec<f64>> {
    coords
        .modes
        .iter()
        .enumerate()
        .map(|(n, mode)| match kernels.get(n) {
            Some(&k) => {
                if k.norm() > 1.0 + KERNEL_TOLERANCE {
                    return Err(MazerError::invalid(format!("|K_{n}| = {} exceeds 1", k.norm())));
                }
                Ok(delta_n(mode.weight, mode.theta, mode.phi, k))
            }
            None if mode.weight == 0.0 => Ok(0.0),
            None => Err(MazerError::invalid(format!("missing kernel for sector n={n}"))),
        })
        .collect()
}

/// δσ_aa = Σ Δ_n
pub fn population_change(coords: &DressedStateCoordinates, kernels: &[Complex64]) -> Result<f64> {
    Ok(deltas(coords, kernels)?.iter().sum())
}

/// σ_aa after the interaction.
pub fn sigma_aa_final(coords: &DressedStateCoordinates, kernels: &[Complex64]) -> Result<f64> {
    Ok(coords.sigma_aa_initial() + population_change(coords, kernels)?)
}

/// δP_n = Δ_n − Δ_{n−m} (n ≥ m), Δ_n (n < m), for n = 0 … N_max + m.
pub fn photon_change(coords: &DressedStateCoordinates, kernels: &[Complex64]) -> Result<Vec<f64>> {
    Ok(photon_change_from(&deltas(coords, kernels)?, coords.m as usize))
}

fn photon_change_from(deltas: &[f64], m: usize) -> Vec<f64> {
    if deltas.is_empty() {
        return Vec::new();
    }
    (0..deltas.len() + m)
        .map(|n| {
            let gain = deltas.get(n).copied().unwrap_or(0.0);
            let loss = if n >= m { deltas[n - m] } else { 0.0 };
            gain - loss
        })
        .collect()
}

fn check_pairs(coords: &DressedStateCoordinates, pairs: &[ChannelPair]) -> Result<()> {
    match coords.modes.iter().enumerate().skip(pairs.len()).find(|(_, m)| m.weight > 0.0) {
        Some((n, _)) => Err(MazerError::invalid(format!("missing scattering amplitudes for sector n={n}"))),
        None => Ok(()),
    }
}

/// (R, T): every sector splits into its two branches with weights
/// cos²(θ/2) and sin²(θ/2); the lower manifold is always transmitted.
pub fn reflection_transmission(coords: &DressedStateCoordinates, pairs: &[ChannelPair]) -> Result<(f64, f64)> {
    check_pairs(coords, pairs)?;
    let mut reflection = 0.0;
    let mut transmission = coords.lower_weight();
    for (mode, pair) in coords.modes.iter().zip(pairs) {
        let w2 = mode.weight * mode.weight;
        let (s, c) = (0.5 * mode.theta).sin_cos();
        let (plus, minus) = (c * c, s * s);
        reflection += w2 * (plus * pair.plus.reflectance() + minus * pair.minus.reflectance());
        transmission += w2 * (plus * pair.plus.transmittance() + minus * pair.minus.transmittance());
    }
    Ok((reflection, transmission))
}

/// Every observable of one interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionOutcome {
    pub sigma_aa_initial: f64,
    pub sigma_aa_final: f64,
    pub delta_sigma_aa: f64,
    /// δP_n for n = 0 … N_max + m
    pub delta_p: Vec<f64>,
    pub reflection: f64,
    pub transmission: f64,
    pub kernels: Vec<Complex64>,
    /// Largest flux defect among the channels used.
    pub flux_defect: f64,
}

pub fn evaluate_interaction(coords: &DressedStateCoordinates, pairs: &[ChannelPair]) -> Result<InteractionOutcome> {
    check_pairs(coords, pairs)?;
    let kernels: Vec<Complex64> = pairs.iter().map(ChannelPair::kernel).collect();
    let d = deltas(coords, &kernels)?;
    let delta_sigma_aa: f64 = d.iter().sum();
    let (reflection, transmission) = reflection_transmission(coords, pairs)?;
    let sigma_aa_initial = coords.sigma_aa_initial();
    Ok(InteractionOutcome {
        sigma_aa_initial,
        sigma_aa_final: sigma_aa_initial + delta_sigma_aa,
        delta_sigma_aa,
        delta_p: photon_change_from(&d, coords.m as usize),
        reflection,
        transmission,
        kernels,
        flux_defect: pairs.iter().map(ChannelPair::flux_defect).fold(0.0, f64::max),
    })
}

/// Normalized momentum distribution |A(k)|² as weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum {
    points: Vec<(f64, f64)>,
}

impl MomentumSpectrum {
    /// Weights include any quadrature factors and must sum to one.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(MazerError::invalid("momentum spectrum is empty"));
        }
        for &(k, w) in &points {
            if !(k.is_finite() && k > 0.0) {
                return Err(MazerError::invalid(format!(
                    "spectrum momentum must be finite and positive (atoms enter from the left), got {k}"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(MazerError::invalid(format!("spectrum weight must be finite and >= 0, got {w}")));
            }
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MazerError::invalid(format!("spectrum weights sum to {total}, expected 1")));
        }
        Ok(MomentumSpectrum { points })
    }

    pub fn monochromatic(k: f64) -> Result<Self> {
        Self::new(vec![(k, 1.0)])
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Quantities that can be averaged over a momentum spectrum.
pub trait Superpose: Sized {
    /// `self · weight`
    fn scaled(&self, weight: f64) -> Self;
    /// `self += other · weight`
    fn add_scaled(&mut self, other: &Self, weight: f64);
}

impl Superpose for f64 {
    fn scaled(&self, weight: f64) -> Self {
        self * weight
    }

    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += other * weight;
    }
}

impl Superpose for Complex64 {
    fn scaled(&self, weight: f64) -> Self {
        self * weight
    }

    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += other * weight;
    }
}

impl<T: Superpose + Clone + Default> Superpose for Vec<T> {
    fn scaled(&self, weight: f64) -> Self {
        self.iter().map(|x| x.scaled(weight)).collect()
    }

    fn add_scaled(&mut self, other: &Self, weight: f64) {
        if other.len() > self.len() {
            self.resize(other.len(), T::default());
        }
        for (a, b) in self.iter_mut().zip(other) {
            a.add_scaled(b, weight);
        }
    }
}

impl Superpose for InteractionOutcome {
    fn scaled(&self, weight: f64) -> Self {
        InteractionOutcome {
            sigma_aa_initial: self.sigma_aa_initial * weight,
            sigma_aa_final: self.sigma_aa_final * weight,
            delta_sigma_aa: self.delta_sigma_aa * weight,
            delta_p: self.delta_p.scaled(weight),
            reflection: self.reflection * weight,
            transmission: self.transmission * weight,
            kernels: self.kernels.scaled(weight),
            flux_defect: self.flux_defect,
        }
    }

    fn add_scaled(&mut self, other: &Self, weight: f64) {
        self.sigma_aa_initial += other.sigma_aa_initial * weight;
        self.sigma_aa_final += other.sigma_aa_final * weight;
        self.delta_sigma_aa += other.delta_sigma_aa * weight;
        self.delta_p.add_scaled(&other.delta_p, weight);
        self.reflection += other.reflection * weight;
        self.transmission += other.transmission * weight;
        self.kernels.add_scaled(&other.kernels, weight);
        self.flux_defect = self.flux_defect.max(other.flux_defect);
    }
}

/// Σ weight · evaluator(k) over the spectrum.
pub fn wavepacket_average<T, F>(spectrum: &MomentumSpectrum, mut evaluator: F) -> Result<T>
where
    T: Superpose,
    F: FnMut(f64) -> Result<T>,
{
    let mut points = spectrum.points.iter();
    let &(k0, w0) = points.next().expect("spectrum is never empty");
    let mut acc = evaluator(k0)?.scaled(w0);
    for &(k, w) in points {
        acc.add_scaled(&evaluator(k)?, w);
    }
    Ok(acc)
}
