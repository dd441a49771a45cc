//! Stationary scattering on the dressed potentials ±κ_n² u(z).
//!
//! Each photon-number channel `n` splits into two independent 1D problems,
//! `φ'' + (k² ∓ κ_n² u(z)) φ = 0`, one for each dressed branch. The incident
//! wave is `e^{ikz}` on the left, the reflected wave `r e^{-ikz}` and the
//! transmitted wave `t e^{ik(z-κL)}` on the right.

mod mesa;
mod numeric;

pub use mesa::{mesa_approx_emission, mesa_approx_regime, solve_mesa_analytic};
pub use numeric::{solve_numeric, NumericSolver, MAX_TOLERANCE, MIN_TOLERANCE};

use num_complex::Complex64;

use crate::error::{MazerError, Result};
use crate::profile::{ModeProfile, ProfileKind};

/// Which dressed potential the channel sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// V⁺ = +κ_n² u(z), a barrier.
    Plus,
    /// V⁻ = −κ_n² u(z), a well.
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// One scattering problem: a coupling, a momentum, a branch and a profile.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSpec<'a> {
    /// κ_n / κ
    pub coupling: f64,
    /// k / κ
    pub momentum: f64,
    pub branch: Branch,
    pub profile: &'a ModeProfile,
}

impl<'a> ChannelSpec<'a> {
    pub fn new(coupling: f64, momentum: f64, branch: Branch, profile: &'a ModeProfile) -> Self {
        ChannelSpec {
            coupling,
            momentum,
            branch,
            profile,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.momentum.is_finite() && self.momentum > 0.0) {
            return Err(MazerError::invalid(format!(
                "momentum must be finite and positive, got {}",
                self.momentum
            )));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(MazerError::invalid(format!(
                "coupling must be finite and non-negative, got {}",
                self.coupling
            )));
        }
        Ok(())
    }

    /// Potential strength with sign, `±κ_n²`.
    pub fn potential_scale(&self) -> f64 {
        self.branch.sign() * self.coupling * self.coupling
    }
}

/// Reflection and transmission amplitudes for one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub r: Complex64,
    pub t: Complex64,
    /// |1 − |r|² − |t|²|
    pub flux_defect: f64,
}

impl ScatteringAmplitudes {
    pub fn new(r: Complex64, t: Complex64) -> Self {
        let flux_defect = (1.0 - r.norm_sqr() - t.norm_sqr()).abs();
        ScatteringAmplitudes { r, t, flux_defect }
    }

    /// No scattering at all: r = 0, t = 1.
    pub fn free() -> Self {
        ScatteringAmplitudes::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }
}

/// Both dressed branches of one photon-number channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    pub coupling: f64,
    pub plus: ScatteringAmplitudes,
    pub minus: ScatteringAmplitudes,
}

impl ChannelPair {
    /// A channel that does not interact.
    pub fn free(coupling: f64) -> Self {
        ChannelPair {
            coupling,
            plus: ScatteringAmplitudes::free(),
            minus: ScatteringAmplitudes::free(),
        }
    }

    pub fn kernel(&self) -> Complex64 {
        emission_kernel(&self.plus, &self.minus)
    }

    pub fn flux_defect(&self) -> f64 {
        self.plus.flux_defect.max(self.minus.flux_defect)
    }

    pub fn branch(&self, branch: Branch) -> &ScatteringAmplitudes {
        match branch {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }
}

/// κ_n / κ = ((n+1)(n+2)…(n+m))^{1/4}, accumulated in log space.
pub fn coupling_strength(m: u32, n: u64) -> f64 {
    let log_product: f64 = (1..=u64::from(m)).map(|j| ((n + j) as f64).ln()).sum();
    (0.25 * log_product).exp()
}

/// K_n = r⁺ r⁻* + t⁺ t⁻*.
pub fn emission_kernel(plus: &ScatteringAmplitudes, minus: &ScatteringAmplitudes) -> Complex64 {
    plus.r * minus.r.conj() + plus.t * minus.t.conj()
}

/// Largest |K_n| accepted before the kernel is treated as a flux violation.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

/// Emission probability for a Fock field, (1 − Re K_n) / 2.
pub fn emission_probability_fock(kernel: Complex64) -> Result<f64> {
    let modulus = kernel.norm();
    if !(modulus <= 1.0 + KERNEL_TOLERANCE) {
        return Err(MazerError::invalid(format!(
            "|K_n| = {modulus} exceeds 1; upstream amplitudes violate flux conservation"
        )));
    }
    Ok(((1.0 - kernel.re) / 2.0).clamp(0.0, 1.0))
}

/// How channels are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Closed form for mesa profiles, numerical integration otherwise.
    #[default]
    Auto,
    /// Numerical integration for every profile.
    Numeric,
}

/// Solve one channel with the chosen method.
pub fn solve_channel(spec: &ChannelSpec<'_>, tol: f64, method: SolverMethod) -> Result<ScatteringAmplitudes> {
    match (method, spec.profile.kind()) {
        (SolverMethod::Auto, ProfileKind::Mesa) => solve_mesa_analytic(spec),
        _ => solve_numeric(spec, tol),
    }
}

/// Solve both branches for every coupling at one momentum and profile.
///
/// Errors are tagged with the index of the failing coupling.
pub fn solve_channel_pairs(
    profile: &ModeProfile,
    momentum: f64,
    couplings: &[f64],
    tol: f64,
    method: SolverMethod,
) -> Result<Vec<ChannelPair>> {
    if method == SolverMethod::Auto && profile.kind() == ProfileKind::Mesa {
        return couplings
            .iter()
            .enumerate()
            .map(|(n, &c)| {
                let solve = |branch| solve_mesa_analytic(&ChannelSpec::new(c, momentum, branch, profile));
                let pair = solve(Branch::Plus).and_then(|plus| {
                    Ok(ChannelPair {
                        coupling: c,
                        plus,
                        minus: solve(Branch::Minus)?,
                    })
                });
                pair.map_err(|e| tag_channel(n, e))
            })
            .collect();
    }
    NumericSolver::new(profile, momentum, tol)?.solve_pairs(couplings)
}

pub(crate) fn tag_channel(channel: usize, err: MazerError) -> MazerError {
    match err {
        MazerError::Solver { .. } | MazerError::Numerical { .. } => MazerError::Channel {
            channel,
            source: Box::new(err),
        },
        other => other,
    }
}
