//! JSON run configurations. Unknown keys are rejected; relative file paths
//! are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use super::csv::read_pairs;
use crate::dressed::{DressedStateCoordinates, MomentumSpectrum};
use crate::error::{MazerError, Result};
use crate::field::{self, PhotonDistribution, TrappingState, DEFAULT_TRUNCATION};
use crate::profile::{ModeProfile, ProfileKind, DEFAULT_SIGMA_RATIO};
use crate::scattering::{Branch, SolverMethod, MAX_TOLERANCE, MIN_TOLERANCE};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: u32,
    pub profile: ProfileSpec,
    pub k_over_kappa: MomentumSpec,
    #[serde(alias = "kL_grid")]
    pub kl_grid: GridSpec,
    pub field: FieldSpec,
    #[serde(default)]
    pub atom: Option<AtomSpec>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub truncation: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: Option<SolverSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: String,
    #[serde(default)]
    pub sigma_ratio: Option<f64>,
    #[serde(default)]
    pub samples_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MomentumSpec {
    Single(f64),
    Spectrum(SpectrumFile),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub spectrum_file: PathBuf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(MazerError::invalid(format!("kL grid needs count >= 2, got {}", self.count)));
        }
        if !(self.start.is_finite() && self.start >= 0.0) {
            return Err(MazerError::invalid(format!("kL grid start must be >= 0, got {}", self.start)));
        }
        if !(self.stop.is_finite() && self.stop > self.start) {
            return Err(MazerError::invalid(format!(
                "kL grid stop must exceed start, got {}..{}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Evenly spaced points, both ends included.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Complex numbers are written `[re, im]`.
pub type ComplexSpec = [f64; 2];

fn complex(c: ComplexSpec) -> Complex64 {
    Complex64::new(c[0], c[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    Fock {
        n: usize,
    },
    Coherent {
        #[serde(default)]
        mean: Option<f64>,
        #[serde(default)]
        alpha: Option<ComplexSpec>,
    },
    Squeezed {
        alpha: ComplexSpec,
        r: f64,
        #[serde(default)]
        theta: f64,
    },
    Custom {
        file: PathBuf,
    },
    Trapping {
        gamma: ComplexSpec,
        sign: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum AtomSpec {
    Excited,
    Ground,
    Superposition { c_a: ComplexSpec, c_b: ComplexSpec },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverSpec {
    Auto,
    Numeric,
}

/// Parse `+`/`-` (also `plus`/`minus`).
pub fn parse_sign(s: &str) -> Result<Branch> {
    match s {
        "+" | "plus" => Ok(Branch::Plus),
        "-" | "minus" => Ok(Branch::Minus),
        other => Err(MazerError::invalid(format!("sign must be `+` or `-`, got `{other}`"))),
    }
}

/// Initial atom–field state of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// |a⟩ ⊗ field: P_em = Σ p(n) P_em(n).
    Excited(PhotonDistribution),
    /// |b⟩ ⊗ field: absorption = Σ p(n+m) P_em(n).
    Ground(PhotonDistribution),
    /// Anything else, as dressed coordinates; the value is δσ_aa.
    Joint(DressedStateCoordinates),
}

/// A validated sweep, ready to run.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub m: u32,
    /// Profile shape; its length is replaced at every grid point.
    pub profile: ModeProfile,
    pub spectrum: MomentumSpectrum,
    pub grid: Vec<f64>,
    pub initial: InitialState,
    pub tol: f64,
    pub method: SolverMethod,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_m(self.m)?;
        check_tolerance(self.tol)?;
        if self.grid.is_empty() || self.grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(MazerError::invalid("kL grid points must be finite and >= 0"));
        }
        let state_m = match &self.initial {
            InitialState::Joint(coords) => coords.m(),
            _ => self.m,
        };
        if state_m != self.m {
            return Err(MazerError::invalid("initial state and sweep disagree on m"));
        }
        Ok(())
    }
}

pub(crate) fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(MazerError::invalid("photon order m must be at least 1"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol > MIN_TOLERANCE && tol < MAX_TOLERANCE {
        Ok(())
    } else {
        Err(MazerError::invalid(format!(
            "tol must lie in ({MIN_TOLERANCE:e}, {MAX_TOLERANCE:e}), got {tol:e}"
        )))
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Build a profile shape (unit length) from its name and options.
pub fn build_profile(kind: &str, sigma_ratio: Option<f64>, samples: Option<Vec<(f64, f64)>>) -> Result<ModeProfile> {
    let kind: ProfileKind = kind.parse()?;
    if sigma_ratio.is_some() && kind != ProfileKind::Gaussian {
        return Err(MazerError::invalid("sigma_ratio only applies to the gaussian profile"));
    }
    if samples.is_some() != (kind == ProfileKind::Sampled) {
        return Err(MazerError::invalid("samples_file is required for, and only for, the sampled profile"));
    }
    match kind {
        ProfileKind::Mesa => ModeProfile::mesa(1.0),
        ProfileKind::Sech2 => ModeProfile::sech2(1.0),
        ProfileKind::Gaussian => ModeProfile::gaussian(1.0, sigma_ratio.unwrap_or(DEFAULT_SIGMA_RATIO)),
        ProfileKind::Sampled => ModeProfile::sampled(1.0, samples.unwrap_or_default()),
    }
}

fn read_distribution(path: &Path) -> Result<PhotonDistribution> {
    let pairs = read_pairs(path)?;
    let mut p: Vec<f64> = Vec::new();
    for (n, value) in pairs {
        if !(n >= 0.0 && n.fract() == 0.0 && n < 1e7) {
            return Err(MazerError::Parse {
                path: path.to_path_buf(),
                reason: format!("photon number {n} is not a non-negative integer"),
            });
        }
        let n = n as usize;
        if n >= p.len() {
            p.resize(n + 1, f64::NAN);
        }
        if !p[n].is_nan() {
            return Err(MazerError::Parse {
                path: path.to_path_buf(),
                reason: format!("photon number {n} listed twice"),
            });
        }
        p[n] = value;
    }
    p.iter_mut().filter(|v| v.is_nan()).for_each(|v| *v = 0.0);
    field::custom(p)
}

impl ConfigFile {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MazerError::Parse {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|source| MazerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text, path)?, base))
    }

    /// Validate and load every referenced file.
    pub fn resolve(&self, base: &Path) -> Result<SweepConfig> {
        check_m(self.m)?;
        let tol = self.tol.unwrap_or(DEFAULT_TOLERANCE);
        check_tolerance(tol)?;
        let truncation = self.truncation.unwrap_or(DEFAULT_TRUNCATION);
        if !(truncation > 0.0 && truncation < 1.0) {
            return Err(MazerError::invalid(format!("truncation must lie in (0, 1), got {truncation}")));
        }
        self.kl_grid.validate()?;

        let samples = match &self.profile.samples_file {
            Some(file) => Some(read_pairs(&resolve(base, file))?),
            None => None,
        };
        let profile = build_profile(&self.profile.kind, self.profile.sigma_ratio, samples)?;

        let spectrum = match &self.k_over_kappa {
            MomentumSpec::Single(k) => MomentumSpectrum::monochromatic(*k)?,
            MomentumSpec::Spectrum(s) => MomentumSpectrum::new(read_pairs(&resolve(base, &s.spectrum_file))?)?,
        };

        let distribution = |spec: &FieldSpec| -> Result<PhotonDistribution> {
            match spec {
                FieldSpec::Fock { n } => Ok(field::fock(*n)),
                FieldSpec::Coherent { mean, alpha } => match (mean, alpha) {
                    (Some(mean), None) => field::coherent(*mean, truncation),
                    (None, Some(alpha)) => field::coherent_amplitude(complex(*alpha), truncation),
                    _ => Err(MazerError::invalid("coherent field needs exactly one of `mean` or `alpha`")),
                },
                FieldSpec::Squeezed { alpha, r, theta } => {
                    field::squeezed_coherent(complex(*alpha), *r, *theta, truncation)
                }
                FieldSpec::Custom { file } => read_distribution(&resolve(base, file)),
                FieldSpec::Trapping { .. } => unreachable!("handled separately"),
            }
        };

        let initial = match (&self.field, &self.atom) {
            (FieldSpec::Trapping { gamma, sign }, _) => {
                let state = TrappingState::new(complex(*gamma), parse_sign(sign)?, self.m)?;
                InitialState::Joint(field::trapping_state_coordinates(&state, truncation)?)
            }
            (spec, None | Some(AtomSpec::Excited)) => InitialState::Excited(distribution(spec)?),
            (spec, Some(AtomSpec::Ground)) => InitialState::Ground(distribution(spec)?),
            (spec, Some(AtomSpec::Superposition { c_a, c_b })) => {
                let field = distribution(spec)?.normalized_amplitudes();
                let coords =
                    DressedStateCoordinates::from_product_state(complex(*c_a), complex(*c_b), &field, self.m)?;
                InitialState::Joint(coords.truncated(truncation)?)
            }
        };

        let method = match self.solver.unwrap_or(SolverSpec::Auto) {
            SolverSpec::Auto => SolverMethod::Auto,
            SolverSpec::Numeric => SolverMethod::Numeric,
        };

        let config = SweepConfig {
            m: self.m,
            profile,
            spectrum,
            grid: self.kl_grid.points(),
            initial,
            tol,
            method,
            output: self.output.as_ref().map(|p| resolve(base, p)),
        };
        config.validate()?;
        Ok(config)
    }
}
