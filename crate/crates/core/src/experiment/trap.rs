//! Perfect-trapping verification over a grid of momenta and lengths.

use std::path::Path;

use serde::Deserialize;

use super::config::{build_profile, check_tolerance, GridSpec};
use super::sweep::solve_channels;
use crate::dressed::{evaluate_interaction, DressedStateCoordinates};
use crate::error::{MazerError, Result};
use crate::field::{trapping_state_coordinates, TrappingState, DEFAULT_TRUNCATION};
use crate::par::Execution;
use crate::profile::ModeProfile;
use crate::scattering::SolverMethod;

/// |δσ_aa| and every |δP_n| must stay below this.
pub const TRAP_THRESHOLD: f64 = 1e-10;

/// Grid and solver settings for `mazer trap`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    pub k_over_kappa: Vec<f64>,
    #[serde(alias = "kL_grid")]
    pub kl_grid: GridSpec,
    #[serde(default = "default_tolerance")]
    pub tol: f64,
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    #[serde(default)]
    pub sigma_ratio: Option<f64>,
}

fn default_tolerance() -> f64 {
    super::config::DEFAULT_TOLERANCE
}

fn default_truncation() -> f64 {
    DEFAULT_TRUNCATION
}

impl TrapConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| MazerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: TrapConfig = serde_json::from_str(&text).map_err(|e| MazerError::Parse {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        config.kl_grid.validate()?;
        Ok(config)
    }

    pub fn profile(&self, kind: &str) -> Result<ModeProfile> {
        build_profile(kind, self.sigma_ratio, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapReport {
    pub state: TrappingState,
    pub max_delta_sigma_aa: f64,
    pub max_delta_p: f64,
    pub min_reflection: f64,
    pub max_reflection: f64,
    /// Grid points evaluated (momenta × lengths).
    pub points: usize,
}

impl TrapReport {
    pub fn passed(&self) -> bool {
        self.max_delta_sigma_aa <= TRAP_THRESHOLD && self.max_delta_p <= TRAP_THRESHOLD
    }
}

/// Worst-case figures for one state at one (k, κL).
#[derive(Debug, Clone, Copy)]
struct Sample {
    delta_sigma: f64,
    delta_p: f64,
    reflection: f64,
}

pub fn verify_trapping(
    state: &TrappingState,
    profile: &ModeProfile,
    momenta: &[f64],
    grid: &[f64],
    tol: f64,
    truncation: f64,
    execution: Execution,
) -> Result<TrapReport> {
    let reports = verify_trapping_states(std::slice::from_ref(state), profile, momenta, grid, tol, truncation, execution)?;
    Ok(reports[0])
}

/// Several states with the same photon order; channels are solved once per
/// (k, κL) and shared by every state.
pub fn verify_trapping_states(
    states: &[TrappingState],
    profile: &ModeProfile,
    momenta: &[f64],
    grid: &[f64],
    tol: f64,
    truncation: f64,
    execution: Execution,
) -> Result<Vec<TrapReport>> {
    check_tolerance(tol)?;
    let m = match states.first() {
        Some(s) => s.m,
        None => return Ok(Vec::new()),
    };
    if states.iter().any(|s| s.m != m) {
        return Err(MazerError::invalid("trapping states must share the photon order m"));
    }
    if momenta.is_empty() || grid.is_empty() {
        return Err(MazerError::invalid("trapping check needs at least one momentum and one length"));
    }
    let coords: Vec<DressedStateCoordinates> = states
        .iter()
        .map(|s| trapping_state_coordinates(s, truncation))
        .collect::<Result<_>>()?;
    let count = coords.iter().map(DressedStateCoordinates::sector_count).max().unwrap_or(0);

    let tasks: Vec<(f64, f64)> = momenta
        .iter()
        .flat_map(|&k| grid.iter().map(move |&kl| (k, kl)))
        .collect();
    let samples = execution.try_map(&tasks, |&(k, kl)| {
        let profile = profile.with_length(kl)?;
        let pairs = solve_channels(&profile, m, k, count, tol, SolverMethod::Auto)?;
        coords
            .iter()
            .map(|c| {
                let out = evaluate_interaction(c, &pairs[..c.sector_count()])?;
                Ok(Sample {
                    delta_sigma: out.delta_sigma_aa.abs(),
                    delta_p: out.delta_p.iter().fold(0.0, |a: f64, d| a.max(d.abs())),
                    reflection: out.reflection,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    Ok(states
        .iter()
        .enumerate()
        .map(|(i, state)| {
            let mut report = TrapReport {
                state: *state,
                max_delta_sigma_aa: 0.0,
                max_delta_p: 0.0,
                min_reflection: f64::INFINITY,
                max_reflection: 0.0,
                points: tasks.len(),
            };
            for sample in samples.iter().map(|s| s[i]) {
                report.max_delta_sigma_aa = report.max_delta_sigma_aa.max(sample.delta_sigma);
                report.max_delta_p = report.max_delta_p.max(sample.delta_p);
                report.min_reflection = report.min_reflection.min(sample.reflection);
                report.max_reflection = report.max_reflection.max(sample.reflection);
            }
            report
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::Branch;
    use num_complex::Complex64;

    #[test]
    fn vacuum_trap_passes_trivially() {
        let p = ModeProfile::mesa(1.0).unwrap();
        for sign in [Branch::Plus, Branch::Minus] {
            let s = TrappingState::new(Complex64::new(0.0, 0.0), sign, 1).unwrap();
            let r = verify_trapping(&s, &p, &[0.1], &[0.0, 3.0], 1e-8, 1e-10, Execution::Sequential).unwrap();
            assert!(r.passed());
            assert_eq!(r.max_reflection, 0.0);
        }
    }

    #[test]
    fn mixed_orders_rejected() {
        let p = ModeProfile::mesa(1.0).unwrap();
        let a = TrappingState::new(Complex64::new(0.3, 0.0), Branch::Plus, 1).unwrap();
        let b = TrappingState::new(Complex64::new(0.3, 0.0), Branch::Plus, 2).unwrap();
        assert!(verify_trapping_states(&[a, b], &p, &[0.1], &[1.0], 1e-8, 1e-10, Execution::Sequential).is_err());
    }
}
