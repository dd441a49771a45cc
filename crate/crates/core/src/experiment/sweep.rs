use super::config::{InitialState, SweepConfig};
use super::csv::ResultRow;
use crate::dressed::{evaluate_interaction, wavepacket_average, Superpose};
use crate::error::Result;
use crate::par::Execution;
use crate::profile::ModeProfile;
use crate::scattering::{coupling_strength, emission_probability_fock, solve_channel_pairs, ChannelPair, SolverMethod};

/// Couplings κ_n/κ for channels n = 0…count−1.
pub fn couplings(m: u32, count: usize) -> Vec<f64> {
    (0..count as u64).map(|n| coupling_strength(m, n)).collect()
}

/// Both branches of channels 0…count−1 at one momentum and profile.
pub fn solve_channels(
    profile: &ModeProfile,
    m: u32,
    momentum: f64,
    count: usize,
    tol: f64,
    method: SolverMethod,
) -> Result<Vec<ChannelPair>> {
    solve_channel_pairs(profile, momentum, &couplings(m, count), tol, method)
}

/// Observables of one grid point at one momentum.
#[derive(Debug, Clone, Copy, Default)]
struct Point {
    value: f64,
    reflection: f64,
    transmission: f64,
    flux_defect: f64,
}

impl Superpose for Point {
    fn scaled(&self, weight: f64) -> Self {
        Point {
            value: self.value * weight,
            reflection: self.reflection * weight,
            transmission: self.transmission * weight,
            flux_defect: self.flux_defect,
        }
    }

    fn add_scaled(&mut self, other: &Self, weight: f64) {
        self.value += other.value * weight;
        self.reflection += other.reflection * weight;
        self.transmission += other.transmission * weight;
        self.flux_defect = self.flux_defect.max(other.flux_defect);
    }
}

/// Number of channels the initial state occupies.
fn channel_count(initial: &InitialState, m: u32) -> usize {
    match initial {
        InitialState::Excited(d) => d.probabilities().len(),
        InitialState::Ground(d) => d.probabilities().len().saturating_sub(m as usize),
        InitialState::Joint(coords) => coords.sector_count(),
    }
}

/// Σ_n w_n · (P_em(n), R_n, T_n) with the Fock-state branch split ½/½.
fn fock_mixture(weights: &[f64], pairs: &[ChannelPair]) -> Result<Point> {
    let mut point = Point::default();
    for (&w, pair) in weights.iter().zip(pairs) {
        point.value += w * emission_probability_fock(pair.kernel())?;
        point.reflection += w * 0.5 * (pair.plus.reflectance() + pair.minus.reflectance());
        point.transmission += w * 0.5 * (pair.plus.transmittance() + pair.minus.transmittance());
        point.flux_defect = point.flux_defect.max(pair.flux_defect());
    }
    Ok(point)
}

fn evaluate_point(config: &SweepConfig, profile: &ModeProfile, momentum: f64) -> Result<Point> {
    let count = channel_count(&config.initial, config.m);
    let pairs = solve_channels(profile, config.m, momentum, count, config.tol, config.method)?;
    match &config.initial {
        InitialState::Excited(d) => fock_mixture(&d.normalized_probabilities(), &pairs),
        InitialState::Ground(d) => {
            let p = d.normalized_probabilities();
            let m = config.m as usize;
            let mut point = fock_mixture(&p[m.min(p.len())..], &pairs)?;
            // |b,n⟩ with n < m cannot absorb and is transmitted untouched
            point.transmission += p.iter().take(m).sum::<f64>();
            Ok(point)
        }
        InitialState::Joint(coords) => {
            let out = evaluate_interaction(coords, &pairs)?;
            Ok(Point {
                value: out.delta_sigma_aa,
                reflection: out.reflection,
                transmission: out.transmission,
                flux_defect: out.flux_defect,
            })
        }
    }
}

/// One result row per κL grid point, in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ResultRow>> {
    run_sweep_with(config, Execution::default())
}

pub fn run_sweep_with(config: &SweepConfig, execution: Execution) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n_max = channel_count(&config.initial, config.m).saturating_sub(1);
    execution.try_map(&config.grid, |&kl| {
        let profile = config.profile.with_length(kl)?;
        let point = wavepacket_average(&config.spectrum, |k| evaluate_point(config, &profile, k))?;
        Ok(ResultRow {
            kl,
            value: point.value,
            reflection: point.reflection,
            transmission: point.transmission,
            n_max,
            flux_defect: point.flux_defect,
        })
    })
}
