//! Backward integration of `φ'' = (±κ_n² u(z) − k²) φ` for arbitrary profiles.
//!
//! The solution is started on the transmission side as a pure outgoing wave
//! `e^{ik(z−κL)}` and propagated to the left edge of the profile support, where
//! it is split into `A e^{ikz} + B e^{−ikz}`. Then `t = 1/A` and `r = B/A`.
//! Under a barrier the backward direction follows the growing solution, so
//! relative accuracy is kept; the state is rescaled whenever it exceeds
//! [`RENORM_THRESHOLD`] and the scale is carried in a log ledger.
//!
//! Each step applies the fourth-order Magnus propagator built from the
//! profile at the step's two ends and midpoint. For the 2×2 system
//! `(φ, φ')' = [[0, 1], [a(z), 0]] (φ, φ')` with `a = V − k²` the propagator is
//! real with unit determinant, so flux is conserved to rounding, and it is
//! exact wherever the potential is constant. Accuracy is controlled by step
//! doubling (Richardson): the step is halved until the amplitudes computed
//! with steps `h` and `2h` agree to within `15·tol`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{tag_channel, Branch, ChannelPair, ChannelSpec, ScatteringAmplitudes};
use crate::error::{MazerError, Result};
use crate::profile::ModeProfile;

/// Tolerances accepted by the solver (exclusive bounds).
pub const MIN_TOLERANCE: f64 = 1e-14;
pub const MAX_TOLERANCE: f64 = 1e-4;

const RENORM_THRESHOLD: f64 = 1e150;
const POINTS_PER_WAVELENGTH: f64 = 20.0;
/// The step never exceeds support / MIN_STEPS.
const MIN_STEPS: usize = 10_000;
/// Step counts are multiples of this so coarser strides share nodes.
const STRIDE_ALIGN: usize = 64;
/// Steps whose propagators are built together before being applied; the
/// state is renormalised once per chunk.
const CHUNK: usize = 64;
/// Below this |x| the 7-term series is exact to ~1e-18.
const SERIES_LIMIT: f64 = 0.1;
const MAX_STRIDE: usize = STRIDE_ALIGN / 2;
const MAX_STEPS: usize = 1 << 22;

/// Solve a single channel numerically.
pub fn solve_numeric(spec: &ChannelSpec<'_>, tol: f64) -> Result<ScatteringAmplitudes> {
    spec.validate()?;
    NumericSolver::new(spec.profile, spec.momentum, tol)?.solve(spec.coupling, spec.branch)
}

/// Numerical solver for every channel at one momentum and profile.
#[derive(Debug, Clone)]
pub struct NumericSolver<'a> {
    profile: &'a ModeProfile,
    momentum: f64,
    tol: f64,
}

impl<'a> NumericSolver<'a> {
    pub fn new(profile: &'a ModeProfile, momentum: f64, tol: f64) -> Result<Self> {
        if !(tol > MIN_TOLERANCE && tol < MAX_TOLERANCE) {
            return Err(MazerError::invalid(format!(
                "solver tolerance must lie in ({MIN_TOLERANCE:e}, {MAX_TOLERANCE:e}), got {tol:e}"
            )));
        }
        if !(momentum.is_finite() && momentum > 0.0) {
            return Err(MazerError::invalid(format!(
                "momentum must be finite and positive, got {momentum}"
            )));
        }
        Ok(NumericSolver {
            profile,
            momentum,
            tol,
        })
    }

    pub fn solve(&self, coupling: f64, branch: Branch) -> Result<ScatteringAmplitudes> {
        if self.trivial(coupling) {
            return Ok(ScatteringAmplitudes::free());
        }
        let mut grid = self.grid_for(coupling)?;
        Ok(self.solve_on(&mut grid, coupling, branch, MAX_STRIDE)?.0)
    }

    /// Both branches for every coupling, sharing one node grid sized for the
    /// strongest coupling.
    pub fn solve_pairs(&self, couplings: &[f64]) -> Result<Vec<ChannelPair>> {
        for &c in couplings {
            if !(c.is_finite() && c >= 0.0) {
                return Err(MazerError::invalid(format!("coupling must be finite and non-negative, got {c}")));
            }
        }
        let strongest = couplings.iter().copied().fold(0.0, f64::max);
        if self.trivial(strongest) {
            return Ok(couplings.iter().map(|&c| ChannelPair::free(c)).collect());
        }
        // Strongest first: a grid refined for one channel is kept, so weaker
        // channels converge on it at a coarser stride without rebuilding.
        let mut order: Vec<usize> = (0..couplings.len()).collect();
        order.sort_by(|&a, &b| couplings[b].total_cmp(&couplings[a]));
        let mut grid = self.grid_for(strongest)?;
        let mut pairs = vec![None; couplings.len()];
        // Per branch: the stride the last stronger channel converged at and
        // the coupling where that stride was first needed.
        let mut hints = [(strongest, MAX_STRIDE); 2];
        for n in order {
            let c = couplings[n];
            if self.trivial(c) {
                pairs[n] = Some(ChannelPair::free(c));
                continue;
            }
            let mut solve = |branch: Branch, slot: usize| -> Result<ScatteringAmplitudes> {
                let (previous, stride) = hints[slot];
                let start = (stride * coarsening(previous, c)).min(MAX_STRIDE);
                let (amps, used) = self.solve_on(&mut grid, c, branch, start)?;
                if used != stride {
                    hints[slot] = (c, used);
                }
                Ok(amps)
            };
            let pair = solve(Branch::Minus, 0)
                .and_then(|minus| Ok(ChannelPair { coupling: c, minus, plus: solve(Branch::Plus, 1)? }))
                .map_err(|e| tag_channel(n, e))?;
            pairs[n] = Some(pair);
        }
        Ok(pairs.into_iter().flatten().collect())
    }

    fn trivial(&self, coupling: f64) -> bool {
        coupling == 0.0 || self.profile.is_null()
    }

    /// Support cut-off: the truncated tail perturbs r by roughly
    /// κ_n² ε κL / 4k, kept an order of magnitude below tol.
    fn truncation_threshold(&self, coupling: f64) -> f64 {
        let scale = coupling * coupling * self.profile.length().max(1.0);
        (0.1 * self.tol * self.momentum / scale).clamp(1e-300, 1e-12)
    }

    fn domain(&self, coupling: f64) -> Result<(f64, f64)> {
        self.profile.support_bounds(self.truncation_threshold(coupling))
    }

    /// Step count needed by the step ceiling for `coupling` on a domain.
    fn required_steps(&self, coupling: f64, width: f64) -> usize {
        let k = self.momentum;
        let k_local = (k * k + coupling * coupling * self.profile.peak()).sqrt();
        let h_max = (2.0 * PI / (POINTS_PER_WAVELENGTH * k_local)).min(width / MIN_STEPS as f64);
        (width / h_max).ceil() as usize
    }

    fn grid_for(&self, coupling: f64) -> Result<Grid> {
        let (z_min, z_max) = self.domain(coupling)?;
        let steps = self.required_steps(coupling, z_max - z_min);
        if steps > MAX_STEPS {
            return Err(self.failure(
                coupling,
                format!("step-size underflow: {steps} steps exceed the limit of {MAX_STEPS}"),
            ));
        }
        Ok(Grid::new(self.profile, z_min, z_max, align(steps)))
    }

    /// Converges on `grid`, replacing it with a finer one if stride 1 is not
    /// enough.
    /// Returns the amplitudes and the stride they converged at.
    fn solve_on(&self, grid: &mut Grid, coupling: f64, branch: Branch, start: usize) -> Result<(ScatteringAmplitudes, usize)> {
        let scale = branch.sign() * coupling * coupling;
        let needed = self.required_steps(coupling, grid.width());
        let mut stride = start.clamp(1, MAX_STRIDE);
        while stride > 1 && grid.steps / stride < needed {
            stride /= 2;
        }

        let mut coarse = self.integrate(grid, 2 * stride, scale, coupling)?;
        let mut previous_estimate = f64::INFINITY;
        let mut stalled = 0;
        loop {
            let fine = self.integrate(grid, stride, scale, coupling)?;
            let estimate = (fine.r - coarse.r).norm().max((fine.t - coarse.t).norm()) / 15.0;
            if estimate <= self.tol && fine.flux_defect <= self.tol {
                return Ok((fine, stride));
            }
            if estimate > 0.5 * previous_estimate {
                stalled += 1;
            } else {
                stalled = 0;
            }
            if stalled >= 2 {
                return Err(self.failure(
                    coupling,
                    format!("step refinement stalled at error estimate {estimate:.3e} (tolerance {:.1e})", self.tol),
                ));
            }
            previous_estimate = estimate;
            coarse = fine;
            if stride > 1 {
                stride /= 2;
                continue;
            }
            let steps = 2 * grid.steps;
            if steps > MAX_STEPS {
                return Err(self.failure(
                    coupling,
                    format!("step-size underflow: {steps} steps exceed the limit of {MAX_STEPS}"),
                ));
            }
            *grid = Grid::new(self.profile, grid.z_min, grid.z_max, steps);
            stride = 1;
            // The refined grid at stride 2 reproduces the old stride-1 pass,
            // so `coarse` already holds it.
        }
    }

    fn integrate(&self, grid: &Grid, stride: usize, scale: f64, coupling: f64) -> Result<ScatteringAmplitudes> {
        let k = self.momentum;
        let k2 = k * k;
        let steps = grid.steps / stride;
        let h = grid.width() / steps as f64;
        let dz = -h;
        let dz2 = dz * dz;
        let nodes = &grid.nodes;

        let mut y0 = Complex64::from_polar(1.0, k * (grid.z_max - self.profile.length()));
        let mut y1 = Complex64::new(0.0, k) * y0;
        let mut log_scale = 0.0;

        // Building the propagators has no loop-carried dependency, so it runs
        // over a chunk first; applying them is then a short serial chain.
        let mut m11 = [0.0; CHUNK];
        let mut m12 = [0.0; CHUNK];
        let mut m21 = [0.0; CHUNK];
        let mut m22 = [0.0; CHUNK];
        let mut end = steps;
        while end > 0 {
            let start = end.saturating_sub(CHUNK);
            let len = end - start;
            let u = &nodes[2 * stride * start..=2 * stride * end];
            let coefficients = |i: usize| {
                let a_start = scale * u[2 * stride * (i + 1)] - k2;
                let a_mid = scale * u[2 * stride * i + stride] - k2;
                let a_end = scale * u[2 * stride * i] - k2;
                let a_bar = (a_start + 4.0 * a_mid + a_end) / 6.0;
                let w = dz2 * (a_end - a_start) / 12.0;
                (a_bar, w, w * w + dz2 * a_bar)
            };
            let mut widest: f64 = 0.0;
            for i in 0..len {
                let (a_bar, w, x) = coefficients(i);
                widest = widest.max(x.abs());
                let (c, s) = series(x);
                m11[i] = c - s * w;
                m12[i] = s * dz;
                m21[i] = s * dz * a_bar;
                m22[i] = c + s * w;
            }
            if widest >= SERIES_LIMIT {
                for i in 0..len {
                    let (a_bar, w, x) = coefficients(i);
                    let (c, s) = cosh_sinhc(x);
                    m11[i] = c - s * w;
                    m12[i] = s * dz;
                    m21[i] = s * dz * a_bar;
                    m22[i] = c + s * w;
                }
            }
            for i in (0..len).rev() {
                let next0 = y0 * m11[i] + y1 * m12[i];
                let next1 = y0 * m21[i] + y1 * m22[i];
                y0 = next0;
                y1 = next1;
            }
            let size = y0.re.abs().max(y0.im.abs()).max(y1.re.abs()).max(y1.im.abs());
            if size > RENORM_THRESHOLD {
                y0 /= size;
                y1 /= size;
                log_scale += size.ln();
            }
            end = start;
        }

        let ik = Complex64::new(0.0, k);
        let left = Complex64::from_polar(1.0, -k * grid.z_min);
        let incoming = (y0 + y1 / ik) * 0.5 * left;
        let outgoing = (y0 - y1 / ik) * 0.5 * left.conj();
        let t = Complex64::from_polar((-log_scale).exp(), 0.0) / incoming;
        let r = outgoing / incoming;
        if !(r.re.is_finite() && r.im.is_finite() && t.re.is_finite() && t.im.is_finite()) || !log_scale.is_finite() {
            return Err(self.failure(coupling, "renormalization ledger overflow".to_string()));
        }
        Ok(ScatteringAmplitudes::new(r, t))
    }

    fn failure(&self, coupling: f64, reason: String) -> MazerError {
        MazerError::Solver {
            coupling,
            coupling_length: coupling * self.profile.length(),
            reason,
        }
    }
}

/// Profile samples at step ends and midpoints.
#[derive(Debug)]
struct Grid {
    z_min: f64,
    z_max: f64,
    steps: usize,
    nodes: Vec<f64>,
}

impl Grid {
    fn new(profile: &ModeProfile, z_min: f64, z_max: f64, steps: usize) -> Self {
        Grid {
            z_min,
            z_max,
            steps,
            nodes: profile.sample_nodes(z_min, z_max, steps),
        }
    }

    fn width(&self) -> f64 {
        self.z_max - self.z_min
    }
}

/// Power-of-two stride factor a channel `ratio` times weaker can afford.
fn coarsening(stronger: f64, coupling: f64) -> usize {
    let ratio = stronger / coupling;
    if ratio >= 2.0 {
        1 << (ratio.log2().floor() as u32).min(MAX_STRIDE.trailing_zeros())
    } else {
        1
    }
}

fn align(steps: usize) -> usize {
    steps.max(STRIDE_ALIGN).div_ceil(STRIDE_ALIGN) * STRIDE_ALIGN
}

/// `(cosh √x, sinh √x / √x)` for either sign of `x`.
#[inline]
fn cosh_sinhc(x: f64) -> (f64, f64) {
    if x.abs() < SERIES_LIMIT {
        series(x)
    } else if x > 0.0 {
        let r = x.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-x).sqrt();
        (r.cos(), r.sin() / r)
    }
}

/// Taylor series of [`cosh_sinhc`] in `x`, valid for |x| < [`SERIES_LIMIT`].
#[inline(always)]
fn series(x: f64) -> (f64, f64) {
    let c = 1.0
        + x * (1.0 / 2.0
            + x * (1.0 / 24.0
                + x * (1.0 / 720.0 + x * (1.0 / 40_320.0 + x * (1.0 / 3_628_800.0 + x * (1.0 / 479_001_600.0))))));
    let s = 1.0
        + x * (1.0 / 6.0
            + x * (1.0 / 120.0
                + x * (1.0 / 5_040.0 + x * (1.0 / 362_880.0 + x * (1.0 / 39_916_800.0 + x * (1.0 / 6_227_020_800.0))))));
    (c, s)
}
