//! Presets for the four published figures.
//!
//! Figs. 1, 2 and 4 plot the emission probability of an excited atom in a
//! coherent field (n̄ = 10, k/κ = 0.1) against κL for the mesa, sech² and
//! Gaussian profiles, one panel per photon order m = 1, 2, 3. Fig. 3 plots
//! the single-channel P_em(n) against κ_nL at k/κ_n = 0.1 for sech² (a) and
//! Gaussian (b); since a channel depends only on k/κ_n and κ_nL it is run as
//! the n = 0, m = 1 channel, whose coupling is exactly κ.

use std::path::{Path, PathBuf};

use super::config::{GridSpec, InitialState, SweepConfig, DEFAULT_TOLERANCE};
use super::csv::{write_csv, ResultRow};
use super::sweep::run_sweep_with;
use crate::dressed::MomentumSpectrum;
use crate::error::{MazerError, Result};
use crate::field::{self, DEFAULT_TRUNCATION};
use crate::par::Execution;
use crate::profile::{ModeProfile, DEFAULT_SIGMA_RATIO};
use crate::scattering::SolverMethod;

pub const DEFAULT_POINTS: usize = 2001;
pub const FIGURE_MEAN_PHOTONS: f64 = 10.0;
pub const FIGURE_MOMENTUM: f64 = 0.1;
pub const FIGURE_LENGTH: f64 = 20.0;

/// One panel: the file stem (`fig2b`) and its sweep.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub config: SweepConfig,
}

fn panel(figure: u32, index: usize, m: u32, profile: ModeProfile, initial: InitialState, points: usize) -> Result<Panel> {
    let grid = GridSpec {
        start: 0.0,
        stop: FIGURE_LENGTH,
        count: points,
    };
    grid.validate()?;
    let letter = (b'a' + index as u8) as char;
    Ok(Panel {
        name: format!("fig{figure}{letter}"),
        config: SweepConfig {
            m,
            profile,
            spectrum: MomentumSpectrum::monochromatic(FIGURE_MOMENTUM)?,
            grid: grid.points(),
            initial,
            tol: DEFAULT_TOLERANCE,
            method: SolverMethod::Auto,
            output: None,
        },
    })
}

/// Panels of figure 1–4 with `points` κL samples each.
pub fn figure_panels(figure: u32, points: usize) -> Result<Vec<Panel>> {
    let coherent = || -> Result<InitialState> {
        Ok(InitialState::Excited(field::coherent(FIGURE_MEAN_PHOTONS, DEFAULT_TRUNCATION)?))
    };
    let per_m = |profile: ModeProfile| -> Result<Vec<Panel>> {
        (1..=3)
            .enumerate()
            .map(|(i, m)| panel(figure, i, m, profile.clone(), coherent()?, points))
            .collect()
    };
    match figure {
        1 => per_m(ModeProfile::mesa(1.0)?),
        2 => per_m(ModeProfile::sech2(1.0)?),
        3 => [ModeProfile::sech2(1.0)?, ModeProfile::gaussian(1.0, DEFAULT_SIGMA_RATIO)?]
            .into_iter()
            .enumerate()
            .map(|(i, profile)| panel(3, i, 1, profile, InitialState::Excited(field::fock(0)), points))
            .collect(),
        4 => per_m(ModeProfile::gaussian(1.0, DEFAULT_SIGMA_RATIO)?),
        other => Err(MazerError::invalid(format!("figures are numbered 1 to 4, got {other}"))),
    }
}

/// Run every panel of a figure and write `<out>/<panel>.csv`. Nothing is
/// written unless all panels succeed.
pub fn write_figure(figure: u32, out: &Path, points: usize, execution: Execution) -> Result<Vec<PathBuf>> {
    let panels = figure_panels(figure, points)?;
    let results: Vec<Vec<ResultRow>> = panels
        .iter()
        .map(|p| run_sweep_with(&p.config, execution))
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(out).map_err(|source| MazerError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    panels
        .iter()
        .zip(&results)
        .map(|(p, rows)| {
            let path = out.join(format!("{}.csv", p.name));
            write_csv(rows, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captions() {
        for fig in [1, 2, 4] {
            let panels = figure_panels(fig, 11).unwrap();
            assert_eq!(panels.len(), 3);
            for (i, p) in panels.iter().enumerate() {
                assert_eq!(p.config.m, i as u32 + 1);
                assert_eq!(p.config.spectrum.points(), &[(0.1, 1.0)]);
                assert_eq!(*p.config.grid.last().unwrap(), 20.0);
                match &p.config.initial {
                    InitialState::Excited(d) => assert!((d.mean() - 10.0).abs() < 1e-8),
                    other => panic!("{other:?}"),
                }
            }
        }
        let fig4 = figure_panels(4, 11).unwrap();
        assert_eq!(fig4[0].config.profile.sigma_ratio(), (2.0 / std::f64::consts::PI).sqrt());
        let fig3 = figure_panels(3, 11).unwrap();
        assert_eq!(fig3.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["fig3a", "fig3b"]);
        assert!(figure_panels(5, 11).is_err());
        assert!(figure_panels(1, 1).is_err());
    }
}
