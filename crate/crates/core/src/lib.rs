//! Scattering of ultracold two-level atoms through an m-photon micromaser
//! cavity ("mazer").
//!
//! Every photon-number channel reduces to two 1D scattering problems on the
//! dressed potentials ±κ_n² u(z). From their amplitudes the crate builds the
//! observables of an arbitrary pure atom–field initial state: emission and
//! absorption probabilities, atomic and photon-number population changes,
//! and reflection/transmission probabilities.
//!
//! All quantities are dimensionless with κ = 1: positions are κz, momenta
//! k/κ, interaction lengths κL.

pub mod dressed;
pub mod error;
pub mod experiment;
pub mod field;
pub mod par;
pub mod profile;
pub mod scattering;

pub use error::{MazerError, Result};
