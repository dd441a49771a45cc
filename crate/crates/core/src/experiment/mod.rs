//! Batch driver: configurations, κL sweeps, trapping checks, figure presets
//! and CSV output.

pub mod config;
pub mod csv;
pub mod figures;
pub mod sweep;
pub mod trap;

pub use config::{ConfigFile, InitialState, SweepConfig};
pub use csv::{emit_csv, parse_csv, read_csv, write_csv, ResultRow};
pub use figures::{figure_panels, write_figure, DEFAULT_POINTS};
pub use sweep::{run_sweep, run_sweep_with};
pub use trap::{verify_trapping, verify_trapping_states, TrapConfig, TrapReport, TRAP_THRESHOLD};
