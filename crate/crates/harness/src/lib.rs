//! Seeded Monte Carlo experiments over correlated random intersection graph
//! pairs: single trials, parameter sweeps, phase grids, and their output.

pub mod output;
pub mod sweep;
pub mod trial;

pub use output::{csv_string, emit_plot_data, write_csv, PlotMetric, CSV_HEADER};
pub use sweep::{phase_diagram, run_sweep, Axis, PhaseCell, SweepSpec};
pub use trial::{run_trial, Method, SwapCounting, TrialRecord, TrialSpec};
