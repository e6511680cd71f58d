//! Configuration-driven sweeps.
//!
//! An [`ExperimentConfig`] names a channel, an input law, a sweep over one
//! channel parameter, seeds and estimators. [`run_experiment`] evaluates
//! every (sweep value, seed) pair on a worker pool, sharing one trajectory
//! between all estimators of a pair, and writes a sorted CSV plus an
//! optional SVG plot.

mod config;
mod run;
mod svg;

pub use config::{
    AuxiliarySpec, ChannelKind, ChannelSpec, EstimatorKind, ExperimentConfig, MatrixSpec, OutputSpec, SweepPoint,
    SweepSpec,
};
pub use run::{
    bound_trajectory, collect_rows, oracle_check, rows_to_csv, run_experiment, sample_first, OracleReport, ResultRow,
    RowValues, RunOptions, RunOutput, CSV_HEADER,
};
pub use svg::render_svg;
