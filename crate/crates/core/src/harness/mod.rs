//! Parameter scans and the named experiments.

mod experiments;
mod scan;

pub use experiments::{mobius_phase_parameters, run_experiment, Check, ExperimentOutcome, EXPERIMENTS};
pub use scan::{scan_alpha, scan_beta, SampleStatus, ScanAxis, ScanConfig, ScanReport, ScanSample};
