//! Experiment orchestration: deterministic configs, rho sweeps with slope
//! verdicts, and CSV outputs with metadata sidecars.

pub mod config;
pub mod output;
pub mod sweeps;

pub use config::ExperimentConfig;
pub use output::CsvTable;
pub use sweeps::{
    predicted_verdict, run_inequality_suite, run_region_suite, run_threshold_scan,
    run_weak_convergence, select_regions, slope_verdict, InequalitySuiteReport, RegionSuiteReport,
    ScanReport, SweepCell, Verdict, WeakConvReport,
};
