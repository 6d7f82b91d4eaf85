//! Simulation scenarios and Monte Carlo experiments.

mod config;
mod dist;
mod experiment;
mod scenario;

pub use config::{ExperimentConfig, ExperimentKind, ExperimentResult};
pub use dist::{Distribution, MixtureComponent, SurvivalCurve};
pub use experiment::{
    fiducial_two_sample_p, interp_grid_matrix, run_band_experiment, run_ci_experiment, run_mse_experiment,
    run_one_sample_experiment, run_power_experiment, run_quantile_experiment, CiCell, CiResult, CoverageResult,
    MethodRow, MseResult, PowerResult,
};
pub use scenario::{
    fig2, preset, sample_group, sample_scenario, table1, table2, table3, table4, table5, table6, table7, GroupSpec,
    ScenarioSpec,
};
