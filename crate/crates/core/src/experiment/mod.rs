//! Experiment runner: instances, single runs, the comparison suite, and
//! plot-ready data files.

mod instance;
mod plotdata;
mod run;

pub use instance::{build_instance, ExperimentError, Instance};
pub use plotdata::{write_savings_decomposition, write_supply_heatmaps};
pub use run::{
    custom_definition, run_experiment, run_suite, standard_suite, ExperimentDefinition,
    ExperimentOutcome, SuiteOutcome,
};
