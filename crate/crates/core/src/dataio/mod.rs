//! Data ingestion, configuration, and result serialization.

mod config;
mod days;
mod results;
mod timeseries;

pub use config::{
    load_config, load_config_with_overrides, parse_config, BackupConfig, Config, GridConfig,
    HorizonConfig, MarketConfig, PathsConfig, SheddingConfig, SolverConfig, StorageConfig,
};
pub use days::{select_representative_days, DaySelection, DayStrategy};
pub use results::{
    read_results, write_results, ExperimentMetrics, ResourceTriple, ResultsFile, ScenarioEnergy,
    TABLE_ROWS,
};
pub use timeseries::{
    load_peak_projection, load_timeseries, read_year_value, scale_load_by_peak, ColumnSpec,
    DataError, PeakProjection, RawSeries,
};
