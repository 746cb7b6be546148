//! Assemble a solvable instance from configuration and CSV inputs.

use crate::dataio::{
    load_peak_projection, load_timeseries, read_year_value, scale_load_by_peak,
    select_representative_days, ColumnSpec, Config, DataError, DaySelection, DayStrategy,
};
use crate::model::{
    DemandKind, ExogenousSeries, Horizon, PerDemand, PerResource, ResourceKind, ResourceSpec,
    ScarcityEvent, Series3, StorageSpec,
};
use crate::peakshave::{storage_upper_bound, SizingBound};
use crate::solver::SolverOptions;
use chrono::Datelike;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("model error: {0}")]
    Model(#[from] crate::model::ModelError),
    #[error("formulation error: {0}")]
    Formulation(#[from] crate::formulation::FormulationError),
    #[error("solver error: {0}")]
    Solver(#[from] crate::solver::SolverError),
    #[error("sizing error: {0}")]
    Peakshave(#[from] crate::peakshave::PeakshaveError),
    #[error("config is missing the {0} data path")]
    MissingPath(&'static str),
    #[error("experiment '{name}' has an infeasible model: {detail}")]
    Infeasible { name: String, detail: String },
    #[error("experiment '{name}' hit the solver limit with no feasible point")]
    NoIncumbent { name: String },
    #[error("experiment '{name}': {count} constraint violations after solve; first: {first}")]
    ValidationFailed {
        name: String,
        count: usize,
        first: String,
    },
    #[error("scarcity event on {0} cannot be mapped onto the 365-day year")]
    UnmappableEvent(String),
    #[error("requested year index {year} outside horizon of {n} periods")]
    YearOutOfRange { year: usize, n: usize },
    #[error("duplicate experiment name '{0}' in suite")]
    DuplicateExperiment(String),
}

/// A fully assembled planning instance: horizon, specs, exogenous series on
/// the reduced day set, and the sizing bound behind the storage cap.
#[derive(Debug, Clone)]
pub struct Instance {
    pub horizon: Horizon<f64>,
    pub specs: Vec<ResourceSpec<f64>>,
    pub storage: StorageSpec<f64>,
    pub series: ExogenousSeries<f64>,
    pub selection: DaySelection,
    pub start_year: i32,
    pub flatten_bound: SizingBound<f64>,
    pub shedding_allowed: bool,
    pub solver: SolverOptions,
    pub backend: String,
    pub parallel: usize,
    /// Capacity price per period from the price file, $/kW-period, held flat
    /// past the last observed year.
    pub capacity_price_default: Vec<f64>,
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    let p = Path::new(relative);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Day-of-year index into the 365-day calendar used after the leap-day drop.
fn day_index_365(date: chrono::NaiveDate) -> Result<usize, ExperimentError> {
    let ordinal = date.ordinal() as usize; // 1-based
    let leap = date.leap_year();
    if leap && date.month() == 2 && date.day() == 29 {
        return Err(ExperimentError::UnmappableEvent(date.to_string()));
    }
    let shifted = if leap && ordinal > 60 { ordinal - 1 } else { ordinal };
    Ok(shifted - 1)
}

fn preinstalled_matrix(
    units: &[(String, f64, i32)],
    lifetime: usize,
    start_year: i32,
    n_periods: usize,
) -> Vec<Vec<f64>> {
    units
        .iter()
        .map(|&(_, capacity, commission)| {
            (0..n_periods)
                .map(|n| {
                    let year = start_year + n as i32;
                    let live = year >= commission && year < commission + lifetime as i32;
                    if live {
                        capacity
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Read the preinstalled-unit table: `resource,unit,capacity_mw,commission_year`.
fn load_units(path: &Path) -> Result<Vec<(ResourceKind, String, f64, i32)>, ExperimentError> {
    let path_str = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::Csv {
        path: path_str.clone(),
        source: e,
    })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        let kind = match record.get(0).unwrap_or("") {
            "backup" => ResourceKind::Backup,
            "grid" => ResourceKind::Grid,
            "storage" => ResourceKind::Storage,
            other => {
                return Err(DataError::Invalid(format!(
                    "{path_str} line {line}: unknown resource '{other}'"
                ))
                .into())
            }
        };
        let name = record.get(1).unwrap_or("").to_string();
        let parse = |idx: usize, col: &str| -> Result<f64, ExperimentError> {
            let raw = record.get(idx).unwrap_or("");
            raw.trim().parse().map_err(|_| {
                DataError::NonNumeric {
                    path: path_str.clone(),
                    line,
                    column: col.into(),
                    value: raw.into(),
                }
                .into()
            })
        };
        let capacity = parse(2, "capacity_mw")?;
        let commission = parse(3, "commission_year")? as i32;
        out.push((kind, name, capacity, commission));
    }
    Ok(out)
}

/// Read scarcity events (`date,start_hour,end_hour`) and map each onto its
/// representative day in every planning period. A date outside the reduced
/// set lands on the day that stands for it.
fn load_events(
    path: &Path,
    selection: &DaySelection,
    n_periods: usize,
) -> Result<Vec<ScarcityEvent>, ExperimentError> {
    let path_str = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::Csv {
        path: path_str.clone(),
        source: e,
    })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        let date_text = record.get(0).unwrap_or("");
        let date = date_text
            .parse::<chrono::NaiveDate>()
            .map_err(|_| DataError::Invalid(format!("{path_str} line {line}: bad date '{date_text}'")))?;
        let parse = |idx: usize, col: &str| -> Result<usize, ExperimentError> {
            let raw = record.get(idx).unwrap_or("");
            raw.trim().parse().map_err(|_| {
                DataError::NonNumeric {
                    path: path_str.clone(),
                    line,
                    column: col.into(),
                    value: raw.into(),
                }
                .into()
            })
        };
        let k_start = parse(1, "start_hour")?;
        let k_end = parse(2, "end_hour")?;
        if k_start >= k_end || k_end > 24 {
            return Err(DataError::Invalid(format!(
                "{path_str} line {line}: bad hour range {k_start}..{k_end}"
            ))
            .into());
        }
        let day = day_index_365(date)?;
        let slot = selection.map[day];
        for period in 0..n_periods {
            out.push(ScarcityEvent {
                period,
                day: slot,
                k_start,
                k_end,
            });
        }
    }
    Ok(out)
}

/// Build the instance: ingest, scale, reduce days, and assemble specs and
/// series. `base_dir` anchors relative data paths.
pub fn build_instance(config: &Config, base_dir: &Path) -> Result<Instance, ExperimentError> {
    config.validate()?;
    let n_periods = config.horizon.years;
    let start_year = config.horizon.start_year;

    let path_of = |field: &Option<String>, name: &'static str| -> Result<PathBuf, ExperimentError> {
        field
            .as_ref()
            .map(|p| resolve(base_dir, p))
            .ok_or(ExperimentError::MissingPath(name))
    };

    let load_path = path_of(&config.paths.load, "load")?;
    let base_load = load_timeseries(&load_path, &ColumnSpec::value_column("load_mw"), Some(8760))?;
    let price_path = path_of(&config.paths.price, "price")?;
    let base_price = load_timeseries(
        &price_path,
        &ColumnSpec::value_column("price_usd_per_mwh"),
        Some(8760),
    )?;
    let peaks = load_peak_projection(path_of(&config.paths.peaks, "peaks")?)?;

    let scaled = scale_load_by_peak(&base_load, &peaks, start_year, n_periods)?;
    let selection = select_representative_days(&base_load, config.horizon.days, DayStrategy::PeakStratified)?;

    let horizon = Horizon::new(
        n_periods,
        selection.len(),
        config.horizon.hours_per_day,
        config.horizon.dt_h,
        vec![config.horizon.time_normal_h, config.horizon.time_contingency_h],
        selection.weights.clone(),
    )?;
    let hours = config.horizon.hours_per_day;
    if hours != 24 {
        return Err(DataError::Config("hourly inputs require 24 subperiods per day".into()).into());
    }

    let load = Series3::from_fn(n_periods, selection.len(), hours, |n, j, k| {
        scaled.at(n, selection.days[j], k)
    });
    let price_at = |j: usize, k: usize| base_price.values[selection.days[j] * 24 + k];

    let shed_price = if config.shedding.allowed {
        config.shedding.value_per_mwh
    } else {
        0.0
    };
    let supply_price = PerResource::from_fn(|r| {
        Series3::from_fn(n_periods, selection.len(), hours, |_, j, k| match r {
            ResourceKind::Grid => price_at(j, k),
            ResourceKind::Backup => config.backup.supply_cost_per_mwh,
            ResourceKind::Storage => 0.0,
        })
    });
    let demand_price = PerDemand::from_fn(|d| {
        Series3::from_fn(n_periods, selection.len(), hours, |_, j, k| match d {
            DemandKind::Grid => price_at(j, k),
            DemandKind::Load => shed_price,
            DemandKind::Storage => 0.0,
        })
    });

    // Preinstalled units, retired by lifetime.
    let units = load_units(&path_of(&config.paths.units, "units")?)?;
    let units_of = |kind: ResourceKind| -> Vec<(String, f64, i32)> {
        units
            .iter()
            .filter(|(k, ..)| *k == kind)
            .map(|(_, name, cap, year)| (name.clone(), *cap, *year))
            .collect()
    };

    // Capacity prices: observed years, then flat.
    let capacity_price_default: Vec<f64> = match &config.paths.capacity_prices {
        None => vec![0.0; n_periods],
        Some(p) => {
            let rows = read_year_value(resolve(base_dir, p), "price_usd_per_kw_month")?;
            if rows.is_empty() {
                vec![0.0; n_periods]
            } else {
                (0..n_periods)
                    .map(|n| {
                        let year = start_year + n as i32;
                        let monthly = rows
                            .iter()
                            .rev()
                            .find(|&&(y, _)| y <= year)
                            .map(|&(_, v)| v)
                            .unwrap_or(rows[0].1);
                        monthly * 12.0
                    })
                    .collect()
            }
        }
    };

    let storage = StorageSpec {
        eta_charge: config.storage.eta_charge,
        eta_discharge: config.storage.eta_discharge,
        duration: config.storage.duration_h,
        cycle_limit: config.storage.cycle_limit_per_yr,
    };

    // Size the storage cap from the flattening problem over every scaled day.
    let mut profiles = Vec::with_capacity(n_periods * 365);
    for n in 0..n_periods {
        for j in 0..scaled.shape().1 {
            profiles.push((0..hours).map(|k| scaled.at(n, j, k)).collect::<Vec<f64>>());
        }
    }
    let flatten_bound = storage_upper_bound(&profiles, &storage, config.horizon.dt_h)?;
    let storage_cap = config
        .storage
        .max_invest_mw
        .unwrap_or_else(|| flatten_bound.power.ceil());

    let specs = vec![
        ResourceSpec {
            kind: ResourceKind::Backup,
            unit_cost: vec![config.backup.unit_cost_per_kw; n_periods],
            fixed_cost: vec![config.backup.fixed_cost; n_periods],
            min_invest: config.backup.min_invest_mw,
            max_invest: config.backup.max_invest_mw,
            lifetime: config.backup.lifetime_yr,
            preinstalled: preinstalled_matrix(
                &units_of(ResourceKind::Backup),
                config.backup.lifetime_yr,
                start_year,
                n_periods,
            ),
            capacity_price: capacity_price_default.clone(),
        },
        ResourceSpec {
            kind: ResourceKind::Grid,
            unit_cost: vec![config.grid.unit_cost_per_kw; n_periods],
            fixed_cost: vec![config.grid.fixed_cost; n_periods],
            min_invest: config.grid.min_invest_mw,
            max_invest: config.grid.max_invest_mw,
            lifetime: config.grid.lifetime_yr,
            preinstalled: preinstalled_matrix(
                &units_of(ResourceKind::Grid),
                config.grid.lifetime_yr,
                start_year,
                n_periods,
            ),
            capacity_price: vec![0.0; n_periods],
        },
        ResourceSpec {
            kind: ResourceKind::Storage,
            unit_cost: vec![config.storage.cost_per_kwh * config.storage.duration_h; n_periods],
            fixed_cost: vec![config.storage.fixed_cost; n_periods],
            min_invest: config.storage.min_invest_mw,
            max_invest: storage_cap,
            lifetime: config.storage.lifetime_yr,
            preinstalled: preinstalled_matrix(
                &units_of(ResourceKind::Storage),
                config.storage.lifetime_yr,
                start_year,
                n_periods,
            ),
            capacity_price: capacity_price_default.clone(),
        },
    ];
    for spec in &specs {
        spec.validate(n_periods)?;
    }
    storage.validate()?;

    let scarcity_events = match &config.paths.scarcity_events {
        None => Vec::new(),
        Some(p) => load_events(&resolve(base_dir, p), &selection, n_periods)?,
    };

    let series = ExogenousSeries {
        load,
        supply_price,
        demand_price,
        load_shed_value: config.shedding.value_per_mwh,
        scarcity_events,
    };
    series.validate(&horizon)?;

    Ok(Instance {
        horizon,
        specs,
        storage,
        series,
        selection,
        start_year,
        flatten_bound,
        shedding_allowed: config.shedding.allowed,
        solver: config.solver_options(),
        backend: config.solver.backend.clone(),
        parallel: config.solver.parallel,
        capacity_price_default,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_index_handles_leap_years() {
        // 2024-03-01 is ordinal 61 in a leap year; the 365-day calendar puts
        // it at index 59 (zero-based), right after 2024-02-28.
        let d = chrono::NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
        assert_eq!(day_index_365(d).unwrap(), 59);
        let feb28 = chrono::NaiveDate::from_ymd_opt(2024, 2, 28).unwrap();
        assert_eq!(day_index_365(feb28).unwrap(), 58);
        let feb29 = chrono::NaiveDate::from_ymd_opt(2024, 2, 29).unwrap();
        assert!(day_index_365(feb29).is_err());
        // Non-leap years are untouched.
        let d = chrono::NaiveDate::from_ymd_opt(2023, 3, 1).unwrap();
        assert_eq!(day_index_365(d).unwrap(), 59);
        let dec31 = chrono::NaiveDate::from_ymd_opt(2024, 12, 31).unwrap();
        assert_eq!(day_index_365(dec31).unwrap(), 364);
    }

    #[test]
    fn preinstalled_matrix_retires_by_lifetime() {
        let units = vec![("battery".to_string(), 6.0, 2019)];
        let m = preinstalled_matrix(&units, 20, 2025, 20);
        // Live 2019..=2038: periods 0..=13 from a 2025 start.
        assert_eq!(m[0][13], 6.0);
        assert_eq!(m[0][14], 0.0);
    }
}
