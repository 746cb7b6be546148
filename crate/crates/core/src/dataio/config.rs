//! Instance configuration: TOML sections with case-study defaults.
//!
//! Every key carries its unit in the name. Unknown keys are rejected so
//! typos fail loudly. An empty file yields the full default parameter set;
//! data paths must be supplied before an instance can be assembled.

use super::timeseries::DataError;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub horizon: HorizonConfig,
    pub paths: PathsConfig,
    pub backup: BackupConfig,
    pub grid: GridConfig,
    pub storage: StorageConfig,
    pub market: MarketConfig,
    pub shedding: SheddingConfig,
    pub solver: SolverConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            horizon: HorizonConfig::default(),
            paths: PathsConfig::default(),
            backup: BackupConfig::default(),
            grid: GridConfig::default(),
            storage: StorageConfig::default(),
            market: MarketConfig::default(),
            shedding: SheddingConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HorizonConfig {
    pub start_year: i32,
    pub years: usize,
    pub days: usize,
    pub hours_per_day: usize,
    pub dt_h: f64,
    pub time_normal_h: f64,
    pub time_contingency_h: f64,
}

impl Default for HorizonConfig {
    fn default() -> Self {
        Self {
            start_year: 2025,
            years: 3,
            days: 10,
            hours_per_day: 24,
            dt_h: 1.0,
            time_normal_h: 0.8,
            time_contingency_h: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub load: Option<String>,
    pub price: Option<String>,
    pub peaks: Option<String>,
    pub capacity_prices: Option<String>,
    pub scarcity_events: Option<String>,
    pub units: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackupConfig {
    pub supply_cost_per_mwh: f64,
    pub unit_cost_per_kw: f64,
    pub fixed_cost: f64,
    pub min_invest_mw: f64,
    pub max_invest_mw: f64,
    pub lifetime_yr: usize,
}

impl Default for BackupConfig {
    fn default() -> Self {
        Self {
            supply_cost_per_mwh: 305.0,
            unit_cost_per_kw: 2738.0,
            fixed_cost: 0.0,
            min_invest_mw: 2.0,
            max_invest_mw: 30.0,
            lifetime_yr: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub unit_cost_per_kw: f64,
    pub fixed_cost: f64,
    pub min_invest_mw: f64,
    pub max_invest_mw: f64,
    pub lifetime_yr: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            unit_cost_per_kw: 5000.0,
            fixed_cost: 0.0,
            min_invest_mw: 40.0,
            max_invest_mw: 40.0,
            lifetime_yr: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageConfig {
    pub eta_charge: f64,
    pub eta_discharge: f64,
    pub duration_h: f64,
    pub cycle_limit_per_yr: f64,
    pub cost_per_kwh: f64,
    pub fixed_cost: f64,
    pub min_invest_mw: f64,
    /// `None` derives the cap from the flattening bound on the case data.
    pub max_invest_mw: Option<f64>,
    pub lifetime_yr: usize,
    /// "yearly" or "daily" cycle budget.
    pub cycle_scope: String,
}

impl Default for StorageConfig {
    fn default() -> Self {
        Self {
            eta_charge: 0.913,
            eta_discharge: 0.913,
            duration_h: 8.0,
            cycle_limit_per_yr: 150.0,
            cost_per_kwh: 604.0,
            fixed_cost: 0.0,
            min_invest_mw: 2.0,
            max_invest_mw: None,
            lifetime_yr: 20,
            cycle_scope: "yearly".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    /// "peak_only" or "full".
    pub mode: String,
    /// Overrides the capacity-price file when set.
    pub capacity_price_per_kw_month: Option<f64>,
    /// Resources open for investment in custom runs.
    pub investable: Vec<String>,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            mode: "peak_only".into(),
            capacity_price_per_kw_month: None,
            investable: vec!["backup".into(), "grid".into(), "storage".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SheddingConfig {
    pub allowed: bool,
    pub value_per_mwh: f64,
}

impl Default for SheddingConfig {
    fn default() -> Self {
        Self {
            allowed: false,
            value_per_mwh: 9337.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub backend: String,
    pub mip_gap: f64,
    pub time_limit_s: f64,
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub node_limit: Option<u64>,
    pub parallel: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: "reference".into(),
            mip_gap: 1e-5,
            time_limit_s: 14_400.0,
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            node_limit: None,
            parallel: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), DataError> {
        let err = |msg: String| Err(DataError::Config(msg));
        let h = &self.horizon;
        if h.years == 0 || h.days == 0 || h.hours_per_day == 0 {
            return err("horizon sizes must be at least 1".into());
        }
        if h.dt_h <= 0.0 || h.time_normal_h < 0.0 || h.time_contingency_h < 0.0 {
            return err("time durations must be nonnegative and dt positive".into());
        }
        for (name, lo, hi) in [
            ("backup", self.backup.min_invest_mw, self.backup.max_invest_mw),
            ("grid", self.grid.min_invest_mw, self.grid.max_invest_mw),
            (
                "storage",
                self.storage.min_invest_mw,
                self.storage.max_invest_mw.unwrap_or(f64::INFINITY),
            ),
        ] {
            if lo < 0.0 || lo > hi {
                return err(format!(
                    "{name} investment bounds must satisfy 0 <= min <= max (got {lo} > {hi})"
                ));
            }
        }
        let s = &self.storage;
        if !(s.eta_charge > 0.0 && s.eta_charge <= 1.0 && s.eta_discharge > 0.0 && s.eta_discharge <= 1.0)
        {
            return err("storage efficiencies must lie in (0, 1]".into());
        }
        if s.duration_h <= 0.0 || s.cycle_limit_per_yr <= 0.0 {
            return err("storage duration and cycle limit must be positive".into());
        }
        if self.market.mode != "peak_only" && self.market.mode != "full" {
            return err(format!(
                "market mode must be 'peak_only' or 'full', got '{}'",
                self.market.mode
            ));
        }
        for r in &self.market.investable {
            if !matches!(r.as_str(), "backup" | "grid" | "storage") {
                return err(format!("unknown investable resource '{r}'"));
            }
        }
        if self.storage.cycle_scope != "yearly" && self.storage.cycle_scope != "daily" {
            return err(format!(
                "cycle scope must be 'yearly' or 'daily', got '{}'",
                self.storage.cycle_scope
            ));
        }
        if self.solver.mip_gap < 0.0 || self.solver.time_limit_s < 0.0 {
            return err("solver limits must be nonnegative".into());
        }
        Ok(())
    }

    pub fn solver_options(&self) -> crate::solver::SolverOptions {
        crate::solver::SolverOptions {
            mip_gap: self.solver.mip_gap,
            time_limit_s: self.solver.time_limit_s,
            feasibility_tol: self.solver.feasibility_tol,
            integrality_tol: self.solver.integrality_tol,
            node_limit: self.solver.node_limit.unwrap_or(u64::MAX),
        }
    }
}

/// Parse, apply dotted-path overrides (`section.key=value`), and validate.
pub fn load_config_with_overrides(
    path: impl AsRef<Path>,
    overrides: &[(String, String)],
) -> Result<Config, DataError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|source| DataError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    parse_config(&text, overrides)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Config, DataError> {
    load_config_with_overrides(path, &[])
}

pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<Config, DataError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| DataError::Config(format!("bad TOML: {e}")))?;
    for (key, value) in overrides {
        apply_override(&mut table, key, value)?;
    }
    let config: Config = table
        .try_into()
        .map_err(|e| DataError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<(), DataError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(DataError::Config(format!("bad override key '{key}'")));
    }
    let mut current = table;
    for part in &parts[..parts.len() - 1] {
        current = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| DataError::Config(format!("'{part}' in '{key}' is not a section")))?;
    }
    // Interpret the value as TOML when possible, else as a string.
    let parsed: toml::Value = match value.parse::<toml::Value>() {
        Ok(v) => v,
        Err(_) => toml::Value::String(value.to_string()),
    };
    current.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}
