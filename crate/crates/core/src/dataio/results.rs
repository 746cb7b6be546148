//! Result tables: one column per experiment, rows grouped as in the case
//! study, written as both JSON (machine-readable) and CSV (presentation).

use super::timeseries::DataError;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Fixed row set of the comparison table: `(group, label)` pairs.
pub const TABLE_ROWS: &[(&str, &str)] = &[
    ("Solution quality", "Total cost (M$)"),
    ("Solution quality", "Solve time (s)"),
    ("Solution quality", "Maximum MIP gap (%)"),
    ("Costs (M$)", "Total operating"),
    ("Costs (M$)", "- base case"),
    ("Costs (M$)", "- contingency"),
    ("Costs (M$)", "Total capital"),
    ("Costs (M$)", "- backup"),
    ("Costs (M$)", "- grid"),
    ("Costs (M$)", "- storage"),
    ("Costs (M$)", "Total capacity payment"),
    ("Costs (M$)", "- backup"),
    ("Costs (M$)", "- grid"),
    ("Costs (M$)", "- storage"),
    ("Investment decisions (MW)", "Terminal capacity"),
    ("Investment decisions (MW)", "- backup"),
    ("Investment decisions (MW)", "- grid"),
    ("Investment decisions (MW)", "- storage"),
    ("Investment decisions (MW)", "Total investment"),
    ("Investment decisions (MW)", "- backup"),
    ("Investment decisions (MW)", "- grid"),
    ("Investment decisions (MW)", "- storage"),
    ("Operating decisions: Base case (GWh/yr)", "Demand (w/o storage)"),
    ("Operating decisions: Base case (GWh/yr)", "- grid"),
    ("Operating decisions: Base case (GWh/yr)", "- load"),
    ("Operating decisions: Base case (GWh/yr)", "- storage"),
    ("Operating decisions: Base case (GWh/yr)", "Supply (w/o storage)"),
    ("Operating decisions: Base case (GWh/yr)", "- backup"),
    ("Operating decisions: Base case (GWh/yr)", "- grid"),
    ("Operating decisions: Base case (GWh/yr)", "- storage"),
    ("Operating decisions: Contingency (GWh/yr)", "Demand (w/o storage)"),
    ("Operating decisions: Contingency (GWh/yr)", "- grid"),
    ("Operating decisions: Contingency (GWh/yr)", "- load"),
    ("Operating decisions: Contingency (GWh/yr)", "- storage"),
    ("Operating decisions: Contingency (GWh/yr)", "Supply (w/o storage)"),
    ("Operating decisions: Contingency (GWh/yr)", "- backup"),
    ("Operating decisions: Contingency (GWh/yr)", "- grid"),
    ("Operating decisions: Contingency (GWh/yr)", "- storage"),
    ("Yearly discharge cycles (#)", "Average (base case)"),
    ("Yearly discharge cycles (#)", "Maximum (base case)"),
    ("Yearly discharge cycles (#)", "Average (contingency)"),
    ("Yearly discharge cycles (#)", "Maximum (contingency)"),
    ("Minimum scarcity supply ratio (-)", "Backup (base case)"),
    ("Minimum scarcity supply ratio (-)", "Storage (base case)"),
    ("Minimum scarcity supply ratio (-)", "Backup (contingency)"),
    ("Minimum scarcity supply ratio (-)", "Storage (contingency)"),
];

/// One backup/grid/storage triple; `None` renders as "na".
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourceTriple {
    pub backup: Option<f64>,
    pub grid: Option<f64>,
    pub storage: Option<f64>,
}

impl ResourceTriple {
    pub fn total(&self) -> Option<f64> {
        match (self.backup, self.grid, self.storage) {
            (None, None, None) => None,
            (b, g, s) => Some(b.unwrap_or(0.0) + g.unwrap_or(0.0) + s.unwrap_or(0.0)),
        }
    }
}

/// Yearly energy totals of one contingency scenario (GWh/yr).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEnergy {
    pub demand_grid: f64,
    pub demand_load: f64,
    pub demand_storage: f64,
    pub supply_backup: f64,
    pub supply_grid: f64,
    pub supply_storage: f64,
}

/// Everything one experiment contributes to the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetrics {
    pub name: String,
    pub status: String,
    pub total_cost_musd: f64,
    pub solve_time_s: f64,
    pub max_mip_gap_pct: f64,
    /// Duration-weighted operating cost per scenario, M$ over the horizon.
    pub operating_musd: Vec<f64>,
    /// The same costs rescaled to full-time-equivalent scenario costs.
    pub operating_full_time_musd: Vec<f64>,
    pub capital_musd: ResourceTriple,
    pub capacity_payment_musd: ResourceTriple,
    pub terminal_capacity_mw: ResourceTriple,
    pub total_investment_mw: ResourceTriple,
    pub energy: Vec<ScenarioEnergy>,
    pub cycles_avg: Vec<f64>,
    pub cycles_max: Vec<f64>,
    pub scarcity_backup: Vec<Option<f64>>,
    pub scarcity_storage: Vec<Option<f64>>,
}

impl ExperimentMetrics {
    /// Values aligned with [`TABLE_ROWS`].
    pub fn table_values(&self) -> Vec<Option<f64>> {
        let scen = |v: &Vec<f64>, c: usize| v.get(c).copied();
        let energy = |c: usize| self.energy.get(c).copied().unwrap_or_default();
        let mut out = vec![
            Some(self.total_cost_musd),
            Some(self.solve_time_s),
            Some(self.max_mip_gap_pct),
            Some(self.operating_musd.iter().sum()),
            scen(&self.operating_full_time_musd, 0),
            scen(&self.operating_full_time_musd, 1),
            self.capital_musd.total(),
            self.capital_musd.backup,
            self.capital_musd.grid,
            self.capital_musd.storage,
            self.capacity_payment_musd.total().map(|v| -v),
            self.capacity_payment_musd.backup.map(|v| -v),
            self.capacity_payment_musd.grid.map(|v| -v),
            self.capacity_payment_musd.storage.map(|v| -v),
            self.terminal_capacity_mw.total(),
            self.terminal_capacity_mw.backup,
            self.terminal_capacity_mw.grid,
            self.terminal_capacity_mw.storage,
            self.total_investment_mw.total(),
            self.total_investment_mw.backup,
            self.total_investment_mw.grid,
            self.total_investment_mw.storage,
        ];
        for c in 0..2 {
            let e = energy(c);
            let present = c < self.energy.len();
            let some = |v: f64| if present { Some(v) } else { None };
            out.extend([
                some(e.demand_grid + e.demand_load),
                some(e.demand_grid),
                some(e.demand_load),
                some(e.demand_storage),
                some(e.supply_backup + e.supply_grid),
                some(e.supply_backup),
                some(e.supply_grid),
                some(e.supply_storage),
            ]);
        }
        out.extend([
            scen(&self.cycles_avg, 0),
            scen(&self.cycles_max, 0),
            scen(&self.cycles_avg, 1),
            scen(&self.cycles_max, 1),
        ]);
        out.extend([
            self.scarcity_backup.first().copied().flatten(),
            self.scarcity_storage.first().copied().flatten(),
            self.scarcity_backup.get(1).copied().flatten(),
            self.scarcity_storage.get(1).copied().flatten(),
        ]);
        debug_assert_eq!(out.len(), TABLE_ROWS.len());
        out
    }
}

/// The whole comparison: experiment columns in run order, plus failures.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultsFile {
    pub experiments: Vec<ExperimentMetrics>,
    pub failures: Vec<(String, String)>,
}

fn fmt_cell(v: Option<f64>) -> String {
    match v {
        None => "na".to_string(),
        Some(v) => format!("{v:.3}"),
    }
}

/// Write `results.json` and `results_table.csv` into `dir`.
pub fn write_results(dir: impl AsRef<Path>, results: &ResultsFile) -> Result<(), DataError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| DataError::Write {
        path: dir.display().to_string(),
        source,
    })?;
    let json_path = dir.join("results.json");
    let json = serde_json::to_string_pretty(results).map_err(|source| DataError::Json {
        path: json_path.display().to_string(),
        source,
    })?;
    std::fs::write(&json_path, json).map_err(|source| DataError::Write {
        path: json_path.display().to_string(),
        source,
    })?;

    let csv_path = dir.join("results_table.csv");
    let mut file = std::fs::File::create(&csv_path).map_err(|source| DataError::Write {
        path: csv_path.display().to_string(),
        source,
    })?;
    let mut write = |line: String| -> Result<(), DataError> {
        writeln!(file, "{line}").map_err(|source| DataError::Write {
            path: csv_path.display().to_string(),
            source,
        })
    };
    let mut header = vec!["group".to_string(), "row".to_string()];
    header.extend(results.experiments.iter().map(|e| e.name.clone()));
    write(header.join(","))?;
    let columns: Vec<Vec<Option<f64>>> =
        results.experiments.iter().map(|e| e.table_values()).collect();
    for (i, (group, label)) in TABLE_ROWS.iter().enumerate() {
        let mut row = vec![format!("\"{group}\""), format!("\"{label}\"")];
        row.extend(columns.iter().map(|c| fmt_cell(c[i])));
        write(row.join(","))?;
    }
    for (name, error) in &results.failures {
        write(format!("\"failed\",\"{name}\",\"{error}\""))?;
    }
    Ok(())
}

/// Read back a `results.json`.
pub fn read_results(path: impl AsRef<Path>) -> Result<ResultsFile, DataError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|source| DataError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| DataError::Json {
        path: path.as_ref().display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_metrics(name: &str) -> ExperimentMetrics {
        ExperimentMetrics {
            name: name.into(),
            status: "optimal".into(),
            total_cost_musd: 0.0,
            solve_time_s: 0.0,
            max_mip_gap_pct: 0.0,
            operating_musd: vec![0.0, 0.0],
            operating_full_time_musd: vec![0.0, 0.0],
            capital_musd: ResourceTriple::default(),
            capacity_payment_musd: ResourceTriple::default(),
            terminal_capacity_mw: ResourceTriple {
                backup: Some(0.0),
                grid: Some(0.0),
                storage: Some(0.0),
            },
            total_investment_mw: ResourceTriple::default(),
            energy: vec![ScenarioEnergy::default(), ScenarioEnergy::default()],
            cycles_avg: vec![0.0, 0.0],
            cycles_max: vec![0.0, 0.0],
            scarcity_backup: vec![None, None],
            scarcity_storage: vec![None, None],
        }
    }

    #[test]
    fn row_set_is_frozen() {
        assert_eq!(TABLE_ROWS.len(), 46);
        let groups: Vec<&str> = {
            let mut seen = Vec::new();
            for (g, _) in TABLE_ROWS {
                if seen.last() != Some(g) {
                    seen.push(*g);
                }
            }
            seen
        };
        assert_eq!(
            groups,
            vec![
                "Solution quality",
                "Costs (M$)",
                "Investment decisions (MW)",
                "Operating decisions: Base case (GWh/yr)",
                "Operating decisions: Contingency (GWh/yr)",
                "Yearly discharge cycles (#)",
                "Minimum scarcity supply ratio (-)",
            ]
        );
        let m = zero_metrics("e1");
        assert_eq!(m.table_values().len(), TABLE_ROWS.len());
    }

    #[test]
    fn zero_experiment_renders_zero_rows_and_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let results = ResultsFile {
            experiments: vec![zero_metrics("only")],
            failures: vec![],
        };
        write_results(dir.path(), &results).unwrap();
        let text = std::fs::read_to_string(dir.path().join("results_table.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + TABLE_ROWS.len());
        assert!(lines[1].ends_with("0.000"));
        // Costs are three-decimal cells; unavailable metrics render as na.
        assert!(text.contains("na"));

        let back = read_results(dir.path().join("results.json")).unwrap();
        assert_eq!(back, results);
    }

    #[test]
    fn capacity_payments_render_negated() {
        let mut m = zero_metrics("e");
        m.capacity_payment_musd.storage = Some(9.627);
        let values = m.table_values();
        // Row 13 is the storage capacity payment.
        assert_eq!(values[13], Some(-9.627));
    }
}
