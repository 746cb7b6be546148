//! Plot-ready CSV files: the savings decomposition and normalized supply
//! heatmaps.

use super::instance::{ExperimentError, Instance};
use super::run::SuiteOutcome;
use crate::dataio::DataError;
use crate::model::{resource_capacity, ResourceKind};
use std::io::Write;
use std::path::Path;

fn create(path: &Path) -> Result<std::fs::File, ExperimentError> {
    std::fs::File::create(path)
        .map_err(|source| {
            DataError::Write {
                path: path.display().to_string(),
                source,
            }
        })
        .map_err(Into::into)
}

/// Savings attribution as successive differences along the first four
/// standard experiments: deferred grid investment (1 to 2), wholesale
/// arbitrage (2 to 3), and capacity-market revenue (3 to 4), each in percent
/// of the first experiment's total cost. One of several possible
/// attributions; the components add up to the total savings of the fourth
/// experiment by construction.
pub fn write_savings_decomposition(
    dir: impl AsRef<Path>,
    suite: &SuiteOutcome,
) -> Result<(), ExperimentError> {
    let path = dir.as_ref().join("savings.csv");
    let mut file = create(&path)?;
    let io = |source| DataError::Write {
        path: path.display().to_string(),
        source,
    };
    writeln!(file, "component,savings_musd,savings_pct_of_baseline").map_err(io)?;
    let totals: Option<Vec<f64>> = ["exp1", "exp2", "exp3", "exp4"]
        .iter()
        .map(|name| suite.get(name).map(|o| o.metrics.total_cost_musd))
        .collect();
    if let Some(t) = totals {
        let baseline = t[0];
        let rows = [
            ("deferred_investment", t[0] - t[1]),
            ("wholesale_arbitrage", t[1] - t[2]),
            ("capacity_market", t[2] - t[3]),
            ("total_vs_baseline", t[0] - t[3]),
        ];
        for (name, musd) in rows {
            let pct = if baseline.abs() > 0.0 { musd / baseline * 100.0 } else { 0.0 };
            writeln!(file, "{name},{musd:.3},{pct:.3}").map_err(io)?;
        }
    }
    Ok(())
}

/// Hourly supply of each resource normalized by its installed capacity, per
/// contingency, for one planning period. Values land in [0, 1]; idle or
/// absent capacity renders as zero.
pub fn write_supply_heatmaps(
    dir: impl AsRef<Path>,
    instance: &Instance,
    suite: &SuiteOutcome,
    year_index: usize,
) -> Result<(), ExperimentError> {
    let dims = instance.horizon.dims();
    if year_index >= dims.n {
        return Err(ExperimentError::YearOutOfRange {
            year: year_index,
            n: dims.n,
        });
    }
    for outcome in suite.outcomes.iter().flatten() {
        let name = &outcome.definition.name;
        let path = dir.as_ref().join(format!("supply_heatmap_{name}.csv"));
        let mut file = create(&path)?;
        let io = |source| DataError::Write {
            path: path.display().to_string(),
            source,
        };
        writeln!(file, "resource,contingency,day,hour,normalized_supply").map_err(io)?;
        for r in ResourceKind::ALL {
            for c in 0..dims.c {
                let cap = resource_capacity(
                    &outcome.plan,
                    &instance.specs,
                    r,
                    year_index,
                    c,
                );
                for j in 0..dims.j {
                    for k in 0..dims.k {
                        let supply = outcome.operation.supply[r].at(year_index, j, k, c);
                        let value = if cap > 0.0 {
                            (supply / cap).clamp(0.0, 1.0)
                        } else {
                            0.0
                        };
                        writeln!(file, "{},{c},{j},{k},{value:.6}", r.label()).map_err(io)?;
                    }
                }
            }
        }
    }
    Ok(())
}
