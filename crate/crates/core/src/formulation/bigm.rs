//! Big-M constants for the disjunctive market-participation constraint.
//!
//! The restriction caps non-grid supply at the positive part of served load
//! minus grid capacity. One binary per hour splits the two branches; the
//! constants below make both branch constraints redundant on the inactive
//! side. The shared lower constant assumes resource buildouts stay in the
//! order of local demand, which also yields a storage buildout bound from the
//! flattening problem.

use super::milp::FormulationError;
use crate::model::{ExogenousSeries, Horizon, ResourceKind, ResourceSpec, Series3, Series4, StorageSpec};
use crate::peakshave;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigMConstants<F = f64> {
    /// Shared negative constant bounding `load served - grid capacity` from
    /// below: `-(max load + 2 * max grid investment)`.
    pub lower: F,
    /// Per-hour upper bound on `load served - grid capacity`: exogenous load
    /// minus the zero-investment grid capacity. May be negative, which simply
    /// forces the inactive branch.
    pub upper_flag: Series4<F>,
    /// Per-hour upper bound on non-grid supply: the exogenous load.
    pub upper_supply: Series3<F>,
    /// Power bound on sensible storage buildouts: flattening power for the
    /// supplied load plus the storage investment cap.
    pub storage_buildout: F,
}

/// Zero-investment grid capacity in period `n` under contingency `c`.
fn grid_capacity_no_invest<F: Scalar>(grid: Option<&ResourceSpec<F>>, n: usize, c: usize) -> F {
    match grid {
        None => F::zero(),
        Some(spec) => {
            let total = spec.preinstalled_total(n);
            if c == 0 {
                total
            } else {
                total - spec.preinstalled_largest(n)
            }
        }
    }
}

pub fn compute_bigm<F: Scalar>(
    specs: &[ResourceSpec<F>],
    storage: &StorageSpec<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
) -> Result<BigMConstants<F>, FormulationError> {
    series.validate(horizon)?;
    let grid = specs.iter().find(|s| s.kind == ResourceKind::Grid);
    let storage_spec = specs.iter().find(|s| s.kind == ResourceKind::Storage);
    let max_grid_invest = grid.map(|s| s.max_invest).unwrap_or_else(F::zero);
    let max_load = series.max_load();
    let lower = -(max_load + F::two() * max_grid_invest);

    let (n_periods, n_days, n_hours) = series.load.shape();
    let upper_flag = {
        let mut out = Series4::zeros(horizon.dims());
        for n in 0..n_periods {
            for c in 0..horizon.n_contingencies {
                let base_cap = grid_capacity_no_invest(grid, n, c);
                for j in 0..n_days {
                    for k in 0..n_hours {
                        out.set(n, j, k, c, series.load.at(n, j, k) - base_cap);
                    }
                }
            }
        }
        out
    };
    let upper_supply = Series3::from_fn(n_periods, n_days, n_hours, |n, j, k| series.load.at(n, j, k));

    // Flattening power over every day of the horizon, plus the investment cap.
    let mut profiles = Vec::with_capacity(n_periods * n_days);
    for n in 0..n_periods {
        for j in 0..n_days {
            profiles.push((0..n_hours).map(|k| series.load.at(n, j, k)).collect::<Vec<F>>());
        }
    }
    let sizing = peakshave::storage_upper_bound(&profiles, storage, horizon.dt)
        .map_err(|e| FormulationError::PlanOutOfBounds(e.to_string()))?;
    let max_storage_invest = storage_spec.map(|s| s.max_invest).unwrap_or_else(F::zero);

    Ok(BigMConstants {
        lower,
        upper_flag,
        upper_supply,
        storage_buildout: sizing.power + max_storage_invest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PerDemand, PerResource};

    fn specs() -> Vec<ResourceSpec<f64>> {
        vec![
            ResourceSpec {
                kind: ResourceKind::Grid,
                unit_cost: vec![0.0],
                fixed_cost: vec![0.0],
                min_invest: 40.0,
                max_invest: 40.0,
                lifetime: 40,
                preinstalled: vec![vec![36.0], vec![38.0]],
                capacity_price: vec![0.0],
            },
            ResourceSpec {
                kind: ResourceKind::Storage,
                unit_cost: vec![0.0],
                fixed_cost: vec![0.0],
                min_invest: 2.0,
                max_invest: 24.0,
                lifetime: 20,
                preinstalled: vec![],
                capacity_price: vec![0.0],
            },
        ]
    }

    fn storage() -> StorageSpec<f64> {
        StorageSpec {
            eta_charge: 0.913,
            eta_discharge: 0.913,
            duration: 8.0,
            cycle_limit: 150.0,
        }
    }

    #[test]
    fn constants_follow_the_formulas() {
        let horizon = Horizon::full_days(1, 1, 2, 1.0, vec![0.8, 0.2]).unwrap();
        let load = Series3::from_fn(1, 1, 2, |_, _, k| if k == 0 { 98.0 } else { 57.0 });
        let series = ExogenousSeries {
            load,
            supply_price: PerResource::from_fn(|_| Series3::zeros(1, 1, 2)),
            demand_price: PerDemand::from_fn(|_| Series3::zeros(1, 1, 2)),
            load_shed_value: 0.0,
            scarcity_events: vec![],
        };
        let bigm = compute_bigm(&specs(), &storage(), &horizon, &series).unwrap();
        // max load 98, grid cap 40 each way.
        assert_eq!(bigm.lower, -178.0);
        // Hour 1 at 57 MW against 74 MW of zero-investment capacity: negative
        // is legal and forces the inactive branch.
        assert_eq!(bigm.upper_flag.at(0, 0, 1, 0), 57.0 - 74.0);
        // Contingency discounts the larger cable.
        assert_eq!(bigm.upper_flag.at(0, 0, 1, 1), 57.0 - 36.0);
        assert_eq!(bigm.upper_supply.at(0, 0, 1), 57.0);
        assert!(bigm.storage_buildout >= 24.0);
    }
}
