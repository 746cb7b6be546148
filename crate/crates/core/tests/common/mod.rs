//! Shared instance builders for integration tests.
#![allow(dead_code)]

use gridstor::model::{
    DemandKind, ExogenousSeries, Horizon, PerDemand, PerResource, ResourceKind, ResourceSpec,
    Series3, StorageSpec,
};

pub fn horizon(n: usize, j: usize, k: usize, contingencies: usize) -> Horizon<f64> {
    let weights = if contingencies == 2 { vec![0.8, 0.2] } else { vec![0.8] };
    Horizon::full_days(n, j, k, 1.0, weights).unwrap()
}

pub fn grid_spec(n_periods: usize, preinstalled: Vec<Vec<f64>>) -> ResourceSpec<f64> {
    ResourceSpec {
        kind: ResourceKind::Grid,
        unit_cost: vec![5000.0; n_periods],
        fixed_cost: vec![0.0; n_periods],
        min_invest: 40.0,
        max_invest: 40.0,
        lifetime: 40,
        preinstalled,
        capacity_price: vec![0.0; n_periods],
    }
}

pub fn backup_spec(n_periods: usize, preinstalled: Vec<Vec<f64>>) -> ResourceSpec<f64> {
    ResourceSpec {
        kind: ResourceKind::Backup,
        unit_cost: vec![2738.0; n_periods],
        fixed_cost: vec![0.0; n_periods],
        min_invest: 2.0,
        max_invest: 30.0,
        lifetime: 20,
        preinstalled,
        capacity_price: vec![0.0; n_periods],
    }
}

pub fn storage_resource_spec(n_periods: usize, preinstalled: Vec<Vec<f64>>) -> ResourceSpec<f64> {
    ResourceSpec {
        kind: ResourceKind::Storage,
        unit_cost: vec![4832.0; n_periods],
        fixed_cost: vec![0.0; n_periods],
        min_invest: 2.0,
        max_invest: 24.0,
        lifetime: 20,
        preinstalled,
        capacity_price: vec![0.0; n_periods],
    }
}

pub fn storage_spec() -> StorageSpec<f64> {
    StorageSpec {
        eta_charge: 0.913,
        eta_discharge: 0.913,
        duration: 8.0,
        cycle_limit: 150.0,
    }
}

pub fn lossless_storage() -> StorageSpec<f64> {
    StorageSpec {
        eta_charge: 1.0,
        eta_discharge: 1.0,
        duration: 8.0,
        cycle_limit: 150.0,
    }
}

/// Series with a load profile and a grid price profile; grid demand pays the
/// same price as supply, every other price is zero.
pub fn series_from(
    horizon: &Horizon<f64>,
    load: impl Fn(usize, usize, usize) -> f64,
    grid_price: impl Fn(usize, usize, usize) -> f64,
) -> ExogenousSeries<f64> {
    let (n, j, k) = (horizon.n_periods, horizon.n_operating, horizon.n_subperiods);
    ExogenousSeries {
        load: Series3::from_fn(n, j, k, &load),
        supply_price: PerResource::from_fn(|r| {
            Series3::from_fn(n, j, k, |a, b, c| match r {
                ResourceKind::Grid => grid_price(a, b, c),
                ResourceKind::Backup => 305.0,
                ResourceKind::Storage => 0.0,
            })
        }),
        demand_price: PerDemand::from_fn(|d| {
            Series3::from_fn(n, j, k, |a, b, c| match d {
                DemandKind::Grid => grid_price(a, b, c),
                _ => 0.0,
            })
        }),
        load_shed_value: 0.0,
        scarcity_events: vec![],
    }
}
