//! Builder behavior on small instances, with enumeration oracles for the
//! disjunctive market restriction.

mod common;

use common::*;
use gridstor::formulation::{
    add_market_participation_fixed_grid, add_no_load_shedding, build_full_model, compute_bigm,
    extract_solution, fix_investments, variable_count_formula, BuildConfig, CycleScope,
    MarketMode, VarRole,
};
use gridstor::model::{
    grid_capacity, DemandKind, InvestmentPlan, ResourceKind, Series3, StorageSpec,
};
use gridstor::solver::{solve_milp, SolveStatus, SolverOptions, VarKind};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn config(market: MarketMode, investable: Vec<ResourceKind>) -> BuildConfig<f64> {
    BuildConfig {
        market_mode: market,
        investable,
        storage_cost_per_kwh: None,
        cycle_scope: CycleScope::Yearly,
        capacity_price_override: None,
        storage_max_invest_override: None,
        allow_load_shedding: false,
        solver: opts(),
    }
}

#[test]
fn variable_count_matches_closed_formula() {
    // Single period, one day of two hours, no contingency, grid investable.
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 0.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![])];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::Full, vec![ResourceKind::Grid]),
    )
    .unwrap();
    let want = variable_count_formula(horizon.dims(), &[ResourceKind::Grid], false);
    assert_eq!(built.model.problem.n_vars(), want);
    // x, z, x_tot_g per contingency, x_max, 3 supplies and 3 demands and soc
    // per hour, one target.
    assert_eq!(want, 1 + 1 + 1 + 1 + 3 * 2 + 3 * 2 + 2 + 1);
}

#[test]
fn binary_count_matches_variable_table() {
    // All three resources investable plus the market restriction: R*N
    // investment binaries and one market flag per hour.
    let horizon = horizon(2, 1, 3, 2);
    let series = series_from(&horizon, |_, _, k| 5.0 + k as f64, |_, _, _| 10.0);
    let specs = vec![
        grid_spec(2, vec![vec![36.0; 2], vec![38.0; 2]]),
        backup_spec(2, vec![]),
        storage_resource_spec(2, vec![]),
    ];
    let built = build_full_model(
        &specs,
        &storage_spec(),
        &horizon,
        &series,
        &config(
            MarketMode::PeakOnly,
            vec![ResourceKind::Backup, ResourceKind::Grid, ResourceKind::Storage],
        ),
    )
    .unwrap();
    let hours = horizon.dims().hours();
    assert_eq!(built.model.binary_count(), 3 * 2 + hours);
    let total = variable_count_formula(
        horizon.dims(),
        &[ResourceKind::Backup, ResourceKind::Grid, ResourceKind::Storage],
        true,
    );
    assert_eq!(built.model.problem.n_vars(), total);
}

#[test]
fn zero_load_superfluous_system_costs_nothing() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 0.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![])];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::Full, vec![ResourceKind::Grid]),
    )
    .unwrap();
    let sol = solve_milp(&built.model.problem, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!(sol.objective.abs() < 1e-9);
    let (plan, op, breakdown) =
        extract_solution(&built, &lossless_storage(), &horizon, &series, &sol).unwrap();
    assert!(plan.invest[ResourceKind::Grid].iter().all(|&x| x == 0.0));
    assert!(op.supply[ResourceKind::Grid].values().iter().all(|&v| v == 0.0));
    assert!(breakdown.total.abs() < 1e-9);
}

#[test]
fn capacity_deficit_forces_a_grid_build() {
    // Two periods; preinstalled N-1 capacity (36) is below the 50 MW load, so
    // some period must build the 40 MW reinforcement.
    let horizon = horizon(2, 1, 2, 2);
    let series = series_from(&horizon, |_, _, _| 50.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(2, vec![vec![36.0; 2], vec![38.0; 2]])];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::PeakOnly, vec![ResourceKind::Grid]),
    )
    .unwrap();

    // Zero-build variant is infeasible.
    let mut fixed = built.clone();
    let plan = InvestmentPlan::<f64>::zeros(2);
    fix_investments(&mut fixed.model, &plan, &fixed.specs).unwrap();
    let sol = solve_milp(&fixed.model.problem, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);

    // The free model builds in period 0 (late building leaves period 0 short).
    let sol = solve_milp(&built.model.problem, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    let (plan, _, _) =
        extract_solution(&built, &lossless_storage(), &horizon, &series, &sol).unwrap();
    assert!(plan.build[ResourceKind::Grid].iter().any(|&z| z));
}

#[test]
fn no_load_shedding_pins_served_load() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, k| 3.0 + k as f64, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![vec![36.0]])];
    let mut cfg = config(MarketMode::Full, vec![ResourceKind::Grid]);
    cfg.allow_load_shedding = true;
    let built = build_full_model(&specs, &lossless_storage(), &horizon, &series, &cfg).unwrap();
    let mut model = built.model.clone();
    add_no_load_shedding(&mut model);
    for k in 0..2 {
        let id = model
            .var(VarRole::Demand { d: DemandKind::Load, n: 0, j: 0, k, c: 0 })
            .unwrap();
        assert_eq!(model.problem.lower[id.0], series.load.at(0, 0, k));
        assert_eq!(model.problem.upper[id.0], series.load.at(0, 0, k));
    }
    // Idempotent.
    let before = model.problem.clone();
    add_no_load_shedding(&mut model);
    assert_eq!(model.problem, before);
}

#[test]
fn shedding_lowers_cost_when_supply_is_dearer_than_lost_load() {
    // One hour of 5 MW load servable only from backup at $10,000/MWh against
    // a $9,337/MWh value of served load.
    let horizon = horizon(1, 1, 1, 1);
    let mut series = series_from(&horizon, |_, _, _| 5.0, |_, _, _| 0.0);
    series.supply_price[ResourceKind::Backup] = Series3::from_fn(1, 1, 1, |_, _, _| 10_000.0);
    series.load_shed_value = 9_337.0;
    series.demand_price[DemandKind::Load] = Series3::from_fn(1, 1, 1, |_, _, _| 9_337.0);
    let specs = vec![backup_spec(1, vec![vec![13.0]])];

    let mut shed_cfg = config(MarketMode::Full, vec![]);
    shed_cfg.allow_load_shedding = true;
    let shed = build_full_model(&specs, &lossless_storage(), &horizon, &series, &shed_cfg).unwrap();
    let shed_obj = solve_milp(&shed.model.problem, &opts()).unwrap().objective;

    let noshed_cfg = config(MarketMode::Full, vec![]);
    let noshed =
        build_full_model(&specs, &lossless_storage(), &horizon, &series, &noshed_cfg).unwrap();
    let noshed_obj = solve_milp(&noshed.model.problem, &opts()).unwrap().objective;

    // Shedding keeps nothing served (pay 0, forgo 9,337) versus serving at a
    // 10,000 - 9,337 = 663 $/MWh loss.
    assert!(
        shed_obj < noshed_obj - 1.0,
        "shedding {shed_obj} vs forced service {noshed_obj}"
    );
}

/// Enumerate all market-flag patterns, solving an LP per pattern.
fn market_enumeration_optimum(
    built: &gridstor::formulation::BuiltModel<f64>,
) -> Option<f64> {
    let model = &built.model;
    let dims = model.meta.dims;
    let mut flags = Vec::new();
    for n in 0..dims.n {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    flags.push(model.var(VarRole::MarketFlag { n, j, k, c }).unwrap());
                }
            }
        }
    }
    let mut best: Option<f64> = None;
    for pattern in 0..(1usize << flags.len()) {
        let mut problem = model.problem.clone();
        for (bit, &id) in flags.iter().enumerate() {
            let v = if pattern & (1 << bit) != 0 { 1.0 } else { 0.0 };
            problem.fix_var(id, v);
        }
        // Remaining binaries (build indicators) are enumerated by the solver
        // itself; the tiny instances here have none free.
        let sol = solve_milp(&problem, &opts()).unwrap();
        if sol.status == SolveStatus::Optimal {
            best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective)));
        }
    }
    best
}

#[test]
fn market_reformulation_matches_pattern_enumeration() {
    // Three hours, no contingency split, preinstalled grid of 8 MW against a
    // load peaking above it; storage preinstalled and free to arbitrage only
    // into the shortfall.
    let horizon = horizon(1, 1, 3, 1);
    let series = series_from(
        &horizon,
        |_, _, k| [6.0, 10.0, 12.0][k],
        |_, _, k| [5.0, 30.0, 80.0][k],
    );
    let specs = vec![
        grid_spec(1, vec![vec![8.0]]),
        storage_resource_spec(1, vec![vec![5.0]]),
        backup_spec(1, vec![vec![3.0]]),
    ];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::PeakOnly, vec![]),
    )
    .unwrap();
    assert_eq!(built.model.binary_count(), 3);

    let milp = solve_milp(&built.model.problem, &opts()).unwrap();
    assert_eq!(milp.status, SolveStatus::Optimal);
    let brute = market_enumeration_optimum(&built).expect("some pattern feasible");
    assert!(
        (milp.objective - brute).abs() <= 1e-7 * brute.abs().max(1.0),
        "milp {} vs enumeration {}",
        milp.objective,
        brute
    );

    // Branch semantics: with no shortfall in hour 0 the flag is down and
    // non-grid supply is zero there; the deficit hours are covered exactly.
    let (_, op, _) =
        extract_solution(&built, &lossless_storage(), &horizon, &series, &milp).unwrap();
    assert!(op.supply[ResourceKind::Storage].at(0, 0, 0, 0) < 1e-6);
    assert!(op.supply[ResourceKind::Backup].at(0, 0, 0, 0) < 1e-6);
    for (k, shortfall) in [(1usize, 2.0), (2usize, 4.0)] {
        let non_grid = op.supply[ResourceKind::Storage].at(0, 0, k, 0)
            + op.supply[ResourceKind::Backup].at(0, 0, k, 0);
        assert!(
            (non_grid - shortfall).abs() < 1e-6,
            "hour {k}: non-grid {non_grid} vs shortfall {shortfall}"
        );
    }
}

#[test]
fn fixed_grid_linear_variant_matches_disjunctive_form() {
    let horizon = horizon(1, 1, 3, 2);
    let series = series_from(
        &horizon,
        |_, _, k| [6.0, 9.0, 10.0][k],
        |_, _, k| [5.0, 30.0, 80.0][k],
    );
    let specs = vec![
        grid_spec(1, vec![vec![8.0], vec![7.0]]),
        storage_resource_spec(1, vec![vec![5.0]]),
        backup_spec(1, vec![vec![3.0]]),
    ];
    // Disjunctive form (grid not investable, so capacities are constants).
    let disjunctive = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::PeakOnly, vec![]),
    )
    .unwrap();
    let a = solve_milp(&disjunctive.model.problem, &opts()).unwrap();
    assert_eq!(a.status, SolveStatus::Optimal);

    // Linear variant on the same fixed capacities.
    let base = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::Full, vec![]),
    )
    .unwrap();
    let mut linear = base.model.clone();
    let plan = InvestmentPlan::<f64>::zeros(1);
    let grid = &specs[0];
    let totals = vec![(0..2)
        .map(|c| grid_capacity(&plan, grid, 0, c).unwrap())
        .collect::<Vec<_>>()];
    add_market_participation_fixed_grid(&mut linear, &totals, &horizon, &series).unwrap();
    let b = solve_milp(&linear.problem, &opts()).unwrap();
    assert_eq!(b.status, SolveStatus::Optimal);

    let scale = a.objective.abs().max(1.0);
    assert!(
        (a.objective - b.objective).abs() <= 1e-6 * scale,
        "disjunctive {} vs linear {}",
        a.objective,
        b.objective
    );
}

#[test]
fn fixed_grid_variant_rejects_free_grid_or_shedding() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 5.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![vec![36.0]])];
    let mut cfg = config(MarketMode::Full, vec![ResourceKind::Grid]);
    cfg.allow_load_shedding = true;
    let built = build_full_model(&specs, &lossless_storage(), &horizon, &series, &cfg).unwrap();
    let mut model = built.model.clone();
    let totals = vec![vec![36.0]];
    assert!(add_market_participation_fixed_grid(&mut model, &totals, &horizon, &series).is_err());
    add_no_load_shedding(&mut model);
    // Grid columns still free.
    assert!(matches!(
        add_market_participation_fixed_grid(&mut model, &totals, &horizon, &series),
        Err(gridstor::formulation::FormulationError::GridStillFree)
    ));
}

#[test]
fn dispatch_toy_matches_hand_solution_and_restriction_is_dearer() {
    // Load [0, 10, 0] at prices [1, 5, 1]; lossless 10 MW storage with one
    // hour of duration can buy the energy in hour 0 instead: cost 10 versus
    // 50 from the grid alone.
    let horizon = horizon(1, 1, 3, 1);
    let series = series_from(&horizon, |_, _, k| if k == 1 { 10.0 } else { 0.0 }, |_, _, k| {
        [1.0, 5.0, 1.0][k]
    });
    let specs = vec![
        grid_spec(1, vec![vec![30.0]]),
        storage_resource_spec(1, vec![vec![10.0]]),
    ];
    let storage = StorageSpec {
        eta_charge: 1.0,
        eta_discharge: 1.0,
        duration: 1.0,
        cycle_limit: 150.0,
    };
    let built = build_full_model(
        &specs,
        &storage,
        &horizon,
        &series,
        &config(MarketMode::Full, vec![]),
    )
    .unwrap();
    let mut unrestricted = built.model.clone();
    let plan = InvestmentPlan::<f64>::zeros(1);
    fix_investments(&mut unrestricted, &plan, &built.specs).unwrap();
    let g_free = solve_milp(&unrestricted.problem, &opts()).unwrap();
    assert_eq!(g_free.status, SolveStatus::Optimal);
    // Hand value: buy 10 MWh at $1 in hour 0, duration weight 0.8.
    assert!(
        (g_free.objective - 0.8 * 10.0).abs() < 1e-6,
        "got {}",
        g_free.objective
    );

    // Restricted dispatch on the same investments can never be cheaper.
    let mut restricted = built.model.clone();
    fix_investments(&mut restricted, &plan, &built.specs).unwrap();
    add_no_load_shedding(&mut restricted);
    let totals = vec![vec![30.0]];
    add_market_participation_fixed_grid(&mut restricted, &totals, &horizon, &series).unwrap();
    let g_restricted = solve_milp(&restricted.problem, &opts()).unwrap();
    assert_eq!(g_restricted.status, SolveStatus::Optimal);
    assert!(g_restricted.objective >= g_free.objective - 1e-6);
    // With 30 MW of grid there is never a shortfall, so storage sits idle and
    // the whole load is grid-served at $5.
    assert!((g_restricted.objective - 0.8 * 50.0).abs() < 1e-6);
}

#[test]
fn extraction_rejects_wrong_objective_but_roundtrips_binaries() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 80.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![vec![36.0], vec![38.0]])];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::Full, vec![ResourceKind::Grid]),
    )
    .unwrap();
    let sol = solve_milp(&built.model.problem, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    let (plan, _, breakdown) =
        extract_solution(&built, &lossless_storage(), &horizon, &series, &sol).unwrap();
    // Build indicators come back as exact booleans.
    assert!(plan.build[ResourceKind::Grid][0]);
    assert_eq!(plan.invest[ResourceKind::Grid][0], 40.0);
    let scale = sol.objective.abs().max(1.0);
    assert!((breakdown.total - sol.objective).abs() <= 1e-6 * scale);

    // Corrupt the objective beyond the relative tolerance: extraction must
    // refuse rather than report inconsistent accounting.
    let mut bad = sol.clone();
    bad.objective *= 1.01;
    assert!(extract_solution(&built, &lossless_storage(), &horizon, &series, &bad).is_err());
}

#[test]
fn storage_cost_override_prices_the_build() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 0.0, |_, _, _| 10.0);
    let specs = vec![storage_resource_spec(1, vec![])];
    let mut cfg = config(MarketMode::Full, vec![ResourceKind::Storage]);
    cfg.storage_cost_per_kwh = Some(1.0);
    let built = build_full_model(&specs, &storage_spec(), &horizon, &series, &cfg).unwrap();
    // $1/kWh at 8 h duration is $8/kW.
    assert_eq!(built.specs[0].unit_cost[0], 8.0);
    let x = built
        .model
        .var(VarRole::Invest { r: ResourceKind::Storage, n: 0 })
        .unwrap();
    assert_eq!(built.model.problem.objective[x.0], 8.0 * 1000.0);
}

#[test]
fn investable_resource_requires_a_spec() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 0.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![])];
    let err = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::Full, vec![ResourceKind::Backup]),
    );
    assert!(err.is_err());
}

#[test]
fn market_binaries_are_binary_kind() {
    let horizon = horizon(1, 1, 2, 1);
    let series = series_from(&horizon, |_, _, _| 10.0, |_, _, _| 10.0);
    let specs = vec![grid_spec(1, vec![vec![8.0]])];
    let built = build_full_model(
        &specs,
        &lossless_storage(),
        &horizon,
        &series,
        &config(MarketMode::PeakOnly, vec![]),
    )
    .unwrap();
    let id = built
        .model
        .var(VarRole::MarketFlag { n: 0, j: 0, k: 0, c: 0 })
        .unwrap();
    assert_eq!(built.model.problem.kinds[id.0], VarKind::Binary);
    let bigm = compute_bigm(&built.specs, &lossless_storage(), &horizon, &series).unwrap();
    assert_eq!(bigm.upper_supply.at(0, 0, 0), 10.0);
}
