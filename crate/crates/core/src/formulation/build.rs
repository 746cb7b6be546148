//! Assembly of the full planning MILP and its variant toggles.

use super::bigm::{compute_bigm, BigMConstants};
use super::milp::{FormulationError, MilpModel, ModelMeta, VarRole};
use crate::model::{
    grid_capacity, installed_capacity, largest_grid_unit, lifetime_window_start, DemandKind,
    ExogenousSeries, Horizon, InvestmentPlan, ResourceKind, ResourceSpec, StorageSpec, KW_PER_MW,
};
use crate::scalar::Scalar;
use crate::solver::{Sense, SolverOptions, VarKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketMode {
    /// Storage and backup may only serve local shortfall; no capacity-market
    /// revenue.
    PeakOnly,
    /// Unrestricted market participation; capacity credits apply whenever the
    /// price series is nonzero.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleScope {
    /// One throughput budget per planning period and contingency.
    Yearly,
    /// The yearly budget split evenly over every represented day.
    Daily,
}

/// Per-experiment model settings layered over the shared instance data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig<F = f64> {
    pub market_mode: MarketMode,
    pub investable: Vec<ResourceKind>,
    /// Replaces the storage unit cost with `value * duration` $/kW.
    pub storage_cost_per_kwh: Option<F>,
    pub cycle_scope: CycleScope,
    /// Replaces the capacity price for backup and storage, $/kW-period.
    pub capacity_price_override: Option<Vec<F>>,
    /// Raises (or lowers) the storage investment cap, e.g. for cheap-storage
    /// runs that probe buildout beyond the flattening bound.
    pub storage_max_invest_override: Option<F>,
    pub allow_load_shedding: bool,
    pub solver: SolverOptions,
}

impl<F: Scalar> Default for BuildConfig<F> {
    fn default() -> Self {
        Self {
            market_mode: MarketMode::PeakOnly,
            investable: vec![ResourceKind::Grid],
            storage_cost_per_kwh: None,
            cycle_scope: CycleScope::Yearly,
            capacity_price_override: None,
            storage_max_invest_override: None,
            allow_load_shedding: false,
            solver: SolverOptions::default(),
        }
    }
}

/// Builder output: the model plus the specs as the model actually priced
/// them (after cost and capacity-price overrides).
#[derive(Debug, Clone)]
pub struct BuiltModel<F = f64> {
    pub model: MilpModel<F>,
    pub specs: Vec<ResourceSpec<F>>,
    pub config: BuildConfig<F>,
    pub bigm: Option<BigMConstants<F>>,
}

/// Apply config overrides to the instance specs: storage unit cost from
/// $/kWh, capacity prices for the market-participating resources, grid
/// capacity price forced to zero, and no capacity revenue at all when market
/// participation is restricted.
pub fn effective_specs<F: Scalar>(
    specs: &[ResourceSpec<F>],
    storage: &StorageSpec<F>,
    config: &BuildConfig<F>,
) -> Vec<ResourceSpec<F>> {
    let n_periods = specs.first().map(|s| s.unit_cost.len()).unwrap_or(0);
    specs
        .iter()
        .map(|spec| {
            let mut spec = spec.clone();
            if spec.kind == ResourceKind::Storage {
                if let Some(per_kwh) = config.storage_cost_per_kwh {
                    spec.unit_cost = vec![per_kwh * storage.duration; n_periods];
                }
                if let Some(cap) = config.storage_max_invest_override {
                    spec.max_invest = cap;
                }
            }
            if spec.kind == ResourceKind::Grid {
                spec.capacity_price = vec![F::zero(); n_periods];
            } else if let Some(prices) = &config.capacity_price_override {
                spec.capacity_price = prices.clone();
            }
            if config.market_mode == MarketMode::PeakOnly {
                spec.capacity_price = vec![F::zero(); n_periods];
            }
            spec
        })
        .collect()
}

fn find_spec<'a, F>(specs: &'a [ResourceSpec<F>], kind: ResourceKind) -> Option<&'a ResourceSpec<F>> {
    specs.iter().find(|s| s.kind == kind)
}

/// Zero-based investment window for period `n`.
fn window(n: usize, lifetime: usize) -> std::ops::RangeInclusive<usize> {
    (lifetime_window_start(n + 1, lifetime) - 1)..=n
}

/// Closed-form variable count of the full model (used by tests and sizing
/// diagnostics): two investment columns per investable resource and period,
/// an installed-capacity column per investable non-grid resource and period,
/// grid capacity per contingency plus the largest-unit column when grid is
/// investable, seven dispatch columns per hour, one state-of-charge target
/// per period, and one market flag per hour when the restriction is active.
pub fn variable_count_formula(
    horizon_dims: crate::model::Dims,
    investable: &[ResourceKind],
    market_restricted: bool,
) -> usize {
    let n = horizon_dims.n;
    let hours = horizon_dims.hours();
    let mut count = 0;
    for r in ResourceKind::ALL {
        if investable.contains(&r) {
            count += 2 * n;
            count += if r == ResourceKind::Grid {
                n * horizon_dims.c + n
            } else {
                n
            };
        }
    }
    count += 7 * hours + n;
    if market_restricted {
        count += hours;
    }
    count
}

/// Build the full investment-and-dispatch model.
pub fn build_full_model<F: Scalar>(
    specs: &[ResourceSpec<F>],
    storage: &StorageSpec<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
    config: &BuildConfig<F>,
) -> Result<BuiltModel<F>, FormulationError> {
    storage.validate()?;
    series.validate(horizon)?;
    config.solver.validate()?;
    for spec in specs {
        spec.validate(horizon.n_periods)?;
    }
    for &kind in &config.investable {
        if find_spec(specs, kind).is_none() {
            return Err(FormulationError::InvestableWithoutSpec(kind));
        }
    }
    let specs = effective_specs(specs, storage, config);
    let dims = horizon.dims();
    let n_periods = dims.n;
    let investable = |r: ResourceKind| config.investable.contains(&r);

    // Constant capacity tables for resources without investment columns.
    let mut const_total: [Option<Vec<F>>; 3] = [None, None, None];
    let mut const_total_grid = None;
    for r in [ResourceKind::Backup, ResourceKind::Storage] {
        if !investable(r) {
            let caps = (0..n_periods)
                .map(|n| {
                    find_spec(&specs, r)
                        .map(|s| s.preinstalled_total(n))
                        .unwrap_or_else(F::zero)
                })
                .collect();
            const_total[r.index()] = Some(caps);
        }
    }
    if !investable(ResourceKind::Grid) {
        let grid = find_spec(&specs, ResourceKind::Grid);
        let caps = (0..n_periods)
            .map(|n| {
                (0..dims.c)
                    .map(|c| match grid {
                        None => F::zero(),
                        Some(s) => {
                            let total = s.preinstalled_total(n);
                            if c == 0 {
                                total
                            } else {
                                total - s.preinstalled_largest(n)
                            }
                        }
                    })
                    .collect::<Vec<F>>()
            })
            .collect();
        const_total_grid = Some(caps);
    }

    let meta = ModelMeta {
        dims,
        investable: config.investable.clone(),
        shedding_allowed: true,
        market_restricted: false,
        const_total,
        const_total_grid,
        grid_lifetime: find_spec(&specs, ResourceKind::Grid).map(|s| s.lifetime),
    };
    let mut model = MilpModel::new(meta);
    let kw = F::of(KW_PER_MW);

    // Investment columns.
    for r in ResourceKind::ALL {
        if !investable(r) {
            continue;
        }
        let spec = find_spec(&specs, r).expect("checked above");
        for n in 0..n_periods {
            model.add_var(
                VarRole::Invest { r, n },
                format!("x_{}{n}", r.short()),
                VarKind::Continuous,
                F::zero(),
                spec.max_invest,
                spec.unit_cost[n] * kw,
            )?;
        }
        for n in 0..n_periods {
            model.add_var(
                VarRole::Build { r, n },
                format!("z_{}{n}", r.short()),
                VarKind::Binary,
                F::zero(),
                F::one(),
                spec.fixed_cost[n],
            )?;
        }
    }
    // Installed-capacity columns; credits enter the objective here. Constant
    // capacities contribute their credits through the objective offset.
    for r in [ResourceKind::Backup, ResourceKind::Storage] {
        let spec = find_spec(&specs, r);
        if investable(r) {
            let spec = spec.expect("checked above");
            for n in 0..n_periods {
                model.add_var(
                    VarRole::Total { r, n },
                    format!("xt_{}{n}", r.short()),
                    VarKind::Continuous,
                    F::zero(),
                    F::infinity(),
                    -spec.capacity_price[n] * kw,
                )?;
            }
        } else if let Some(spec) = spec {
            for n in 0..n_periods {
                let credit = spec.capacity_price[n] * kw * spec.preinstalled_total(n);
                model.problem.objective_offset = model.problem.objective_offset - credit;
            }
        }
    }
    if investable(ResourceKind::Grid) {
        for n in 0..n_periods {
            for c in 0..dims.c {
                model.add_var(
                    VarRole::TotalGrid { n, c },
                    format!("xtg{n}_{c}"),
                    VarKind::Continuous,
                    F::zero(),
                    F::infinity(),
                    F::zero(),
                )?;
            }
        }
        let grid = find_spec(&specs, ResourceKind::Grid).expect("checked above");
        for n in 0..n_periods {
            // The epigraph over preinstalled units becomes a lower bound.
            model.add_var(
                VarRole::LargestGridUnit { n },
                format!("xmax{n}"),
                VarKind::Continuous,
                grid.preinstalled_largest(n),
                F::infinity(),
                F::zero(),
            )?;
        }
    }

    // Dispatch columns.
    let tw = |j: usize, c: usize| horizon.duration_weights[c] * horizon.day_weights[j];
    for r in ResourceKind::ALL {
        for n in 0..n_periods {
            for j in 0..dims.j {
                for k in 0..dims.k {
                    for c in 0..dims.c {
                        model.add_var(
                            VarRole::Supply { r, n, j, k, c },
                            format!("ys_{}{n}_{j}_{k}_{c}", r.short()),
                            VarKind::Continuous,
                            F::zero(),
                            F::infinity(),
                            tw(j, c) * series.supply_price[r].at(n, j, k),
                        )?;
                    }
                }
            }
        }
    }
    for d in DemandKind::ALL {
        for n in 0..n_periods {
            for j in 0..dims.j {
                for k in 0..dims.k {
                    for c in 0..dims.c {
                        let upper = if d == DemandKind::Load {
                            series.load.at(n, j, k)
                        } else {
                            F::infinity()
                        };
                        model.add_var(
                            VarRole::Demand { d, n, j, k, c },
                            format!("yd_{}{n}_{j}_{k}_{c}", d.label()),
                            VarKind::Continuous,
                            F::zero(),
                            upper,
                            -tw(j, c) * series.demand_price[d].at(n, j, k),
                        )?;
                    }
                }
            }
        }
    }
    for n in 0..n_periods {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    model.add_var(
                        VarRole::Soc { n, j, k, c },
                        format!("soc{n}_{j}_{k}_{c}"),
                        VarKind::Continuous,
                        F::zero(),
                        F::infinity(),
                        F::zero(),
                    )?;
                }
            }
        }
    }
    for n in 0..n_periods {
        model.add_var(
            VarRole::SocTarget { n },
            format!("soc0_{n}"),
            VarKind::Continuous,
            F::zero(),
            F::infinity(),
            F::zero(),
        )?;
    }

    // Investment coupling rows.
    for r in ResourceKind::ALL {
        if !investable(r) {
            continue;
        }
        let spec = find_spec(&specs, r).expect("checked above");
        for n in 0..n_periods {
            let x = model.require(VarRole::Invest { r, n })?;
            let z = model.require(VarRole::Build { r, n })?;
            model.add_row(
                format!("invest_lo_{}{n}", r.short()),
                vec![(z, spec.min_invest), (x, -F::one())],
                Sense::Le,
                F::zero(),
            );
            model.add_row(
                format!("invest_hi_{}{n}", r.short()),
                vec![(x, F::one()), (z, -spec.max_invest)],
                Sense::Le,
                F::zero(),
            );
        }
        if r == ResourceKind::Grid {
            for n in 0..n_periods {
                let xmax = model.require(VarRole::LargestGridUnit { n })?;
                for i in window(n, spec.lifetime) {
                    let xi = model.require(VarRole::Invest { r, n: i })?;
                    model.add_row(
                        format!("largest_unit_{n}_{i}"),
                        vec![(xmax, F::one()), (xi, -F::one())],
                        Sense::Ge,
                        F::zero(),
                    );
                }
                for c in 0..dims.c {
                    let xtot = model.require(VarRole::TotalGrid { n, c })?;
                    let mut coeffs = vec![(xtot, F::one())];
                    for i in window(n, spec.lifetime) {
                        coeffs.push((model.require(VarRole::Invest { r, n: i })?, -F::one()));
                    }
                    if c == 1 {
                        coeffs.push((xmax, F::one()));
                    }
                    model.add_row(
                        format!("grid_capacity_{n}_{c}"),
                        coeffs,
                        Sense::Eq,
                        spec.preinstalled_total(n),
                    );
                }
            }
        } else {
            for n in 0..n_periods {
                let xtot = model.require(VarRole::Total { r, n })?;
                let mut coeffs = vec![(xtot, F::one())];
                for i in window(n, spec.lifetime) {
                    coeffs.push((model.require(VarRole::Invest { r, n: i })?, -F::one()));
                }
                model.add_row(
                    format!("capacity_{}{n}", r.short()),
                    coeffs,
                    Sense::Eq,
                    spec.preinstalled_total(n),
                );
            }
        }
    }

    // Dispatch rows.
    for n in 0..n_periods {
        let storage_total = model.total_of(ResourceKind::Storage, n);
        let backup_total = model.total_of(ResourceKind::Backup, n);
        // State-of-charge target inside the energy capacity.
        {
            let y0 = model.require(VarRole::SocTarget { n })?;
            let mut coeffs = vec![(y0, F::one())];
            let mut rhs = F::zero();
            storage_total.push(-storage.duration, &mut coeffs, &mut rhs);
            add_cap_row(&mut model, format!("soc_target_cap_{n}"), coeffs, rhs);
        }
        for c in 0..dims.c {
            let grid_total = model.grid_total_of(n, c);
            for j in 0..dims.j {
                for k in 0..dims.k {
                    let ys_b = model.require(VarRole::Supply { r: ResourceKind::Backup, n, j, k, c })?;
                    let ys_g = model.require(VarRole::Supply { r: ResourceKind::Grid, n, j, k, c })?;
                    let ys_s = model.require(VarRole::Supply { r: ResourceKind::Storage, n, j, k, c })?;
                    let yd_g = model.require(VarRole::Demand { d: DemandKind::Grid, n, j, k, c })?;
                    let yd_l = model.require(VarRole::Demand { d: DemandKind::Load, n, j, k, c })?;
                    let yd_s = model.require(VarRole::Demand { d: DemandKind::Storage, n, j, k, c })?;
                    let soc = model.require(VarRole::Soc { n, j, k, c })?;

                    model.add_row(
                        format!("balance_{n}_{j}_{k}_{c}"),
                        vec![
                            (ys_b, F::one()),
                            (ys_g, F::one()),
                            (ys_s, F::one()),
                            (yd_g, -F::one()),
                            (yd_l, -F::one()),
                            (yd_s, -F::one()),
                        ],
                        Sense::Eq,
                        F::zero(),
                    );
                    for (tag, var, cap) in [
                        ("supply_cap_b", ys_b, backup_total),
                        ("supply_cap_g", ys_g, grid_total),
                        ("supply_cap_s", ys_s, storage_total),
                        ("demand_cap_g", yd_g, grid_total),
                        ("demand_cap_s", yd_s, storage_total),
                    ] {
                        let mut coeffs = vec![(var, F::one())];
                        let mut rhs = F::zero();
                        cap.push(-F::one(), &mut coeffs, &mut rhs);
                        add_cap_row(&mut model, format!("{tag}_{n}_{j}_{k}_{c}"), coeffs, rhs);
                    }
                    {
                        let mut coeffs = vec![(soc, F::one())];
                        let mut rhs = F::zero();
                        storage_total.push(-storage.duration, &mut coeffs, &mut rhs);
                        add_cap_row(&mut model, format!("soc_cap_{n}_{j}_{k}_{c}"), coeffs, rhs);
                    }
                    // State-of-charge recursion.
                    let mut coeffs = vec![
                        (soc, F::one()),
                        (yd_s, -horizon.dt * storage.eta_charge),
                        (ys_s, horizon.dt / storage.eta_discharge),
                    ];
                    if k == 0 {
                        coeffs.push((model.require(VarRole::SocTarget { n })?, -F::one()));
                        model.add_row(format!("soc_init_{n}_{j}_{c}"), coeffs, Sense::Eq, F::zero());
                    } else {
                        coeffs.push((model.require(VarRole::Soc { n, j, k: k - 1, c })?, -F::one()));
                        model.add_row(format!("soc_step_{n}_{j}_{k}_{c}"), coeffs, Sense::Eq, F::zero());
                    }
                }
                // Terminal state of charge anchors back to the target.
                let last = model.require(VarRole::Soc { n, j, k: dims.k - 1, c })?;
                let y0 = model.require(VarRole::SocTarget { n })?;
                model.add_row(
                    format!("soc_terminal_{n}_{j}_{c}"),
                    vec![(last, F::one()), (y0, -F::one())],
                    Sense::Eq,
                    F::zero(),
                );
            }
            // Cycle budgets.
            let per_discharge = horizon.dt / storage.eta_discharge;
            match config.cycle_scope {
                CycleScope::Yearly => {
                    let mut coeffs = Vec::with_capacity(dims.j * dims.k + 1);
                    for j in 0..dims.j {
                        for k in 0..dims.k {
                            coeffs.push((
                                model.require(VarRole::Supply { r: ResourceKind::Storage, n, j, k, c })?,
                                per_discharge * horizon.day_weights[j],
                            ));
                        }
                    }
                    let mut rhs = F::zero();
                    storage_total.push(-storage.cycle_limit * storage.duration, &mut coeffs, &mut rhs);
                    add_cap_row(&mut model, format!("cycle_budget_{n}_{c}"), coeffs, rhs);
                }
                CycleScope::Daily => {
                    let daily = storage.cycle_limit / horizon.days_represented();
                    for j in 0..dims.j {
                        let mut coeffs = Vec::with_capacity(dims.k + 1);
                        for k in 0..dims.k {
                            coeffs.push((
                                model.require(VarRole::Supply { r: ResourceKind::Storage, n, j, k, c })?,
                                per_discharge,
                            ));
                        }
                        let mut rhs = F::zero();
                        storage_total.push(-daily * storage.duration, &mut coeffs, &mut rhs);
                        add_cap_row(&mut model, format!("cycle_budget_{n}_{j}_{c}"), coeffs, rhs);
                    }
                }
            }
        }
    }

    let mut built = BuiltModel {
        model,
        specs,
        config: config.clone(),
        bigm: None,
    };
    if config.market_mode == MarketMode::PeakOnly {
        let bigm = compute_bigm(&built.specs, storage, horizon, series)?;
        add_market_participation(&mut built.model, &bigm, horizon, series)?;
        built.bigm = Some(bigm);
    }
    if !config.allow_load_shedding {
        add_no_load_shedding(&mut built.model);
    }
    built.model.validate()?;
    Ok(built)
}

/// Capacity-style row `expr <= rhs`; when every term is constant the row
/// degenerates and is dropped after a feasibility check.
fn add_cap_row<F: Scalar>(
    model: &mut MilpModel<F>,
    name: String,
    coeffs: Vec<(crate::solver::VarId, F)>,
    rhs: F,
) {
    model.add_row(name, coeffs, Sense::Le, rhs);
}

/// Pin served load to the exogenous load, removing the shedding option.
/// Applying it twice changes nothing.
pub fn add_no_load_shedding<F: Scalar>(model: &mut MilpModel<F>) {
    let dims = model.meta.dims;
    for n in 0..dims.n {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    if let Some(id) = model.var(VarRole::Demand { d: DemandKind::Load, n, j, k, c }) {
                        model.problem.lower[id.0] = model.problem.upper[id.0];
                    }
                }
            }
        }
    }
    model.meta.shedding_allowed = false;
}

/// Add the disjunctive market-participation restriction: one binary per hour
/// chooses between "no shortfall, no non-grid supply" and "non-grid supply up
/// to the shortfall".
///
/// When grid investments are free, two valid inequalities pin the
/// largest-unit column from above (it only has epigraph lower bounds in the
/// base model): it never exceeds the larger of the largest preinstalled unit
/// and the investment cap, nor the largest preinstalled unit plus the cap
/// times the number of live builds. Without them the column could drift
/// upward to manufacture phantom shortfall under this restriction.
pub fn add_market_participation<F: Scalar>(
    model: &mut MilpModel<F>,
    bigm: &BigMConstants<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
) -> Result<(), FormulationError> {
    let dims = model.meta.dims;
    series.validate(horizon)?;
    for n in 0..dims.n {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    let z = model.add_var(
                        VarRole::MarketFlag { n, j, k, c },
                        format!("zm{n}_{j}_{k}_{c}"),
                        VarKind::Binary,
                        F::zero(),
                        F::one(),
                        F::zero(),
                    )?;
                    let yd_l = model.require(VarRole::Demand { d: DemandKind::Load, n, j, k, c })?;
                    let ys_b = model.require(VarRole::Supply { r: ResourceKind::Backup, n, j, k, c })?;
                    let ys_s = model.require(VarRole::Supply { r: ResourceKind::Storage, n, j, k, c })?;
                    let grid_total = model.grid_total_of(n, c);
                    let m_lo = bigm.lower;
                    let m_flag = bigm.upper_flag.at(n, j, k, c);
                    let m_supply = bigm.upper_supply.at(n, j, k);

                    // (1 - z) m_lo <= served - grid_cap
                    let mut coeffs = vec![(yd_l, F::one()), (z, m_lo)];
                    let mut rhs = m_lo;
                    grid_total.push(-F::one(), &mut coeffs, &mut rhs);
                    model.add_row(format!("market_flag_lo_{n}_{j}_{k}_{c}"), coeffs, Sense::Ge, rhs);

                    // served - grid_cap <= z m_flag
                    let mut coeffs = vec![(yd_l, F::one()), (z, -m_flag)];
                    let mut rhs = F::zero();
                    grid_total.push(-F::one(), &mut coeffs, &mut rhs);
                    model.add_row(format!("market_flag_hi_{n}_{j}_{k}_{c}"), coeffs, Sense::Le, rhs);

                    // non-grid supply <= served - grid_cap - (1 - z) m_lo
                    let mut coeffs = vec![
                        (ys_b, F::one()),
                        (ys_s, F::one()),
                        (yd_l, -F::one()),
                        (z, -m_lo),
                    ];
                    let mut rhs = -m_lo;
                    grid_total.push(F::one(), &mut coeffs, &mut rhs);
                    model.add_row(format!("market_supply_lim_{n}_{j}_{k}_{c}"), coeffs, Sense::Le, rhs);

                    // non-grid supply <= z m_supply
                    model.add_row(
                        format!("market_supply_gate_{n}_{j}_{k}_{c}"),
                        vec![(ys_b, F::one()), (ys_s, F::one()), (z, -m_supply)],
                        Sense::Le,
                        F::zero(),
                    );
                }
            }
        }
    }
    // Pin the largest-unit column from above when grid investments are free.
    if model.meta.investable.contains(&ResourceKind::Grid) {
        for n in 0..dims.n {
            let xmax = model.require(VarRole::LargestGridUnit { n })?;
            let largest_pre = model.problem.lower[xmax.0];
            let x_cap = model.problem.upper[model.require(VarRole::Invest { r: ResourceKind::Grid, n })?.0];
            model.problem.upper[xmax.0] =
                model.problem.upper[xmax.0].min(largest_pre.max(x_cap));
            // xmax <= largest_pre + cap * (number of live builds)
            let mut coeffs = vec![(xmax, F::one())];
            let lifetime = model.meta.grid_lifetime.unwrap_or(usize::MAX.min(dims.n));
            for i in window(n, lifetime) {
                if let Some(z) = model.var(VarRole::Build { r: ResourceKind::Grid, n: i }) {
                    coeffs.push((z, -x_cap));
                }
            }
            model.add_row(format!("largest_unit_link_{n}"), coeffs, Sense::Le, largest_pre);
        }
    }
    model.meta.market_restricted = true;
    Ok(())
}

/// Linear market-participation restriction for a fixed grid: non-grid supply
/// per hour is capped by the precomputed positive shortfall.
pub fn add_market_participation_fixed_grid<F: Scalar>(
    model: &mut MilpModel<F>,
    grid_totals: &[Vec<F>],
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
) -> Result<(), FormulationError> {
    if model.meta.shedding_allowed {
        return Err(FormulationError::SheddingWithFixedMarket);
    }
    for n in 0..model.meta.dims.n {
        for c in 0..model.meta.dims.c {
            if let Some(id) = model.var(VarRole::TotalGrid { n, c }) {
                if model.problem.lower[id.0] != model.problem.upper[id.0] {
                    return Err(FormulationError::GridStillFree);
                }
            }
        }
    }
    series.validate(horizon)?;
    let dims = model.meta.dims;
    for n in 0..dims.n {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    let ys_b = model.require(VarRole::Supply { r: ResourceKind::Backup, n, j, k, c })?;
                    let ys_s = model.require(VarRole::Supply { r: ResourceKind::Storage, n, j, k, c })?;
                    let shortfall =
                        (series.load.at(n, j, k) - grid_totals[n][c]).max(F::zero());
                    model.add_row(
                        format!("market_fixed_{n}_{j}_{k}_{c}"),
                        vec![(ys_b, F::one()), (ys_s, F::one())],
                        Sense::Le,
                        shortfall,
                    );
                }
            }
        }
    }
    model.meta.market_restricted = true;
    Ok(())
}

/// Fix every investment-side column to a concrete plan, leaving a pure
/// dispatch problem. Grid capacity and the largest-unit column are pinned to
/// their exact values under the plan.
pub fn fix_investments<F: Scalar>(
    model: &mut MilpModel<F>,
    plan: &InvestmentPlan<F>,
    specs: &[ResourceSpec<F>],
) -> Result<(), FormulationError> {
    plan.check_bounds(specs)
        .map_err(|e| FormulationError::PlanOutOfBounds(e.to_string()))?;
    let dims = model.meta.dims;
    for r in ResourceKind::ALL {
        let spec = find_spec(specs, r);
        for n in 0..dims.n {
            let x_val = plan.invest[r][n];
            match model.var(VarRole::Invest { r, n }) {
                Some(id) => {
                    model.problem.fix_var(id, x_val);
                    let z = model.require(VarRole::Build { r, n })?;
                    model.problem.fix_var(z, if plan.build[r][n] { F::one() } else { F::zero() });
                }
                None if x_val != F::zero() => {
                    return Err(FormulationError::PlanOutOfBounds(format!(
                        "plan invests in {r:?} but the model has no investment column for it"
                    )));
                }
                None => {}
            }
            if r != ResourceKind::Grid {
                if let Some(id) = model.var(VarRole::Total { r, n }) {
                    let spec = spec.ok_or(FormulationError::InvestableWithoutSpec(r))?;
                    model.problem.fix_var(id, installed_capacity(plan, spec, n)?);
                }
            }
        }
    }
    if let Some(grid) = find_spec(specs, ResourceKind::Grid) {
        for n in 0..dims.n {
            if let Some(id) = model.var(VarRole::LargestGridUnit { n }) {
                model.problem.fix_var(id, largest_grid_unit(plan, grid, n));
            }
            for c in 0..dims.c {
                if let Some(id) = model.var(VarRole::TotalGrid { n, c }) {
                    model.problem.fix_var(id, grid_capacity(plan, grid, n, c)?);
                }
            }
        }
    }
    Ok(())
}
