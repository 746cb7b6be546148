//! Run experiments against an instance and aggregate comparison tables.

use super::instance::{ExperimentError, Instance};
use crate::dataio::{ExperimentMetrics, ResourceTriple, ResultsFile, ScenarioEnergy};
use crate::formulation::{
    build_full_model, extract_solution, BuildConfig, BuiltModel, CycleScope, MarketMode,
};
use crate::model::{
    check_complementarity, discharge_cycles, resource_capacity, scarcity_supply_ratio,
    CostBreakdown, DemandKind, InvestmentPlan, OperationPlan, ResourceKind,
};
use crate::solver::{SolveStatus, Solution, SolverBackend};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A named experiment: the build settings layered on the shared instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDefinition {
    pub name: String,
    pub config: BuildConfig<f64>,
}

/// Everything a solved experiment produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub definition: ExperimentDefinition,
    pub status: SolveStatus,
    pub objective: f64,
    pub gap: f64,
    pub nodes: u64,
    pub wall_time_s: f64,
    pub plan: InvestmentPlan<f64>,
    pub operation: OperationPlan<f64>,
    pub breakdown: CostBreakdown<f64>,
    pub metrics: ExperimentMetrics,
    /// Hours where storage charges and discharges simultaneously (should be
    /// empty under nonnegative prices).
    pub complementarity: Vec<(usize, usize, usize, usize)>,
}

/// The suite: column outcomes in definition order; failures keep their slot.
#[derive(Debug)]
pub struct SuiteOutcome {
    pub outcomes: Vec<Result<ExperimentOutcome, (String, String)>>,
}

impl SuiteOutcome {
    pub fn results_file(&self) -> ResultsFile {
        let mut file = ResultsFile::default();
        for outcome in &self.outcomes {
            match outcome {
                Ok(o) => file.experiments.push(o.metrics.clone()),
                Err((name, error)) => file.failures.push((name.clone(), error.clone())),
            }
        }
        file
    }

    pub fn get(&self, name: &str) -> Option<&ExperimentOutcome> {
        self.outcomes.iter().find_map(|o| match o {
            Ok(o) if o.definition.name == name => Some(o),
            _ => None,
        })
    }

    pub fn all_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.is_ok())
    }
}

/// The nine standard experiments over one instance: market participation
/// off/on, investable resource sets, capacity prices, the daily cycle split,
/// and the cheap-storage pair probing buildout beyond local needs.
pub fn standard_suite(instance: &Instance) -> Vec<ExperimentDefinition> {
    let n = instance.horizon.n_periods;
    let gs = vec![ResourceKind::Grid, ResourceKind::Storage];
    let bgs = vec![ResourceKind::Backup, ResourceKind::Grid, ResourceKind::Storage];
    let base = BuildConfig::<f64> {
        market_mode: MarketMode::PeakOnly,
        investable: vec![ResourceKind::Grid],
        storage_cost_per_kwh: None,
        cycle_scope: CycleScope::Yearly,
        capacity_price_override: None,
        storage_max_invest_override: None,
        allow_load_shedding: instance.shedding_allowed,
        solver: instance.solver,
    };
    let cap = |v: f64| Some(vec![v * 12.0; n]);
    // Cheap-storage runs raise the cap well past the flattening bound so the
    // buildout question is decided by economics, not the bound itself.
    let roomy_cap = Some((instance.flatten_bound.power * 20.0).max(500.0));
    let def = |name: &str, config: BuildConfig<f64>| ExperimentDefinition {
        name: name.to_string(),
        config,
    };
    vec![
        def("exp1", base.clone()),
        def(
            "exp2",
            BuildConfig {
                investable: gs.clone(),
                ..base.clone()
            },
        ),
        def(
            "exp3",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: gs.clone(),
                capacity_price_override: cap(0.0),
                ..base.clone()
            },
        ),
        def(
            "exp4",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: gs.clone(),
                capacity_price_override: cap(3.064),
                ..base.clone()
            },
        ),
        def(
            "exp5",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: gs.clone(),
                capacity_price_override: cap(0.0),
                cycle_scope: CycleScope::Daily,
                ..base.clone()
            },
        ),
        def(
            "exp6",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: bgs.clone(),
                capacity_price_override: cap(0.0),
                ..base.clone()
            },
        ),
        def(
            "exp7",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: bgs,
                capacity_price_override: cap(3.064),
                ..base.clone()
            },
        ),
        def(
            "exp8",
            BuildConfig {
                investable: gs.clone(),
                storage_cost_per_kwh: Some(1.0),
                storage_max_invest_override: roomy_cap,
                ..base.clone()
            },
        ),
        def(
            "exp9",
            BuildConfig {
                market_mode: MarketMode::Full,
                investable: gs,
                storage_cost_per_kwh: Some(1.0),
                capacity_price_override: cap(0.0),
                storage_max_invest_override: roomy_cap,
                ..base
            },
        ),
    ]
}

/// The experiment a config file describes directly: market mode, investable
/// set, cycle scope, and capacity-price override straight from its keys.
pub fn custom_definition(config: &crate::dataio::Config, instance: &Instance) -> ExperimentDefinition {
    let market_mode = if config.market.mode == "full" {
        MarketMode::Full
    } else {
        MarketMode::PeakOnly
    };
    let investable = config
        .market
        .investable
        .iter()
        .filter_map(|r| match r.as_str() {
            "backup" => Some(ResourceKind::Backup),
            "grid" => Some(ResourceKind::Grid),
            "storage" => Some(ResourceKind::Storage),
            _ => None,
        })
        .collect();
    let cycle_scope = if config.storage.cycle_scope == "daily" {
        CycleScope::Daily
    } else {
        CycleScope::Yearly
    };
    ExperimentDefinition {
        name: "custom".into(),
        config: BuildConfig {
            market_mode,
            investable,
            storage_cost_per_kwh: None,
            cycle_scope,
            capacity_price_override: config
                .market
                .capacity_price_per_kw_month
                .map(|v| vec![v * 12.0; instance.horizon.n_periods]),
            storage_max_invest_override: None,
            allow_load_shedding: instance.shedding_allowed,
            solver: instance.solver,
        },
    }
}

/// Build, solve, validate, and measure one experiment.
pub fn run_experiment(
    instance: &Instance,
    definition: &ExperimentDefinition,
    backend: &Arc<dyn SolverBackend>,
) -> Result<ExperimentOutcome, ExperimentError> {
    let built = build_full_model(
        &instance.specs,
        &instance.storage,
        &instance.horizon,
        &instance.series,
        &definition.config,
    )?;
    let solution = backend.solve(&built.model.problem, &definition.config.solver)?;
    match solution.status {
        SolveStatus::Infeasible | SolveStatus::Unbounded => {
            return Err(ExperimentError::Infeasible {
                name: definition.name.clone(),
                detail: format!("solver status {:?}", solution.status),
            });
        }
        SolveStatus::TimeLimit => {
            return Err(ExperimentError::NoIncumbent {
                name: definition.name.clone(),
            });
        }
        SolveStatus::Optimal | SolveStatus::GapFeasible => {}
    }
    let (plan, operation, breakdown) = extract_solution(
        &built,
        &instance.storage,
        &instance.horizon,
        &instance.series,
        &solution,
    )
    .map_err(|e| match e {
        crate::formulation::FormulationError::ValidationFailed { count, first } => {
            ExperimentError::ValidationFailed {
                name: definition.name.clone(),
                count,
                first,
            }
        }
        other => ExperimentError::Formulation(other),
    })?;
    let complementarity = check_complementarity(&operation, 1e-6);
    let metrics = compute_metrics(instance, definition, &built, &solution, &plan, &operation, &breakdown)?;
    Ok(ExperimentOutcome {
        definition: definition.clone(),
        status: solution.status,
        objective: solution.objective,
        gap: solution.gap,
        nodes: solution.nodes,
        wall_time_s: solution.wall_time_s,
        plan,
        operation,
        breakdown,
        metrics,
        complementarity,
    })
}

/// Run a list of experiments with up to `parallel` worker threads (0 picks
/// the hardware parallelism). Outcomes keep definition order; a failure
/// occupies its column without stopping the others.
pub fn run_suite(
    instance: &Instance,
    definitions: &[ExperimentDefinition],
    backend: &Arc<dyn SolverBackend>,
    parallel: usize,
) -> Result<SuiteOutcome, ExperimentError> {
    let mut seen = std::collections::HashSet::new();
    for def in definitions {
        if !seen.insert(def.name.clone()) {
            return Err(ExperimentError::DuplicateExperiment(def.name.clone()));
        }
    }
    let workers = if parallel == 0 {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
    } else {
        parallel
    }
    .min(definitions.len().max(1));

    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<ExperimentOutcome, (String, String)>>> =
        (0..definitions.len()).map(|_| None).collect();
    let slot_refs: Vec<std::sync::Mutex<&mut Option<_>>> =
        slots.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= definitions.len() {
                    break;
                }
                let def = &definitions[i];
                let outcome = run_experiment(instance, def, backend)
                    .map_err(|e| (def.name.clone(), e.to_string()));
                **slot_refs[i].lock().expect("slot lock") = Some(outcome);
            });
        }
    });
    Ok(SuiteOutcome {
        outcomes: slots.into_iter().map(|s| s.expect("worker filled slot")).collect(),
    })
}

fn compute_metrics(
    instance: &Instance,
    definition: &ExperimentDefinition,
    built: &BuiltModel<f64>,
    solution: &Solution<f64>,
    plan: &InvestmentPlan<f64>,
    operation: &OperationPlan<f64>,
    breakdown: &CostBreakdown<f64>,
) -> Result<ExperimentMetrics, ExperimentError> {
    let horizon = &instance.horizon;
    let dims = horizon.dims();
    let musd = 1e-6;
    let investable = |r: ResourceKind| definition.config.investable.contains(&r);
    let per_resource = |f: &dyn Fn(ResourceKind) -> Option<f64>| ResourceTriple {
        backup: f(ResourceKind::Backup),
        grid: f(ResourceKind::Grid),
        storage: f(ResourceKind::Storage),
    };

    let capital = per_resource(&|r| investable(r).then(|| breakdown.capital[r] * musd));
    let payments = match definition.config.market_mode {
        MarketMode::PeakOnly => ResourceTriple::default(),
        MarketMode::Full => per_resource(&|r| Some(breakdown.capacity_revenue[r] * musd)),
    };
    let last = dims.n - 1;
    let terminal = per_resource(&|r| {
        Some(resource_capacity(plan, &built.specs, r, last, 0))
    });
    let invested = per_resource(&|r| {
        investable(r).then(|| plan.invest[r].iter().sum())
    });

    let years = dims.n as f64;
    let energy: Vec<ScenarioEnergy> = (0..dims.c)
        .map(|c| {
            let total = |values: &dyn Fn(usize, usize, usize) -> f64| -> f64 {
                let mut sum = 0.0;
                for n in 0..dims.n {
                    for j in 0..dims.j {
                        let w = horizon.day_weights[j];
                        for k in 0..dims.k {
                            sum += w * values(n, j, k);
                        }
                    }
                }
                sum * horizon.dt / years / 1000.0
            };
            ScenarioEnergy {
                demand_grid: total(&|n, j, k| operation.demand[DemandKind::Grid].at(n, j, k, c)),
                demand_load: total(&|n, j, k| operation.demand[DemandKind::Load].at(n, j, k, c)),
                demand_storage: total(&|n, j, k| operation.demand[DemandKind::Storage].at(n, j, k, c)),
                supply_backup: total(&|n, j, k| operation.supply[ResourceKind::Backup].at(n, j, k, c)),
                supply_grid: total(&|n, j, k| operation.supply[ResourceKind::Grid].at(n, j, k, c)),
                supply_storage: total(&|n, j, k| operation.supply[ResourceKind::Storage].at(n, j, k, c)),
            }
        })
        .collect();

    let mut cycles_avg = Vec::new();
    let mut cycles_max = Vec::new();
    for c in 0..dims.c {
        let mut sum = 0.0;
        let mut max = 0.0f64;
        for n in 0..dims.n {
            let cap = resource_capacity(plan, &built.specs, ResourceKind::Storage, n, 0);
            let cycles = discharge_cycles(operation, &instance.storage, cap, horizon, n, c)?;
            sum += cycles;
            max = max.max(cycles);
        }
        cycles_avg.push(sum / years);
        cycles_max.push(max);
    }

    let events = &instance.series.scarcity_events;
    let ratio = |kind: ResourceKind, c: usize| -> Option<f64> {
        scarcity_supply_ratio(
            operation,
            events,
            |n| resource_capacity(plan, &built.specs, kind, n, 0),
            kind,
            c,
        )
    };
    let scarcity_backup = (0..dims.c).map(|c| ratio(ResourceKind::Backup, c)).collect();
    let scarcity_storage = (0..dims.c).map(|c| ratio(ResourceKind::Storage, c)).collect();

    let operating_musd: Vec<f64> = breakdown.operating.iter().map(|&v| v * musd).collect();
    let operating_full_time = breakdown
        .operating
        .iter()
        .enumerate()
        .map(|(c, &v)| {
            let t = horizon.duration_weights[c];
            if t > 0.0 {
                v * horizon.dt / t * musd
            } else {
                0.0
            }
        })
        .collect();

    Ok(ExperimentMetrics {
        name: definition.name.clone(),
        status: format!("{:?}", solution.status).to_lowercase(),
        total_cost_musd: breakdown.total * musd,
        solve_time_s: solution.wall_time_s,
        max_mip_gap_pct: solution.gap * 100.0,
        operating_musd,
        operating_full_time_musd: operating_full_time,
        capital_musd: capital,
        capacity_payment_musd: payments,
        terminal_capacity_mw: terminal,
        total_investment_mw: invested,
        energy,
        cycles_avg,
        cycles_max,
        scarcity_backup,
        scarcity_storage,
    })
}
