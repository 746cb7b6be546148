//! Ex-post feasibility checks for candidate operations.

use super::capacity::{grid_capacity, installed_capacity};
use super::types::{
    DemandKind, ExogenousSeries, Horizon, InvestmentPlan, ResourceKind, ResourceSpec, StorageSpec,
};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Constraint families a dispatch can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintId {
    Balance,
    SupplyCap(ResourceKind),
    DemandCapGrid,
    DemandCapStorage,
    LoadBound,
    LoadEquality,
    NonNegative,
    SocBounds,
    SocTargetBound,
    SocRecursion,
    SocTerminal,
    CycleBudget,
    MarketParticipation,
}

/// Index tuple of a violated constraint; unused axes stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ViolationIndex {
    pub period: Option<usize>,
    pub day: Option<usize>,
    pub subperiod: Option<usize>,
    pub contingency: Option<usize>,
}

impl ViolationIndex {
    pub fn njkc(n: usize, j: usize, k: usize, c: usize) -> Self {
        Self {
            period: Some(n),
            day: Some(j),
            subperiod: Some(k),
            contingency: Some(c),
        }
    }

    pub fn nc(n: usize, c: usize) -> Self {
        Self {
            period: Some(n),
            contingency: Some(c),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation<F> {
    pub constraint: ConstraintId,
    pub index: ViolationIndex,
    pub residual: F,
}

/// What to check beyond the physical constraints.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions<F> {
    /// When false, served load must equal the exogenous load exactly.
    pub load_shedding: bool,
    /// When true, non-grid supply is limited to the positive shortfall of
    /// grid capacity below served load.
    pub market_participation: bool,
    /// Absolute feasibility tolerance in MW / MWh.
    pub tolerance: F,
}

impl<F: Scalar> Default for ValidateOptions<F> {
    fn default() -> Self {
        Self {
            load_shedding: false,
            market_participation: false,
            tolerance: F::of(1e-6),
        }
    }
}

fn find_spec<'a, F>(specs: &'a [ResourceSpec<F>], kind: ResourceKind) -> Option<&'a ResourceSpec<F>> {
    specs.iter().find(|s| s.kind == kind)
}

/// Capacity of `kind` in period `n`, contingency `c`; resources without a
/// spec have zero capacity.
pub fn resource_capacity<F: Scalar>(
    plan: &InvestmentPlan<F>,
    specs: &[ResourceSpec<F>],
    kind: ResourceKind,
    n: usize,
    c: usize,
) -> F {
    match find_spec(specs, kind) {
        None => F::zero(),
        Some(spec) if kind == ResourceKind::Grid => {
            grid_capacity(plan, spec, n, c).expect("grid spec")
        }
        Some(spec) => installed_capacity(plan, spec, n).expect("non-grid spec"),
    }
}

/// Check a dispatch against every operational constraint. Returns an empty
/// list iff the plan is feasible within `options.tolerance`; each record
/// carries the constraint family, the index where it failed, and the residual.
pub fn validate_operation<F: Scalar>(
    op: &super::types::OperationPlan<F>,
    plan: &InvestmentPlan<F>,
    specs: &[ResourceSpec<F>],
    storage: &StorageSpec<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
    options: &ValidateOptions<F>,
) -> Vec<Violation<F>> {
    let mut out = Vec::new();
    let eps = options.tolerance;
    let dims = horizon.dims();
    assert_eq!(op.dims(), dims, "operation dimensions must match the horizon");

    let mut push = |constraint, index, residual: F| {
        if residual > eps {
            out.push(Violation {
                constraint,
                index,
                residual,
            });
        }
    };

    for n in 0..dims.n {
        let soc_cap = storage.duration * resource_capacity(plan, specs, ResourceKind::Storage, n, 0);
        let y0 = op.soc_target[n];
        push(
            ConstraintId::SocTargetBound,
            ViolationIndex {
                period: Some(n),
                ..Default::default()
            },
            (y0 - soc_cap).max(-y0),
        );
        for c in 0..dims.c {
            let caps = [
                resource_capacity(plan, specs, ResourceKind::Backup, n, c),
                resource_capacity(plan, specs, ResourceKind::Grid, n, c),
                resource_capacity(plan, specs, ResourceKind::Storage, n, c),
            ];
            let mut throughput = F::zero();
            for j in 0..dims.j {
                let mut soc = y0;
                for k in 0..dims.k {
                    let idx = ViolationIndex::njkc(n, j, k, c);
                    let mut balance = F::zero();
                    for r in ResourceKind::ALL {
                        let v = op.supply[r].at(n, j, k, c);
                        push(ConstraintId::NonNegative, idx, -v);
                        push(ConstraintId::SupplyCap(r), idx, v - caps[r.index()]);
                        balance = balance + v;
                    }
                    for d in DemandKind::ALL {
                        let v = op.demand[d].at(n, j, k, c);
                        push(ConstraintId::NonNegative, idx, -v);
                        balance = balance - v;
                    }
                    push(ConstraintId::Balance, idx, balance.abs());
                    push(
                        ConstraintId::DemandCapGrid,
                        idx,
                        op.demand[DemandKind::Grid].at(n, j, k, c) - caps[ResourceKind::Grid.index()],
                    );
                    push(
                        ConstraintId::DemandCapStorage,
                        idx,
                        op.demand[DemandKind::Storage].at(n, j, k, c)
                            - caps[ResourceKind::Storage.index()],
                    );

                    let served = op.demand[DemandKind::Load].at(n, j, k, c);
                    let load = series.load.at(n, j, k);
                    if options.load_shedding {
                        push(ConstraintId::LoadBound, idx, served - load);
                    } else {
                        push(ConstraintId::LoadEquality, idx, (served - load).abs());
                    }

                    let charge = op.demand[DemandKind::Storage].at(n, j, k, c);
                    let discharge = op.supply[ResourceKind::Storage].at(n, j, k, c);
                    soc = soc
                        + horizon.dt * (storage.eta_charge * charge - discharge / storage.eta_discharge);
                    let stored = op.soc.at(n, j, k, c);
                    push(ConstraintId::SocRecursion, idx, (stored - soc).abs());
                    push(
                        ConstraintId::SocBounds,
                        idx,
                        (stored - soc_cap).max(-stored),
                    );
                    throughput = throughput + horizon.day_weights[j] * discharge;
                }
                push(
                    ConstraintId::SocTerminal,
                    ViolationIndex {
                        period: Some(n),
                        day: Some(j),
                        contingency: Some(c),
                        ..Default::default()
                    },
                    (op.soc.at(n, j, dims.k - 1, c) - y0).abs(),
                );
            }
            let budget = storage.cycle_limit
                * storage.duration
                * resource_capacity(plan, specs, ResourceKind::Storage, n, 0);
            push(
                ConstraintId::CycleBudget,
                ViolationIndex::nc(n, c),
                horizon.dt / storage.eta_discharge * throughput - budget,
            );

            if options.market_participation {
                for j in 0..dims.j {
                    for k in 0..dims.k {
                        let idx = ViolationIndex::njkc(n, j, k, c);
                        let shortfall = (op.demand[DemandKind::Load].at(n, j, k, c)
                            - caps[ResourceKind::Grid.index()])
                        .max(F::zero());
                        let non_grid = op.supply[ResourceKind::Backup].at(n, j, k, c)
                            + op.supply[ResourceKind::Storage].at(n, j, k, c);
                        push(ConstraintId::MarketParticipation, idx, non_grid - shortfall);
                    }
                }
            }
        }
    }
    out
}

/// Hours in which storage charges and discharges at the same time beyond
/// `tol`. The formulation omits this complementarity condition, so solved
/// plans are screened after the fact.
pub fn check_complementarity<F: Scalar>(
    op: &super::types::OperationPlan<F>,
    tol: F,
) -> Vec<(usize, usize, usize, usize)> {
    let dims = op.dims();
    let mut out = Vec::new();
    for n in 0..dims.n {
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    if op.demand[DemandKind::Storage].at(n, j, k, c) > tol
                        && op.supply[ResourceKind::Storage].at(n, j, k, c) > tol
                    {
                        out.push((n, j, k, c));
                    }
                }
            }
        }
    }
    out
}
