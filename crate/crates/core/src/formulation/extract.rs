//! Unpack a solver vector into typed plans and double-entry cost accounting.

use super::build::{BuiltModel, MarketMode};
use super::milp::{FormulationError, VarRole};
use crate::model::{
    installed_capacity, investment_cost, operating_cost, validate_operation, CostBreakdown,
    DemandKind, ExogenousSeries, Horizon, InvestmentPlan, OperationPlan, PerResource,
    ResourceKind, StorageSpec, ValidateOptions, KW_PER_MW,
};
use crate::scalar::Scalar;
use crate::solver::Solution;

/// Integrality tolerance when reading binaries back.
const BINARY_TOL: f64 = 1e-6;
/// Relative agreement required between the recomputed cost and the solver
/// objective.
const OBJECTIVE_REL_TOL: f64 = 1e-6;

/// Registry-driven unpacking of a solution: returns the investment plan, the
/// dispatch, and a cost breakdown recomputed from first principles. The
/// dispatch is checked against every operational constraint and the breakdown
/// against the solver objective; a failure of either signals a builder or
/// solver bug, not bad input.
pub fn extract_solution<F: Scalar>(
    built: &BuiltModel<F>,
    storage: &StorageSpec<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
    solution: &Solution<F>,
) -> Result<(InvestmentPlan<F>, OperationPlan<F>, CostBreakdown<F>), FormulationError> {
    if !solution.is_feasible() {
        return Err(FormulationError::NotSolved(solution.status));
    }
    let model = &built.model;
    let dims = model.meta.dims;
    let values = &solution.values;
    let tol = F::of(BINARY_TOL);

    let mut plan = InvestmentPlan::zeros(dims.n);
    for r in ResourceKind::ALL {
        for n in 0..dims.n {
            let Some(z_id) = model.var(VarRole::Build { r, n }) else {
                continue;
            };
            let z_raw = values[z_id.0];
            if (z_raw - z_raw.round()).abs() > tol {
                return Err(FormulationError::FractionalBinary {
                    name: model.problem.names[z_id.0].clone(),
                    value: z_raw.as_f64(),
                });
            }
            let built_flag = z_raw.round() == F::one();
            plan.build[r][n] = built_flag;
            let x_id = model.require(VarRole::Invest { r, n })?;
            let spec = built
                .specs
                .iter()
                .find(|s| s.kind == r)
                .ok_or(FormulationError::InvestableWithoutSpec(r))?;
            let x_raw = values[x_id.0];
            // Snap solver noise onto the admissible range before accounting.
            let x = if built_flag {
                if x_raw < spec.min_invest - tol || x_raw > spec.max_invest + tol {
                    return Err(FormulationError::BadInvestment(format!(
                        "{} = {} outside [{}, {}]",
                        model.problem.names[x_id.0], x_raw, spec.min_invest, spec.max_invest
                    )));
                }
                x_raw.max(spec.min_invest).min(spec.max_invest)
            } else {
                if x_raw.abs() > tol {
                    return Err(FormulationError::BadInvestment(format!(
                        "{} = {} with no build indicator",
                        model.problem.names[x_id.0], x_raw
                    )));
                }
                F::zero()
            };
            plan.invest[r][n] = x;
        }
    }

    let mut op = OperationPlan::zeros(dims);
    let clamp = |v: F| if v < F::zero() && v > -tol { F::zero() } else { v };
    for n in 0..dims.n {
        op.soc_target[n] = clamp(model.value(values, VarRole::SocTarget { n })?);
        for j in 0..dims.j {
            for k in 0..dims.k {
                for c in 0..dims.c {
                    for r in ResourceKind::ALL {
                        op.supply[r].set(
                            n,
                            j,
                            k,
                            c,
                            clamp(model.value(values, VarRole::Supply { r, n, j, k, c })?),
                        );
                    }
                    for d in DemandKind::ALL {
                        op.demand[d].set(
                            n,
                            j,
                            k,
                            c,
                            clamp(model.value(values, VarRole::Demand { d, n, j, k, c })?),
                        );
                    }
                    op.soc
                        .set(n, j, k, c, clamp(model.value(values, VarRole::Soc { n, j, k, c })?));
                }
            }
        }
    }

    let breakdown = recompute_breakdown(built, horizon, series, &plan, &op)?;
    let objective = solution.objective.as_f64();
    let recomputed = breakdown.total.as_f64();
    let scale = objective.abs().max(1.0);
    if (recomputed - objective).abs() > OBJECTIVE_REL_TOL * scale {
        return Err(FormulationError::ObjectiveMismatch {
            recomputed,
            objective,
        });
    }

    let violations = validate_operation(
        &op,
        &plan,
        &built.specs,
        storage,
        horizon,
        series,
        &ValidateOptions {
            load_shedding: built.config.allow_load_shedding,
            market_participation: built.model.meta.market_restricted,
            tolerance: F::of(1e-6),
        },
    );
    if !violations.is_empty() {
        return Err(FormulationError::ValidationFailed {
            count: violations.len(),
            first: format!("{:?}", violations[0]),
        });
    }
    Ok((plan, op, breakdown))
}

/// Cost accounting from first principles, mirroring the objective: capital
/// from the investment cost function, capacity revenue on installed non-grid
/// capacity (already zeroed in the effective specs when the market is
/// restricted), and duration-weighted operating cost per contingency.
pub fn recompute_breakdown<F: Scalar>(
    built: &BuiltModel<F>,
    horizon: &Horizon<F>,
    series: &ExogenousSeries<F>,
    plan: &InvestmentPlan<F>,
    op: &OperationPlan<F>,
) -> Result<CostBreakdown<F>, FormulationError> {
    let mut capital = PerResource::from_fn(|_| F::zero());
    let mut revenue = PerResource::from_fn(|_| F::zero());
    for spec in &built.specs {
        for n in 0..horizon.n_periods {
            let cost = investment_cost(plan.invest[spec.kind][n], spec, n)
                .map_err(|e| FormulationError::BadInvestment(e.to_string()))?;
            capital[spec.kind] = capital[spec.kind] + cost;
            if spec.kind != ResourceKind::Grid {
                let cap = installed_capacity(plan, spec, n)?;
                revenue[spec.kind] =
                    revenue[spec.kind] + spec.capacity_price[n] * F::of(KW_PER_MW) * cap;
            }
        }
    }
    let operating = (0..horizon.n_contingencies)
        .map(|c| {
            (0..horizon.n_periods)
                .map(|n| operating_cost(op, series, horizon, n, c))
                .sum()
        })
        .collect();
    Ok(CostBreakdown::new(capital, revenue, operating))
}

/// True whether the built model included capacity-market revenue.
pub fn credits_active<F: Scalar>(built: &BuiltModel<F>) -> bool {
    built.config.market_mode == MarketMode::Full
        && built
            .specs
            .iter()
            .any(|s| s.capacity_price.iter().any(|&p| p > F::zero()))
}
