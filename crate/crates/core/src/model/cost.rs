//! Investment and operating cost functions.

use super::capacity::installed_capacity;
use super::types::{
    ExogenousSeries, Horizon, InvestmentPlan, ResourceKind, ResourceSpec, KW_PER_MW,
};
use crate::scalar::Scalar;

/// An investment amount that no admissible build can produce: strictly between
/// zero and the minimum threshold, or above the maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InadmissibleInvestment<F> {
    pub kind: ResourceKind,
    pub period: usize,
    pub amount: F,
}

impl<F: Scalar> std::fmt::Display for InadmissibleInvestment<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "investment of {} MW in {:?} (period {}) is outside the admissible range",
            self.amount, self.kind, self.period
        )
    }
}

/// Cost of investing `x` MW in period `n` (zero-based): zero for no build,
/// `unit_cost * x + fixed_cost` inside the admissible range, and an explicit
/// inadmissibility marker otherwise — never a silent number.
pub fn investment_cost<F: Scalar>(
    x: F,
    spec: &ResourceSpec<F>,
    n: usize,
) -> Result<F, InadmissibleInvestment<F>> {
    if x == F::zero() {
        return Ok(F::zero());
    }
    if x < spec.min_invest || x > spec.max_invest {
        return Err(InadmissibleInvestment {
            kind: spec.kind,
            period: n,
            amount: x,
        });
    }
    Ok(spec.unit_cost[n] * F::of(KW_PER_MW) * x + spec.fixed_cost[n])
}

/// Total net investment cost over the horizon: investment outlays minus
/// capacity-market credits on installed non-grid capacity.
pub fn net_investment_cost<F: Scalar>(
    plan: &InvestmentPlan<F>,
    specs: &[ResourceSpec<F>],
    horizon: &Horizon<F>,
) -> Result<F, InadmissibleInvestment<F>> {
    let mut total = F::zero();
    for spec in specs {
        for n in 0..horizon.n_periods {
            total = total + investment_cost(plan.invest[spec.kind][n], spec, n)?;
            if spec.kind != ResourceKind::Grid {
                let cap = installed_capacity(plan, spec, n).expect("non-grid kind");
                total = total - spec.capacity_price[n] * F::of(KW_PER_MW) * cap;
            }
        }
    }
    Ok(total)
}

/// Duration-weighted operating cost of period `n` under contingency `c`:
/// supply purchases minus demand revenues, weighted by the scenario hours per
/// subperiod and by how many days each operating period stands for.
pub fn operating_cost<F: Scalar>(
    op: &super::types::OperationPlan<F>,
    series: &ExogenousSeries<F>,
    horizon: &Horizon<F>,
    n: usize,
    c: usize,
) -> F {
    let mut sum = F::zero();
    for j in 0..horizon.n_operating {
        let mut day = F::zero();
        for k in 0..horizon.n_subperiods {
            for (r, price) in series.supply_price.iter() {
                day = day + price.at(n, j, k) * op.supply[r].at(n, j, k, c);
            }
            for (d, price) in series.demand_price.iter() {
                day = day - price.at(n, j, k) * op.demand[d].at(n, j, k, c);
            }
        }
        sum = sum + horizon.day_weights[j] * day;
    }
    horizon.duration_weights[c] * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::types::{DemandKind, OperationPlan, PerDemand, PerResource, ScarcityEvent};
    use crate::model::Series3;

    fn storage_spec() -> ResourceSpec<f64> {
        ResourceSpec {
            kind: ResourceKind::Storage,
            unit_cost: vec![4832.0],
            fixed_cost: vec![0.0],
            min_invest: 2.0,
            max_invest: 24.0,
            lifetime: 20,
            preinstalled: vec![],
            capacity_price: vec![0.0],
        }
    }

    #[test]
    fn investment_cost_branches() {
        let spec = storage_spec();
        assert_eq!(investment_cost(0.0, &spec, 0).unwrap(), 0.0);
        // 2 MW at $4832/kW is $9.664M.
        assert_eq!(investment_cost(2.0, &spec, 0).unwrap(), 9_664_000.0);
        assert!(investment_cost(1.0, &spec, 0).is_err());
        assert!(investment_cost(25.0, &spec, 0).is_err());
    }

    #[test]
    fn net_cost_zero_for_empty_plan() {
        let horizon = Horizon::full_days(1, 1, 1, 1.0, vec![0.8]).unwrap();
        let plan = InvestmentPlan::<f64>::zeros(1);
        let specs = vec![storage_spec()];
        assert_eq!(net_investment_cost(&plan, &specs, &horizon).unwrap(), 0.0);
    }

    #[test]
    fn net_cost_subtracts_capacity_credits() {
        let horizon = Horizon::full_days(1, 1, 1, 1.0, vec![0.8]).unwrap();
        let mut spec = storage_spec();
        let mut plan = InvestmentPlan::<f64>::zeros(1);
        plan.invest[ResourceKind::Storage][0] = 2.0;
        plan.build[ResourceKind::Storage][0] = true;
        assert_eq!(
            net_investment_cost(&plan, &[spec.clone()], &horizon).unwrap(),
            9_664_000.0
        );
        // $3.064/kW-month over twelve months against the same 2 MW build.
        spec.capacity_price = vec![3.064 * 12.0];
        let got = net_investment_cost(&plan, &[spec], &horizon).unwrap();
        let want = 9_664_000.0 - 2000.0 * 3.064 * 12.0;
        assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
    }

    fn tiny_series(price: f64) -> ExogenousSeries<f64> {
        ExogenousSeries {
            load: Series3::zeros(1, 1, 1),
            supply_price: PerResource::from_fn(|r| {
                Series3::from_fn(1, 1, 1, |_, _, _| if r == ResourceKind::Grid { price } else { 0.0 })
            }),
            demand_price: PerDemand::from_fn(|d| {
                Series3::from_fn(1, 1, 1, |_, _, _| if d == DemandKind::Grid { price } else { 0.0 })
            }),
            load_shed_value: 0.0,
            scarcity_events: Vec::<ScarcityEvent>::new(),
        }
    }

    #[test]
    fn operating_cost_weighted_supply() {
        let horizon = Horizon::full_days(1, 1, 1, 1.0, vec![0.8, 0.2]).unwrap();
        let series = tiny_series(50.0);
        let mut op = OperationPlan::<f64>::zeros(horizon.dims());
        assert_eq!(operating_cost(&op, &series, &horizon, 0, 0), 0.0);
        op.supply[ResourceKind::Grid].set(0, 0, 0, 0, 10.0);
        assert_eq!(operating_cost(&op, &series, &horizon, 0, 0), 400.0);
        // Pass-through at identical supply and demand prices cancels.
        op.demand[DemandKind::Grid].set(0, 0, 0, 0, 10.0);
        assert_eq!(operating_cost(&op, &series, &horizon, 0, 0), 0.0);
    }

    #[test]
    fn net_cost_is_additive_across_periods_and_resources() {
        let horizon = Horizon::full_days(3, 1, 1, 1.0, vec![0.8]).unwrap();
        let mut storage = storage_spec();
        storage.unit_cost = vec![4832.0; 3];
        storage.fixed_cost = vec![0.0; 3];
        storage.capacity_price = vec![0.0; 3];
        let mut backup = ResourceSpec {
            kind: ResourceKind::Backup,
            ..storage.clone()
        };
        backup.unit_cost = vec![2738.0; 3];
        let specs = vec![backup, storage];

        let mut plan = InvestmentPlan::<f64>::zeros(3);
        plan.invest[ResourceKind::Storage] = vec![2.0, 0.0, 3.0];
        plan.build[ResourceKind::Storage] = vec![true, false, true];
        plan.invest[ResourceKind::Backup] = vec![0.0, 4.0, 0.0];
        plan.build[ResourceKind::Backup] = vec![false, true, false];

        let whole = net_investment_cost(&plan, &specs, &horizon).unwrap();
        let mut parts = 0.0;
        for spec in &specs {
            for n in 0..3 {
                let mut single = InvestmentPlan::<f64>::zeros(3);
                single.invest[spec.kind][n] = plan.invest[spec.kind][n];
                single.build[spec.kind][n] = plan.build[spec.kind][n];
                parts += net_investment_cost(&single, std::slice::from_ref(spec), &horizon).unwrap();
            }
        }
        assert!((whole - parts).abs() < 1e-9);
    }
}
