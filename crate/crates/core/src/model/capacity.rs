//! Installed-capacity functions.
//!
//! Capacity in period `n` is everything preinstalled and still live plus all
//! investments made inside the lifetime window ending at `n`. Grid capacity is
//! additionally discounted by the largest live unit under contingency (N-1).

use super::types::{InvestmentPlan, ModelError, ResourceKind, ResourceSpec};
use crate::scalar::Scalar;

/// First period whose investment is still live in period `n`, both 1-based:
/// `max(1, n - lifetime + 1)`.
pub fn lifetime_window_start(n: usize, lifetime: usize) -> usize {
    debug_assert!(n >= 1 && lifetime >= 1);
    (n + 1).saturating_sub(lifetime).max(1)
}

/// Zero-based investment window `start..=n` for period `n` (zero-based).
pub(crate) fn window0(n: usize, lifetime: usize) -> std::ops::RangeInclusive<usize> {
    (lifetime_window_start(n + 1, lifetime) - 1)..=n
}

/// Installed capacity of a non-grid resource in period `n` (zero-based).
pub fn installed_capacity<F: Scalar>(
    plan: &InvestmentPlan<F>,
    spec: &ResourceSpec<F>,
    n: usize,
) -> Result<F, ModelError> {
    if spec.kind == ResourceKind::Grid {
        return Err(ModelError::WrongResourceKind {
            expected: ResourceKind::Storage,
            got: ResourceKind::Grid,
        });
    }
    let invested: F = window0(n, spec.lifetime)
        .map(|i| plan.invest[spec.kind][i])
        .sum();
    Ok(spec.preinstalled_total(n) + invested)
}

/// Grid capacity in period `n` under contingency `c` (zero-based period,
/// c in {0, 1}). With `c = 1` the largest live unit — preinstalled or
/// invested — is subtracted.
pub fn grid_capacity<F: Scalar>(
    plan: &InvestmentPlan<F>,
    spec: &ResourceSpec<F>,
    n: usize,
    c: usize,
) -> Result<F, ModelError> {
    if spec.kind != ResourceKind::Grid {
        return Err(ModelError::WrongResourceKind {
            expected: ResourceKind::Grid,
            got: spec.kind,
        });
    }
    let window = window0(n, spec.lifetime);
    let invested: F = window.clone().map(|i| plan.invest[ResourceKind::Grid][i]).sum();
    let total = spec.preinstalled_total(n) + invested;
    if c == 0 {
        return Ok(total);
    }
    Ok(total - largest_grid_unit(plan, spec, n))
}

/// Largest live grid unit in period `n` (zero-based): the bigger of the
/// largest live preinstalled unit and the largest live investment.
pub fn largest_grid_unit<F: Scalar>(
    plan: &InvestmentPlan<F>,
    spec: &ResourceSpec<F>,
    n: usize,
) -> F {
    let largest_invest = window0(n, spec.lifetime)
        .map(|i| plan.invest[ResourceKind::Grid][i])
        .fold(F::zero(), F::max);
    spec.preinstalled_largest(n).max(largest_invest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::types::InvestmentPlan;

    fn grid_spec(n_periods: usize, preinstalled: Vec<Vec<f64>>, lifetime: usize) -> ResourceSpec<f64> {
        ResourceSpec {
            kind: ResourceKind::Grid,
            unit_cost: vec![0.0; n_periods],
            fixed_cost: vec![0.0; n_periods],
            min_invest: 0.0,
            max_invest: 100.0,
            lifetime,
            preinstalled,
            capacity_price: vec![0.0; n_periods],
        }
    }

    fn storage_spec(n_periods: usize, preinstalled: Vec<Vec<f64>>, lifetime: usize) -> ResourceSpec<f64> {
        ResourceSpec {
            kind: ResourceKind::Storage,
            preinstalled,
            ..grid_spec(n_periods, vec![], lifetime)
        }
    }

    #[test]
    fn window_start_clamps_at_one() {
        assert_eq!(lifetime_window_start(1, 20), 1);
        assert_eq!(lifetime_window_start(21, 20), 2);
        assert_eq!(lifetime_window_start(40, 40), 1);
    }

    #[test]
    fn non_grid_capacity_respects_lifetime() {
        // One 6 MW build in the first period, 20-year lifetime, no preinstalled.
        let n_periods = 25;
        let spec = storage_spec(n_periods, vec![], 20);
        let mut plan = InvestmentPlan::<f64>::zeros(n_periods);
        plan.invest[ResourceKind::Storage][0] = 6.0;
        plan.build[ResourceKind::Storage][0] = true;
        assert_eq!(installed_capacity(&plan, &spec, 19).unwrap(), 6.0);
        assert_eq!(installed_capacity(&plan, &spec, 20).unwrap(), 0.0);
    }

    #[test]
    fn preinstalled_retirement_via_data() {
        // 6 MW preinstalled unit live through period index 13 (the 14th year).
        let n_periods = 20;
        let unit: Vec<f64> = (0..n_periods).map(|n| if n < 14 { 6.0 } else { 0.0 }).collect();
        let spec = storage_spec(n_periods, vec![unit], 20);
        let plan = InvestmentPlan::<f64>::zeros(n_periods);
        assert_eq!(installed_capacity(&plan, &spec, 13).unwrap(), 6.0);
        assert_eq!(installed_capacity(&plan, &spec, 14).unwrap(), 0.0);
    }

    #[test]
    fn overlapping_investment_window() {
        let spec = storage_spec(3, vec![], 2);
        let mut plan = InvestmentPlan::<f64>::zeros(3);
        plan.invest[ResourceKind::Storage] = vec![3.0, 4.0, 5.0];
        plan.build[ResourceKind::Storage] = vec![true, true, true];
        // Window for the third period covers the last two builds only.
        assert_eq!(installed_capacity(&plan, &spec, 2).unwrap(), 9.0);
    }

    #[test]
    fn grid_contingency_discounts_largest_unit() {
        let n_periods = 3;
        let spec = grid_spec(
            n_periods,
            vec![vec![36.0; n_periods], vec![38.0; n_periods]],
            40,
        );
        let plan = InvestmentPlan::<f64>::zeros(n_periods);
        assert_eq!(grid_capacity(&plan, &spec, 0, 1).unwrap(), 36.0);
        assert_eq!(grid_capacity(&plan, &spec, 0, 0).unwrap(), 74.0);
    }

    #[test]
    fn grid_contingency_counts_largest_investment() {
        let spec = grid_spec(3, vec![], 40);
        let mut plan = InvestmentPlan::<f64>::zeros(3);
        plan.invest[ResourceKind::Grid] = vec![10.0, 20.0, 0.0];
        plan.build[ResourceKind::Grid] = vec![true, true, false];
        assert_eq!(grid_capacity(&plan, &spec, 1, 1).unwrap(), 10.0);
    }

    #[test]
    fn wrong_kind_is_an_error() {
        let spec = grid_spec(1, vec![], 40);
        let plan = InvestmentPlan::<f64>::zeros(1);
        assert!(installed_capacity(&plan, &spec, 0).is_err());
        let sspec = storage_spec(1, vec![], 20);
        assert!(grid_capacity(&plan, &sspec, 0, 0).is_err());
    }
}
