//! Solution metrics: equivalent discharge cycles and scarcity supply ratios.

use super::types::{Horizon, ModelError, ResourceKind, ScarcityEvent, StorageSpec};
use crate::scalar::Scalar;

/// Equivalent full discharge cycles of period `n` under contingency `c`:
/// storage-side energy throughput divided by installed energy capacity. Zero
/// capacity with zero discharge counts as zero cycles; positive discharge
/// against zero capacity is inconsistent data.
pub fn discharge_cycles<F: Scalar>(
    op: &super::types::OperationPlan<F>,
    storage: &StorageSpec<F>,
    capacity: F,
    horizon: &Horizon<F>,
    n: usize,
    c: usize,
) -> Result<F, ModelError> {
    let mut discharged = F::zero();
    for j in 0..horizon.n_operating {
        let mut day = F::zero();
        for k in 0..horizon.n_subperiods {
            day = day + op.supply[ResourceKind::Storage].at(n, j, k, c);
        }
        discharged = discharged + horizon.day_weights[j] * day;
    }
    if capacity <= F::zero() {
        if discharged <= F::of(1e-9) {
            return Ok(F::zero());
        }
        return Err(ModelError::DischargeWithoutCapacity {
            discharge: discharged.as_f64(),
            period: n,
            contingency: c,
        });
    }
    Ok(horizon.dt / storage.eta_discharge * discharged / (storage.duration * capacity))
}

/// Minimum supply ratio during scarcity events for one resource under one
/// contingency: the lowest output over all event hours divided by installed
/// capacity. `None` when there are no events in scope or no capacity.
pub fn scarcity_supply_ratio<F: Scalar>(
    op: &super::types::OperationPlan<F>,
    events: &[ScarcityEvent],
    capacity_of: impl Fn(usize) -> F,
    kind: ResourceKind,
    c: usize,
) -> Option<F> {
    let mut worst: Option<F> = None;
    for ev in events {
        let cap = capacity_of(ev.period);
        if cap <= F::zero() {
            return None;
        }
        for k in ev.k_start..ev.k_end {
            let ratio = op.supply[kind].at(ev.period, ev.day, k, c) / cap;
            worst = Some(match worst {
                None => ratio,
                Some(w) => w.min(ratio),
            });
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::types::OperationPlan;

    fn horizon() -> Horizon<f64> {
        Horizon::full_days(1, 1, 48, 1.0, vec![0.8, 0.2]).unwrap()
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
    fn zero_discharge_zero_cycles() {
        let h = horizon();
        let op = OperationPlan::<f64>::zeros(h.dims());
        assert_eq!(discharge_cycles(&op, &storage(), 6.0, &h, 0, 0).unwrap(), 0.0);
        assert_eq!(discharge_cycles(&op, &storage(), 0.0, &h, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn cycles_invert_throughput() {
        // Terminal-side discharge of eta_d * 150 * 48 MWh on 6 MW / 8 h equals
        // exactly the 150-cycle budget; half the energy gives half the cycles.
        let h = horizon();
        let mut op = OperationPlan::<f64>::zeros(h.dims());
        let per_hour = 0.913 * 150.0 * 48.0 / 48.0;
        for k in 0..48 {
            op.supply[ResourceKind::Storage].set(0, 0, k, 0, per_hour);
            op.supply[ResourceKind::Storage].set(0, 0, k, 1, per_hour / 2.0);
        }
        let c0 = discharge_cycles(&op, &storage(), 6.0, &h, 0, 0).unwrap();
        let c1 = discharge_cycles(&op, &storage(), 6.0, &h, 0, 1).unwrap();
        assert!((c0 - 150.0).abs() < 1e-9, "{c0}");
        assert!((c1 - 75.0).abs() < 1e-9, "{c1}");
    }

    #[test]
    fn discharge_without_capacity_is_an_error() {
        let h = horizon();
        let mut op = OperationPlan::<f64>::zeros(h.dims());
        op.supply[ResourceKind::Storage].set(0, 0, 0, 0, 1.0);
        assert!(discharge_cycles(&op, &storage(), 0.0, &h, 0, 0).is_err());
    }

    #[test]
    fn scarcity_ratio_minimum_and_undefined() {
        let h = horizon();
        let mut op = OperationPlan::<f64>::zeros(h.dims());
        let events = vec![ScarcityEvent {
            period: 0,
            day: 0,
            k_start: 17,
            k_end: 19,
        }];
        // Idle storage during the event.
        assert_eq!(
            scarcity_supply_ratio(&op, &events, |_| 6.0, ResourceKind::Storage, 0),
            Some(0.0)
        );
        // Full power in both hours.
        op.supply[ResourceKind::Storage].set(0, 0, 17, 0, 6.0);
        op.supply[ResourceKind::Storage].set(0, 0, 18, 0, 6.0);
        assert_eq!(
            scarcity_supply_ratio(&op, &events, |_| 6.0, ResourceKind::Storage, 0),
            Some(1.0)
        );
        // 3 of 6 MW in the worst hour.
        op.supply[ResourceKind::Storage].set(0, 0, 18, 0, 3.0);
        assert_eq!(
            scarcity_supply_ratio(&op, &events, |_| 6.0, ResourceKind::Storage, 0),
            Some(0.5)
        );
        // No capacity: undefined.
        assert_eq!(
            scarcity_supply_ratio(&op, &events, |_| 0.0, ResourceKind::Storage, 0),
            None
        );
        // No events in scope: undefined.
        assert_eq!(
            scarcity_supply_ratio(&op, &[], |_| 6.0, ResourceKind::Storage, 0),
            None
        );
    }
}
