//! Daily load flattening and storage sizing.
//!
//! An idealized storage device with unlimited power and energy flattens one
//! day of load as far as round-trip losses allow. The LP optimum has a closed
//! form over sorted loads; both routes are kept and tested against each
//! other. The resulting power and energy requirements bound sensible storage
//! buildouts and feed the big-M derivation of the market-participation
//! reformulation.

use crate::model::StorageSpec;
use crate::scalar::Scalar;
use crate::solver::{solve_lp, LpProblem, Sense, SolveStatus, SolverOptions, VarKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum PeakshaveError {
    #[error("load profile must not be empty")]
    EmptyProfile,
    #[error("round-trip efficiency must lie in [0, 1], got {0}")]
    BadEfficiency(f64),
    #[error("flattening LP failed: {0}")]
    LpFailed(String),
}

/// Result of flattening one day of load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlattenResult<F = f64> {
    /// Level the peak is pushed down to (MW).
    pub flattened_peak: F,
    /// Storage charging per subperiod (MW, meter side).
    pub charge: Vec<F>,
    /// Storage discharging per subperiod (MW, meter side).
    pub discharge: Vec<F>,
    /// Power capacity needed to realize the schedule (MW).
    pub required_power: F,
    /// Energy capacity needed to realize the schedule (MWh).
    pub required_energy: F,
}

/// Power/energy sizing over a whole set of day profiles. `duration` is
/// `None` when no storage is needed at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizingBound<F = f64> {
    pub power: F,
    pub duration: Option<F>,
    pub energy: F,
}

/// Tiny secondary objective weight that makes the (non-unique) flattening
/// schedules deterministic by preferring minimal throughput.
const THROUGHPUT_WEIGHT: f64 = 1e-9;

/// Flatten one day of load. `eta_rt` is the round-trip efficiency; the
/// charge/discharge split is taken symmetric (`sqrt(eta_rt)` each side) when
/// converting schedules into an energy requirement, which is exact for
/// symmetric storage specs.
///
/// Two LP stages: the first computes the exact flattened peak, the second
/// picks, among the optimal schedules (which are far from unique), one that
/// minimizes the largest charge or discharge flow and then total throughput.
/// A single-stage tie-break would report whatever vertex the solver lands
/// on, and those routinely pile the whole recharge into one hour, inflating
/// the power requirement well past what flattening actually needs.
pub fn flatten_load<F: Scalar>(
    load: &[F],
    eta_rt: F,
    dt: F,
) -> Result<FlattenResult<F>, PeakshaveError> {
    check_inputs(load, eta_rt)?;
    let k = load.len();
    let opts = SolverOptions::default();

    // Stage 1: the flattened peak itself.
    let mut lp = LpProblem::<F>::new();
    let peak = lp.add_var("peak", VarKind::Continuous, F::neg_infinity(), F::infinity(), F::one());
    let discharge: Vec<_> = (0..k)
        .map(|i| {
            lp.add_var(format!("dis{i}"), VarKind::Continuous, F::zero(), F::infinity(), F::zero())
        })
        .collect();
    let charge: Vec<_> = (0..k)
        .map(|i| {
            lp.add_var(format!("chg{i}"), VarKind::Continuous, F::zero(), F::infinity(), F::zero())
        })
        .collect();
    for i in 0..k {
        // load - discharge + charge <= peak
        lp.add_constraint(
            format!("flat{i}"),
            vec![(peak, F::one()), (discharge[i], F::one()), (charge[i], -F::one())],
            Sense::Ge,
            load[i],
        );
    }
    // Stored energy balance over the day: eta_rt * charge >= discharge.
    let net = |charge: &[crate::solver::VarId], discharge: &[crate::solver::VarId]| {
        let mut row: Vec<_> = charge.iter().map(|&v| (v, eta_rt)).collect();
        row.extend(discharge.iter().map(|&v| (v, -F::one())));
        row
    };
    lp.add_constraint("net_store", net(&charge, &discharge), Sense::Ge, F::zero());
    let first = solve_lp(&lp, &opts).map_err(|e| PeakshaveError::LpFailed(e.to_string()))?;
    if first.status != SolveStatus::Optimal {
        return Err(PeakshaveError::LpFailed(format!("status {:?}", first.status)));
    }
    let flattened_peak = first.values[peak.0];

    // Stage 2: minimal peak flow, then minimal throughput, at that level.
    let cap = flattened_peak + F::of(1e-7) * flattened_peak.abs().max(F::one());
    let mut lp = LpProblem::<F>::new();
    let w = F::of(THROUGHPUT_WEIGHT);
    let flow = lp.add_var("maxflow", VarKind::Continuous, F::zero(), F::infinity(), F::one());
    let discharge: Vec<_> = (0..k)
        .map(|i| lp.add_var(format!("dis{i}"), VarKind::Continuous, F::zero(), F::infinity(), w))
        .collect();
    let charge: Vec<_> = (0..k)
        .map(|i| lp.add_var(format!("chg{i}"), VarKind::Continuous, F::zero(), F::infinity(), w))
        .collect();
    for i in 0..k {
        lp.add_constraint(
            format!("flat{i}"),
            vec![(discharge[i], F::one()), (charge[i], -F::one())],
            Sense::Ge,
            load[i] - cap,
        );
        lp.add_constraint(
            format!("pow_d{i}"),
            vec![(flow, F::one()), (discharge[i], -F::one())],
            Sense::Ge,
            F::zero(),
        );
        lp.add_constraint(
            format!("pow_c{i}"),
            vec![(flow, F::one()), (charge[i], -F::one())],
            Sense::Ge,
            F::zero(),
        );
    }
    lp.add_constraint("net_store", net(&charge, &discharge), Sense::Ge, F::zero());
    let second = solve_lp(&lp, &opts).map_err(|e| PeakshaveError::LpFailed(e.to_string()))?;
    if second.status != SolveStatus::Optimal {
        return Err(PeakshaveError::LpFailed(format!("status {:?}", second.status)));
    }
    let dis: Vec<F> = discharge.iter().map(|&v| second.values[v.0].max(F::zero())).collect();
    let chg: Vec<F> = charge.iter().map(|&v| second.values[v.0].max(F::zero())).collect();
    let eta_side = eta_rt.sqrt();
    let (power, energy) = size_schedule(&chg, &dis, eta_side, eta_side, dt);
    Ok(FlattenResult {
        flattened_peak,
        charge: chg,
        discharge: dis,
        required_power: power,
        required_energy: energy,
    })
}

/// Power and energy capacity needed to realize a (charge, discharge)
/// schedule with the given efficiency split: power is the largest meter-side
/// flow, energy the span of the cumulative state-of-charge (anchored so the
/// day both starts and stays within [0, energy]).
pub fn size_schedule<F: Scalar>(
    charge: &[F],
    discharge: &[F],
    eta_charge: F,
    eta_discharge: F,
    dt: F,
) -> (F, F) {
    let mut power = F::zero();
    let mut cum = F::zero();
    let mut lo = F::zero();
    let mut hi = F::zero();
    for (&c, &d) in charge.iter().zip(discharge.iter()) {
        power = power.max(c).max(d);
        cum = cum + dt * (eta_charge * c - d / eta_discharge);
        lo = lo.min(cum);
        hi = hi.max(cum);
    }
    (power, hi - lo)
}

/// Closed-form flattened peak: over loads sorted descending, the best
/// `(sum of the m largest + eta * rest) / (m + (K - m) * eta)` over integer
/// m. The whole integer range is scanned; every m yields a feasible dual
/// point, so the maximum is the LP optimum.
pub fn flattened_peak_closed_form<F: Scalar>(load: &[F], eta_rt: F) -> Result<F, PeakshaveError> {
    check_inputs(load, eta_rt)?;
    let k = load.len();
    let mut sorted: Vec<F> = load.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("loads are ordered"));
    let total: F = sorted.iter().copied().sum();
    let kf = F::of(k as f64);
    let mut best = F::neg_infinity();
    let mut head = F::zero();
    for m in 0..=k {
        if m > 0 {
            head = head + sorted[m - 1];
        }
        let mf = F::of(m as f64);
        let denom = mf + (kf - mf) * eta_rt;
        if denom <= F::zero() {
            continue;
        }
        let value = (head + eta_rt * (total - head)) / denom;
        best = best.max(value);
    }
    Ok(best)
}

/// Size storage against every day profile supplied: the largest power
/// requirement, the matching duration (largest energy over largest power),
/// and the largest energy requirement. Flat profiles need no storage, so the
/// duration is undefined rather than zero.
pub fn storage_upper_bound<F: Scalar>(
    profiles: &[Vec<F>],
    storage: &StorageSpec<F>,
    dt: F,
) -> Result<SizingBound<F>, PeakshaveError> {
    if profiles.is_empty() {
        return Err(PeakshaveError::EmptyProfile);
    }
    let mut power = F::zero();
    let mut energy = F::zero();
    for day in profiles {
        let flat = flatten_load(day, storage.roundtrip(), dt)?;
        let (p, e) = size_schedule(
            &flat.charge,
            &flat.discharge,
            storage.eta_charge,
            storage.eta_discharge,
            dt,
        );
        power = power.max(p);
        energy = energy.max(e);
    }
    let duration = if power > F::of(1e-9) {
        Some(energy / power)
    } else {
        None
    };
    Ok(SizingBound {
        power,
        duration,
        energy,
    })
}

fn check_inputs<F: Scalar>(load: &[F], eta_rt: F) -> Result<(), PeakshaveError> {
    if load.is_empty() {
        return Err(PeakshaveError::EmptyProfile);
    }
    if eta_rt < F::zero() || eta_rt > F::one() {
        return Err(PeakshaveError::BadEfficiency(eta_rt.as_f64()));
    }
    Ok(())
}
