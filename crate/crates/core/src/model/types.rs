//! Domain types for the planning problem.

use super::arrays::{Dims, Series3, Series4};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

/// Conversion between the MW used for capacities and the kW used by unit
/// prices ($/kW, $/kW-yr).
pub const KW_PER_MW: f64 = 1000.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("invalid horizon: {0}")]
    InvalidHorizon(String),
    #[error("invalid spec for {kind:?}: {reason}")]
    InvalidSpec { kind: ResourceKind, reason: String },
    #[error("series dimensions do not match the horizon: {0}")]
    DimensionMismatch(String),
    #[error("operation applies to {expected:?} resources, got {got:?}")]
    WrongResourceKind {
        expected: ResourceKind,
        got: ResourceKind,
    },
    #[error("storage discharges {discharge} MW but installed capacity is zero (period {period}, contingency {contingency})")]
    DischargeWithoutCapacity {
        discharge: f64,
        period: usize,
        contingency: usize,
    },
}

/// Supply-side resources. Exogenous load is never a supply resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResourceKind {
    Backup,
    Grid,
    Storage,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 3] = [ResourceKind::Backup, ResourceKind::Grid, ResourceKind::Storage];

    pub fn index(self) -> usize {
        match self {
            ResourceKind::Backup => 0,
            ResourceKind::Grid => 1,
            ResourceKind::Storage => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ResourceKind::Backup => "backup",
            ResourceKind::Grid => "grid",
            ResourceKind::Storage => "storage",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            ResourceKind::Backup => "b",
            ResourceKind::Grid => "g",
            ResourceKind::Storage => "s",
        }
    }
}

/// Demand-side participants. Backup generation never appears as demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DemandKind {
    Grid,
    Load,
    Storage,
}

impl DemandKind {
    pub const ALL: [DemandKind; 3] = [DemandKind::Grid, DemandKind::Load, DemandKind::Storage];

    pub fn index(self) -> usize {
        match self {
            DemandKind::Grid => 0,
            DemandKind::Load => 1,
            DemandKind::Storage => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DemandKind::Grid => "grid",
            DemandKind::Load => "load",
            DemandKind::Storage => "storage",
        }
    }
}

/// One slot per supply resource, indexable by [`ResourceKind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerResource<T>(pub [T; 3]);

impl<T> Index<ResourceKind> for PerResource<T> {
    type Output = T;
    fn index(&self, r: ResourceKind) -> &T {
        &self.0[r.index()]
    }
}

impl<T> IndexMut<ResourceKind> for PerResource<T> {
    fn index_mut(&mut self, r: ResourceKind) -> &mut T {
        &mut self.0[r.index()]
    }
}

impl<T> PerResource<T> {
    pub fn from_fn(mut f: impl FnMut(ResourceKind) -> T) -> Self {
        Self([
            f(ResourceKind::Backup),
            f(ResourceKind::Grid),
            f(ResourceKind::Storage),
        ])
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResourceKind, &T)> {
        ResourceKind::ALL.iter().map(move |&r| (r, &self[r]))
    }
}

/// One slot per demand participant, indexable by [`DemandKind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerDemand<T>(pub [T; 3]);

impl<T> Index<DemandKind> for PerDemand<T> {
    type Output = T;
    fn index(&self, d: DemandKind) -> &T {
        &self.0[d.index()]
    }
}

impl<T> IndexMut<DemandKind> for PerDemand<T> {
    fn index_mut(&mut self, d: DemandKind) -> &mut T {
        &mut self.0[d.index()]
    }
}

impl<T> PerDemand<T> {
    pub fn from_fn(mut f: impl FnMut(DemandKind) -> T) -> Self {
        Self([f(DemandKind::Grid), f(DemandKind::Load), f(DemandKind::Storage)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (DemandKind, &T)> {
        DemandKind::ALL.iter().map(move |&d| (d, &self[d]))
    }
}

/// Index sets of the planning problem: `n_periods` planning periods (years),
/// `n_operating` operating periods (days) of `n_subperiods` subperiods (hours)
/// each, and one or two contingency scenarios. `duration_weights` are the
/// probability-weighted hours each scenario contributes per subperiod;
/// `day_weights` say how many calendar days each operating period stands for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Horizon<F = f64> {
    pub n_periods: usize,
    pub n_operating: usize,
    pub n_subperiods: usize,
    pub n_contingencies: usize,
    pub dt: F,
    pub duration_weights: Vec<F>,
    pub day_weights: Vec<F>,
}

impl<F: Scalar> Horizon<F> {
    pub fn new(
        n_periods: usize,
        n_operating: usize,
        n_subperiods: usize,
        dt: F,
        duration_weights: Vec<F>,
        day_weights: Vec<F>,
    ) -> Result<Self, ModelError> {
        if n_periods == 0 || n_operating == 0 || n_subperiods == 0 {
            return Err(ModelError::InvalidHorizon(
                "all index set sizes must be at least 1".into(),
            ));
        }
        if dt <= F::zero() {
            return Err(ModelError::InvalidHorizon("dt must be positive".into()));
        }
        if duration_weights.is_empty() || duration_weights.len() > 2 {
            return Err(ModelError::InvalidHorizon(
                "expected one or two contingency duration weights".into(),
            ));
        }
        if duration_weights.iter().any(|&t| t < F::zero()) {
            return Err(ModelError::InvalidHorizon(
                "duration weights must be nonnegative".into(),
            ));
        }
        if day_weights.len() != n_operating {
            return Err(ModelError::InvalidHorizon(format!(
                "expected {} day weights, got {}",
                n_operating,
                day_weights.len()
            )));
        }
        if day_weights.iter().any(|&w| w <= F::zero()) {
            return Err(ModelError::InvalidHorizon(
                "day weights must be positive".into(),
            ));
        }
        Ok(Self {
            n_periods,
            n_operating,
            n_subperiods,
            n_contingencies: duration_weights.len(),
            dt,
            duration_weights,
            day_weights,
        })
    }

    /// Uniform day weights (every operating period is one calendar day).
    pub fn full_days(
        n_periods: usize,
        n_operating: usize,
        n_subperiods: usize,
        dt: F,
        duration_weights: Vec<F>,
    ) -> Result<Self, ModelError> {
        let w = vec![F::one(); n_operating];
        Self::new(n_periods, n_operating, n_subperiods, dt, duration_weights, w)
    }

    pub fn dims(&self) -> Dims {
        Dims {
            n: self.n_periods,
            j: self.n_operating,
            k: self.n_subperiods,
            c: self.n_contingencies,
        }
    }

    /// Number of calendar days each planning period represents (sum of day
    /// weights; 365 at full scale).
    pub fn days_represented(&self) -> F {
        self.day_weights.iter().copied().sum()
    }
}

/// Per-resource economics and physics.
///
/// `unit_cost` is $/kW per period, `fixed_cost` $ per period, investments in
/// MW, `capacity_price` $/kW-period (zero for grid). `preinstalled` holds one
/// row per existing unit with its live capacity in each period, so retirement
/// is encoded directly in the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceSpec<F = f64> {
    pub kind: ResourceKind,
    pub unit_cost: Vec<F>,
    pub fixed_cost: Vec<F>,
    pub min_invest: F,
    pub max_invest: F,
    pub lifetime: usize,
    pub preinstalled: Vec<Vec<F>>,
    pub capacity_price: Vec<F>,
}

impl<F: Scalar> ResourceSpec<F> {
    pub fn validate(&self, n_periods: usize) -> Result<(), ModelError> {
        let fail = |reason: &str| {
            Err(ModelError::InvalidSpec {
                kind: self.kind,
                reason: reason.to_string(),
            })
        };
        if self.min_invest < F::zero() || self.min_invest > self.max_invest {
            return fail("investment bounds must satisfy 0 <= min <= max");
        }
        if self.lifetime == 0 {
            return fail("lifetime must be at least one period");
        }
        if self.unit_cost.len() != n_periods
            || self.fixed_cost.len() != n_periods
            || self.capacity_price.len() != n_periods
        {
            return fail("cost series must have one entry per planning period");
        }
        if self
            .unit_cost
            .iter()
            .chain(self.fixed_cost.iter())
            .chain(self.capacity_price.iter())
            .any(|&v| v < F::zero())
        {
            return fail("costs and prices must be nonnegative");
        }
        for unit in &self.preinstalled {
            if unit.len() != n_periods {
                return fail("preinstalled units need one capacity entry per period");
            }
            if unit.iter().any(|&v| v < F::zero()) {
                return fail("preinstalled capacities must be nonnegative");
            }
        }
        Ok(())
    }

    /// Sum of preinstalled capacity live in period `n` (zero-based).
    pub fn preinstalled_total(&self, n: usize) -> F {
        self.preinstalled.iter().map(|u| u[n]).sum()
    }

    /// Largest preinstalled unit live in period `n` (zero-based).
    pub fn preinstalled_largest(&self, n: usize) -> F {
        self.preinstalled
            .iter()
            .map(|u| u[n])
            .fold(F::zero(), F::max)
    }
}

/// Storage physics: charge/discharge efficiencies, duration (hours of storage
/// per MW of power capacity), and the warranty cycle budget per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageSpec<F = f64> {
    pub eta_charge: F,
    pub eta_discharge: F,
    pub duration: F,
    pub cycle_limit: F,
}

impl<F: Scalar> StorageSpec<F> {
    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = self.eta_charge > F::zero()
            && self.eta_charge <= F::one()
            && self.eta_discharge > F::zero()
            && self.eta_discharge <= F::one()
            && self.duration > F::zero()
            && self.cycle_limit > F::zero();
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidSpec {
                kind: ResourceKind::Storage,
                reason: "require 0 < eta <= 1, duration > 0, cycle limit > 0".into(),
            })
        }
    }

    pub fn roundtrip(&self) -> F {
        self.eta_charge * self.eta_discharge
    }
}

/// A scarcity event window: hours `k_start..k_end` of operating period `j`
/// in planning period `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScarcityEvent {
    pub period: usize,
    pub day: usize,
    pub k_start: usize,
    pub k_end: usize,
}

/// Exogenous hourly data: load, supply prices per resource, demand prices per
/// participant, the value of served load when shedding is permitted, and
/// scarcity event windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExogenousSeries<F = f64> {
    pub load: Series3<F>,
    pub supply_price: PerResource<Series3<F>>,
    pub demand_price: PerDemand<Series3<F>>,
    pub load_shed_value: F,
    pub scarcity_events: Vec<ScarcityEvent>,
}

impl<F: Scalar> ExogenousSeries<F> {
    pub fn validate(&self, horizon: &Horizon<F>) -> Result<(), ModelError> {
        let want = (
            horizon.n_periods,
            horizon.n_operating,
            horizon.n_subperiods,
        );
        if self.load.shape() != want {
            return Err(ModelError::DimensionMismatch(format!(
                "load has shape {:?}, horizon wants {:?}",
                self.load.shape(),
                want
            )));
        }
        if self.load.values().iter().any(|&v| v < F::zero()) {
            return Err(ModelError::DimensionMismatch(
                "load must be nonnegative".into(),
            ));
        }
        for (r, s) in self.supply_price.iter() {
            if s.shape() != want {
                return Err(ModelError::DimensionMismatch(format!(
                    "supply price for {:?} has shape {:?}",
                    r,
                    s.shape()
                )));
            }
        }
        for (d, s) in self.demand_price.iter() {
            if s.shape() != want {
                return Err(ModelError::DimensionMismatch(format!(
                    "demand price for {:?} has shape {:?}",
                    d,
                    s.shape()
                )));
            }
        }
        for ev in &self.scarcity_events {
            if ev.period >= horizon.n_periods
                || ev.day >= horizon.n_operating
                || ev.k_start >= ev.k_end
                || ev.k_end > horizon.n_subperiods
            {
                return Err(ModelError::DimensionMismatch(format!(
                    "scarcity event {ev:?} is outside the horizon"
                )));
            }
        }
        Ok(())
    }

    /// Largest load over all periods, days, and hours.
    pub fn max_load(&self) -> F {
        self.load.values().iter().copied().fold(F::zero(), F::max)
    }
}

/// Investment decisions: capacity added per resource and period, and the
/// matching build indicators. Installed capacities are derived through the
/// capacity functions rather than stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvestmentPlan<F = f64> {
    pub invest: PerResource<Vec<F>>,
    pub build: PerResource<Vec<bool>>,
}

impl<F: Scalar> InvestmentPlan<F> {
    pub fn zeros(n_periods: usize) -> Self {
        Self {
            invest: PerResource::from_fn(|_| vec![F::zero(); n_periods]),
            build: PerResource::from_fn(|_| vec![false; n_periods]),
        }
    }

    pub fn n_periods(&self) -> usize {
        self.invest[ResourceKind::Backup].len()
    }

    /// Check the build-indicator coupling and investment bounds against specs.
    pub fn check_bounds(&self, specs: &[ResourceSpec<F>]) -> Result<(), ModelError> {
        for spec in specs {
            let xs = &self.invest[spec.kind];
            let zs = &self.build[spec.kind];
            for (n, (&x, &z)) in xs.iter().zip(zs.iter()).enumerate() {
                let ok = if z {
                    x >= spec.min_invest && x <= spec.max_invest
                } else {
                    x == F::zero()
                };
                if !ok {
                    return Err(ModelError::InvalidSpec {
                        kind: spec.kind,
                        reason: format!("investment {x} in period {n} violates build bounds"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Dispatch decisions: supply and demand per participant and hour, the
/// state-of-charge trajectory, and the per-period state-of-charge target that
/// anchors the start and end of every operating period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationPlan<F = f64> {
    pub supply: PerResource<Series4<F>>,
    pub demand: PerDemand<Series4<F>>,
    pub soc: Series4<F>,
    pub soc_target: Vec<F>,
}

impl<F: Scalar> OperationPlan<F> {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            supply: PerResource::from_fn(|_| Series4::zeros(dims)),
            demand: PerDemand::from_fn(|_| Series4::zeros(dims)),
            soc: Series4::zeros(dims),
            soc_target: vec![F::zero(); dims.n],
        }
    }

    pub fn dims(&self) -> Dims {
        self.soc.dims()
    }

    /// Convex combination `w * self + (1 - w) * other`; panics on shape
    /// mismatch.
    pub fn blend(&self, other: &Self, w: F) -> Self {
        assert_eq!(self.dims(), other.dims());
        let dims = self.dims();
        let mix = |a: &Series4<F>, b: &Series4<F>| {
            let mut out = Series4::zeros(dims);
            for n in 0..dims.n {
                for j in 0..dims.j {
                    for k in 0..dims.k {
                        for c in 0..dims.c {
                            out.set(n, j, k, c, w * a.at(n, j, k, c) + (F::one() - w) * b.at(n, j, k, c));
                        }
                    }
                }
            }
            out
        };
        Self {
            supply: PerResource::from_fn(|r| mix(&self.supply[r], &other.supply[r])),
            demand: PerDemand::from_fn(|d| mix(&self.demand[d], &other.demand[d])),
            soc: mix(&self.soc, &other.soc),
            soc_target: self
                .soc_target
                .iter()
                .zip(other.soc_target.iter())
                .map(|(&a, &b)| w * a + (F::one() - w) * b)
                .collect(),
        }
    }
}

/// Cost accounting for a solved plan: capital outlays and capacity-market
/// revenue per resource, and operating cost per contingency scenario (already
/// duration-weighted, so the parts add up to the objective).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown<F = f64> {
    pub capital: PerResource<F>,
    pub capacity_revenue: PerResource<F>,
    pub operating: Vec<F>,
    pub total: F,
}

impl<F: Scalar> CostBreakdown<F> {
    pub fn new(capital: PerResource<F>, capacity_revenue: PerResource<F>, operating: Vec<F>) -> Self {
        let total = ResourceKind::ALL.iter().map(|&r| capital[r]).sum::<F>()
            - ResourceKind::ALL
                .iter()
                .map(|&r| capacity_revenue[r])
                .sum::<F>()
            + operating.iter().copied().sum::<F>();
        Self {
            capital,
            capacity_revenue,
            operating,
            total,
        }
    }

    pub fn zero(n_contingencies: usize) -> Self {
        Self::new(
            PerResource::from_fn(|_| F::zero()),
            PerResource::from_fn(|_| F::zero()),
            vec![F::zero(); n_contingencies],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ResourceKind) -> ResourceSpec<f64> {
        ResourceSpec {
            kind,
            unit_cost: vec![100.0; 3],
            fixed_cost: vec![0.0; 3],
            min_invest: 2.0,
            max_invest: 30.0,
            lifetime: 20,
            preinstalled: vec![],
            capacity_price: vec![0.0; 3],
        }
    }

    #[test]
    fn horizon_rejects_bad_inputs() {
        assert!(Horizon::<f64>::full_days(0, 1, 1, 1.0, vec![1.0]).is_err());
        assert!(Horizon::<f64>::full_days(1, 1, 1, 0.0, vec![1.0]).is_err());
        assert!(Horizon::<f64>::full_days(1, 1, 1, 1.0, vec![]).is_err());
        assert!(Horizon::<f64>::new(1, 2, 1, 1.0, vec![1.0], vec![1.0]).is_err());
        assert!(Horizon::<f64>::new(1, 1, 1, 1.0, vec![1.0], vec![0.0]).is_err());
        let h = Horizon::<f64>::new(2, 3, 24, 1.0, vec![0.8, 0.2], vec![1.0, 2.0, 362.0]).unwrap();
        assert_eq!(h.n_contingencies, 2);
        assert_eq!(h.days_represented(), 365.0);
    }

    #[test]
    fn spec_validation_checks_bounds_and_lengths() {
        let mut s = spec(ResourceKind::Backup);
        assert!(s.validate(3).is_ok());
        s.min_invest = 40.0;
        assert!(s.validate(3).is_err());
        let mut s = spec(ResourceKind::Storage);
        s.unit_cost = vec![1.0; 2];
        assert!(s.validate(3).is_err());
    }

    #[test]
    fn storage_spec_bounds() {
        let good: StorageSpec<f64> = StorageSpec {
            eta_charge: 0.913,
            eta_discharge: 0.913,
            duration: 8.0,
            cycle_limit: 150.0,
        };
        assert!(good.validate().is_ok());
        assert!((good.roundtrip() - 0.833569).abs() < 1e-9);
        let bad = StorageSpec { eta_charge: 0.0, ..good };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn plan_bound_check() {
        let mut plan = InvestmentPlan::<f64>::zeros(3);
        let specs = vec![spec(ResourceKind::Backup)];
        assert!(plan.check_bounds(&specs).is_ok());
        plan.invest[ResourceKind::Backup][1] = 5.0;
        assert!(plan.check_bounds(&specs).is_err()); // z still false
        plan.build[ResourceKind::Backup][1] = true;
        assert!(plan.check_bounds(&specs).is_ok());
        plan.invest[ResourceKind::Backup][1] = 1.0; // below threshold
        assert!(plan.check_bounds(&specs).is_err());
    }

    #[test]
    fn breakdown_total_identity() {
        let b = CostBreakdown::new(
            PerResource([10.0, 20.0, 30.0]),
            PerResource([1.0, 0.0, 2.0]),
            vec![5.0, 7.0],
        );
        assert_eq!(b.total, 10.0 + 20.0 + 30.0 - 3.0 + 12.0);
    }
}
