//! Domain model: types, capacity and cost functions, validation, and metrics.

mod arrays;
mod capacity;
mod cost;
mod metrics;
mod types;
mod validate;

pub use arrays::{Dims, Series3, Series4};
pub use capacity::{grid_capacity, installed_capacity, largest_grid_unit, lifetime_window_start};
pub use cost::{investment_cost, net_investment_cost, operating_cost, InadmissibleInvestment};
pub use metrics::{discharge_cycles, scarcity_supply_ratio};
pub use types::{
    CostBreakdown, DemandKind, ExogenousSeries, Horizon, InvestmentPlan, ModelError,
    OperationPlan, PerDemand, PerResource, ResourceKind, ResourceSpec, ScarcityEvent, StorageSpec,
    KW_PER_MW,
};
pub use validate::{
    check_complementarity, resource_capacity, validate_operation, ConstraintId, ValidateOptions,
    Violation, ViolationIndex,
};
