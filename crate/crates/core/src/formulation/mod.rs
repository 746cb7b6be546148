//! MILP formulation: investment, dispatch, state of charge, cycle budgets,
//! and the disjunctive market-participation restriction.

mod bigm;
mod build;
mod extract;
mod milp;

pub use bigm::{compute_bigm, BigMConstants};
pub use build::{
    add_market_participation, add_market_participation_fixed_grid, add_no_load_shedding,
    build_full_model, effective_specs, fix_investments, variable_count_formula, BuildConfig,
    BuiltModel, CycleScope, MarketMode,
};
pub use extract::{credits_active, extract_solution, recompute_breakdown};
pub use milp::{CapacityRef, FormulationError, MilpModel, ModelMeta, VarRole};
