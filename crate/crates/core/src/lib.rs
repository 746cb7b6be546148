//! Planning toolkit for battery storage in electricity distribution grids.
//!
//! The crate models a distribution company that invests in grid reinforcement,
//! backup generation, and battery storage over a multi-year horizon and
//! dispatches those resources hour by hour, with or without permission to sell
//! into wholesale and capacity markets. It provides:
//!
//! * [`model`] — domain types, capacity and cost functions, and ex-post
//!   validation and metrics for candidate solutions;
//! * [`formulation`] — a solver-agnostic MILP builder covering investment,
//!   dispatch, state-of-charge, cycle budgets, and the disjunctive
//!   market-participation restriction via big-M constants;
//! * [`peakshave`] — the load-flattening LP, its closed-form optimum, and
//!   storage sizing used for investment bounds and big-M derivation;
//! * [`solver`] — a reference LP/MILP solver (LP core, branch and bound,
//!   bound propagation), MPS export/import, and a pluggable backend registry;
//! * [`dataio`] — CSV ingestion, load scaling, representative-day reduction,
//!   configuration, and result serialization;
//! * [`experiment`] — single experiments and the nine-experiment comparison
//!   suite with report tables and plot-ready data files.
//!
//! Numeric kernels are generic over the scalar type through [`scalar::Scalar`]
//! (any `num-traits` float works); the aliases below fix `f64` for ordinary
//! use.

pub mod dataio;
pub mod experiment;
pub mod formulation;
pub mod model;
pub mod peakshave;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error wrapper.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Formulation(#[from] formulation::FormulationError),
    #[error(transparent)]
    Data(#[from] dataio::DataError),
    #[error(transparent)]
    Experiment(#[from] experiment::ExperimentError),
}

/// Concrete `f64` aliases for the generic core types.
pub mod f64types {
    pub type Horizon = crate::model::Horizon<f64>;
    pub type ResourceSpec = crate::model::ResourceSpec<f64>;
    pub type StorageSpec = crate::model::StorageSpec<f64>;
    pub type ExogenousSeries = crate::model::ExogenousSeries<f64>;
    pub type InvestmentPlan = crate::model::InvestmentPlan<f64>;
    pub type OperationPlan = crate::model::OperationPlan<f64>;
    pub type CostBreakdown = crate::model::CostBreakdown<f64>;
    pub type MilpModel = crate::formulation::MilpModel<f64>;
    pub type LpProblem = crate::solver::LpProblem<f64>;
    pub type Solution = crate::solver::Solution<f64>;
    pub type FlattenResult = crate::peakshave::FlattenResult<f64>;
}
