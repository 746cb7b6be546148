//! Reference LP/MILP solver, MPS export/import, and the backend registry.

mod backend;
mod branch;
mod mps;
mod problem;
mod reference;

pub use backend::{backend, register_backend, ReferenceBackend, SolverBackend};
pub use mps::{export_mps, parse_mps};
pub use problem::{
    Constraint, LpProblem, Sense, SolveStatus, SolverError, SolverOptions, Solution, VarId, VarKind,
};
pub use reference::{solve_lp, solve_milp};
