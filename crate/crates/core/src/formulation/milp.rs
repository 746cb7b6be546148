//! Solver-agnostic MILP container with a role registry.
//!
//! Every model variable is registered under a semantic role (which resource,
//! which indices), so solutions can be unpacked without positional
//! conventions and variant toggles can edit bounds after the build.

use crate::model::{DemandKind, Dims, ResourceKind};
use crate::scalar::Scalar;
use crate::solver::{LpProblem, Sense, VarId, VarKind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum FormulationError {
    #[error("{0:?} is requested for investment but has no resource spec")]
    InvestableWithoutSpec(ResourceKind),
    #[error("model is missing the {0:?} variable")]
    MissingRole(VarRole),
    #[error("role {0:?} registered twice")]
    DuplicateRole(VarRole),
    #[error("model error: {0}")]
    Model(#[from] crate::model::ModelError),
    #[error("solver error: {0}")]
    Solver(#[from] crate::solver::SolverError),
    #[error("the linear market constraint requires load shedding to be disabled")]
    SheddingWithFixedMarket,
    #[error("grid investments must be fixed before the linear market constraint applies")]
    GridStillFree,
    #[error("investment plan violates build bounds: {0}")]
    PlanOutOfBounds(String),
    #[error("no feasible solution to extract (status {0:?})")]
    NotSolved(crate::solver::SolveStatus),
    #[error("binary {name} is fractional in the solution: {value}")]
    FractionalBinary { name: String, value: f64 },
    #[error("recomputed cost {recomputed} disagrees with solver objective {objective}")]
    ObjectiveMismatch { recomputed: f64, objective: f64 },
    #[error("extracted operation violates {count} constraints; first: {first}")]
    ValidationFailed { count: usize, first: String },
    #[error("inadmissible investment in extracted plan: {0}")]
    BadInvestment(String),
}

/// Semantic identity of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarRole {
    /// Capacity added: x[r, n].
    Invest { r: ResourceKind, n: usize },
    /// Build indicator: z[r, n].
    Build { r: ResourceKind, n: usize },
    /// Installed non-grid capacity: x_tot[r, n].
    Total { r: ResourceKind, n: usize },
    /// Installed grid capacity per contingency: x_tot_g[n, c].
    TotalGrid { n: usize, c: usize },
    /// Largest live grid unit: x_max[n].
    LargestGridUnit { n: usize },
    /// Supply dispatch: y_s[r, n, j, k, c].
    Supply {
        r: ResourceKind,
        n: usize,
        j: usize,
        k: usize,
        c: usize,
    },
    /// Demand dispatch: y_d[d, n, j, k, c].
    Demand {
        d: DemandKind,
        n: usize,
        j: usize,
        k: usize,
        c: usize,
    },
    /// State of charge: y[n, j, k, c].
    Soc { n: usize, j: usize, k: usize, c: usize },
    /// Daily state-of-charge anchor: y0[n].
    SocTarget { n: usize },
    /// Market-participation indicator: z_m[n, j, k, c].
    MarketFlag { n: usize, j: usize, k: usize, c: usize },
}

/// Non-registry facts later passes need: problem dimensions, which resources
/// have investment variables, shedding/market toggles, and the constant
/// capacity tables of resources that are not investable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta<F> {
    pub dims: Dims,
    pub investable: Vec<ResourceKind>,
    pub shedding_allowed: bool,
    pub market_restricted: bool,
    /// Constant installed capacity per period for non-investable backup and
    /// storage (index by `ResourceKind::index`).
    pub const_total: [Option<Vec<F>>; 3],
    /// Constant grid capacity `[n][c]` when grid is not investable.
    pub const_total_grid: Option<Vec<Vec<F>>>,
    /// Grid lifetime in periods, when a grid spec exists.
    pub grid_lifetime: Option<usize>,
}

/// A linear mixed-binary model plus the registry mapping roles to columns.
#[derive(Debug, Clone)]
pub struct MilpModel<F = f64> {
    pub problem: LpProblem<F>,
    pub meta: ModelMeta<F>,
    registry: HashMap<VarRole, VarId>,
}

impl<F: Scalar> MilpModel<F> {
    pub fn new(meta: ModelMeta<F>) -> Self {
        Self {
            problem: LpProblem::new(),
            meta,
            registry: HashMap::new(),
        }
    }

    pub fn add_var(
        &mut self,
        role: VarRole,
        name: impl Into<String>,
        kind: VarKind,
        lower: F,
        upper: F,
        obj: F,
    ) -> Result<VarId, FormulationError> {
        if self.registry.contains_key(&role) {
            return Err(FormulationError::DuplicateRole(role));
        }
        let id = self.problem.add_var(name, kind, lower, upper, obj);
        self.registry.insert(role, id);
        Ok(id)
    }

    pub fn var(&self, role: VarRole) -> Option<VarId> {
        self.registry.get(&role).copied()
    }

    pub fn require(&self, role: VarRole) -> Result<VarId, FormulationError> {
        self.var(role).ok_or(FormulationError::MissingRole(role))
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(VarId, F)>, sense: Sense, rhs: F) {
        self.problem.add_constraint(name, coeffs, sense, rhs);
    }

    pub fn value(&self, solution: &[F], role: VarRole) -> Result<F, FormulationError> {
        Ok(solution[self.require(role)?.0])
    }

    /// Number of binary variables currently in the model.
    pub fn binary_count(&self) -> usize {
        self.problem
            .kinds
            .iter()
            .filter(|&&k| k == VarKind::Binary)
            .count()
    }

    /// Installed-capacity handle for a non-grid resource: a column or a
    /// constant, depending on investability.
    pub fn total_of(&self, r: ResourceKind, n: usize) -> CapacityRef<F> {
        debug_assert_ne!(r, ResourceKind::Grid);
        match self.var(VarRole::Total { r, n }) {
            Some(id) => CapacityRef::Var(id),
            None => CapacityRef::Const(
                self.meta.const_total[r.index()]
                    .as_ref()
                    .map(|v| v[n])
                    .unwrap_or_else(F::zero),
            ),
        }
    }

    /// Installed-capacity handle for the grid under contingency `c`.
    pub fn grid_total_of(&self, n: usize, c: usize) -> CapacityRef<F> {
        match self.var(VarRole::TotalGrid { n, c }) {
            Some(id) => CapacityRef::Var(id),
            None => CapacityRef::Const(
                self.meta
                    .const_total_grid
                    .as_ref()
                    .map(|v| v[n][c])
                    .unwrap_or_else(F::zero),
            ),
        }
    }

    pub fn validate(&self) -> Result<(), FormulationError> {
        self.problem.validate()?;
        // The registry must be injective into the columns.
        let mut seen = vec![false; self.problem.n_vars()];
        for (&role, &VarId(i)) in &self.registry {
            if seen[i] {
                return Err(FormulationError::DuplicateRole(role));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Either a model column or a fixed capacity.
#[derive(Debug, Clone, Copy)]
pub enum CapacityRef<F> {
    Var(VarId),
    Const(F),
}

impl<F: Scalar> CapacityRef<F> {
    /// Append `factor * capacity` to a row under assembly; a constant moves
    /// to the right-hand side instead.
    pub fn push(&self, factor: F, coeffs: &mut Vec<(VarId, F)>, rhs: &mut F) {
        match *self {
            CapacityRef::Var(id) => coeffs.push((id, factor)),
            CapacityRef::Const(v) => *rhs = *rhs - factor * v,
        }
    }

    pub fn value(&self, solution: &[F]) -> F {
        match *self {
            CapacityRef::Var(id) => solution[id.0],
            CapacityRef::Const(v) => v,
        }
    }
}
