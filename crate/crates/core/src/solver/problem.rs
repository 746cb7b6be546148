//! Solver-facing problem, options, and solution types.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("numerical failure in {0}")]
    Numerical(String),
    #[error("no solver backend registered under '{0}'")]
    UnknownBackend(String),
    #[error("MPS parse error at line {line}: {reason}")]
    MpsParse { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Variable id into an [`LpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint<F> {
    pub name: String,
    pub coeffs: Vec<(VarId, F)>,
    pub sense: Sense,
    pub rhs: F,
}

/// A linear program / mixed-binary program in minimization form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem<F = f64> {
    pub names: Vec<String>,
    pub kinds: Vec<VarKind>,
    pub lower: Vec<F>,
    pub upper: Vec<F>,
    pub objective: Vec<F>,
    pub objective_offset: F,
    pub constraints: Vec<Constraint<F>>,
}

impl<F: Scalar> Default for LpProblem<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> LpProblem<F> {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            kinds: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            objective_offset: F::zero(),
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: F, upper: F, obj: F) -> VarId {
        let id = VarId(self.names.len());
        self.names.push(name.into());
        self.kinds.push(kind);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(obj);
        id
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, F)>,
        sense: Sense,
        rhs: F,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        });
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        (0..self.n_vars())
            .filter(|&i| self.kinds[i] == VarKind::Binary)
            .map(VarId)
            .collect()
    }

    pub fn fix_var(&mut self, id: VarId, value: F) {
        self.lower[id.0] = value;
        self.upper[id.0] = value;
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.n_vars();
        if self.kinds.len() != n
            || self.lower.len() != n
            || self.upper.len() != n
            || self.objective.len() != n
        {
            return Err(SolverError::Malformed(
                "variable arrays have inconsistent lengths".into(),
            ));
        }
        for i in 0..n {
            if self.lower[i] > self.upper[i] {
                return Err(SolverError::Malformed(format!(
                    "variable {} has lower bound above upper bound",
                    self.names[i]
                )));
            }
            if self.kinds[i] == VarKind::Binary
                && (self.lower[i] < F::zero() || self.upper[i] > F::one())
            {
                return Err(SolverError::Malformed(format!(
                    "binary variable {} must have bounds within [0, 1]",
                    self.names[i]
                )));
            }
        }
        for c in &self.constraints {
            for &(VarId(i), _) in &c.coeffs {
                if i >= n {
                    return Err(SolverError::Malformed(format!(
                        "constraint {} references unknown variable {}",
                        c.name, i
                    )));
                }
            }
        }
        Ok(())
    }

    /// Objective value of a point, including the constant offset.
    pub fn objective_value(&self, x: &[F]) -> F {
        self.objective
            .iter()
            .zip(x.iter())
            .map(|(&c, &v)| c * v)
            .sum::<F>()
            + self.objective_offset
    }
}

/// Solver controls; defaults follow the case-study settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative MIP optimality gap required for `Optimal`.
    pub mip_gap: f64,
    /// Wall-clock limit in seconds.
    pub time_limit_s: f64,
    /// Absolute primal feasibility tolerance.
    pub feasibility_tol: f64,
    /// Distance from an integer at which a value counts as integral.
    pub integrality_tol: f64,
    /// Maximum number of branch-and-bound nodes.
    pub node_limit: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            mip_gap: 1e-5,
            time_limit_s: 14_400.0,
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            node_limit: u64::MAX,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.mip_gap < 0.0
            || self.time_limit_s < 0.0
            || self.feasibility_tol < 0.0
            || self.integrality_tol < 0.0
        {
            return Err(SolverError::Malformed(
                "solver options must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Proven optimal (within the configured gap for MIPs).
    Optimal,
    /// Feasible incumbent found but a limit stopped the search first.
    GapFeasible,
    Infeasible,
    Unbounded,
    /// A limit was hit before any feasible point was found.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution<F = f64> {
    pub status: SolveStatus,
    pub values: Vec<F>,
    pub objective: F,
    /// Achieved relative MIP gap (0 for LPs solved to optimality).
    pub gap: f64,
    pub nodes: u64,
    pub wall_time_s: f64,
}

impl<F: Scalar> Solution<F> {
    pub fn empty(status: SolveStatus) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective: F::zero(),
            gap: f64::INFINITY,
            nodes: 0,
            wall_time_s: 0.0,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::GapFeasible)
    }
}
