//! Reference solver: LP core plus branch and bound for binary programs.
//!
//! LP relaxations are handed to the `minilp` sparse simplex behind this
//! facade; search, bound propagation, statuses, and determinism are owned
//! here. One solve is single-threaded; distinct problems may be solved
//! concurrently.

use super::problem::{
    LpProblem, Sense, SolveStatus, SolverError, SolverOptions, Solution, VarId,
};
use crate::scalar::Scalar;
use std::time::Instant;

/// Outcome of one LP relaxation.
pub(crate) enum Relax {
    Optimal { objective: f64, values: Vec<f64> },
    Infeasible,
    Unbounded,
}

pub(crate) struct Lp64 {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub offset: f64,
    pub constraints: Vec<(Vec<(usize, f64)>, Sense, f64)>,
}

pub(crate) fn to_f64<F: Scalar>(p: &LpProblem<F>) -> Lp64 {
    Lp64 {
        names: p.names.clone(),
        lower: p.lower.iter().map(|v| v.as_f64()).collect(),
        upper: p.upper.iter().map(|v| v.as_f64()).collect(),
        objective: p.objective.iter().map(|v| v.as_f64()).collect(),
        offset: p.objective_offset.as_f64(),
        constraints: p
            .constraints
            .iter()
            .map(|c| {
                (
                    c.coeffs.iter().map(|&(VarId(i), v)| (i, v.as_f64())).collect(),
                    c.sense,
                    c.rhs.as_f64(),
                )
            })
            .collect(),
    }
}

/// Solve one LP relaxation with the given working bounds.
pub(crate) fn relax(lp: &Lp64, lower: &[f64], upper: &[f64], feas_tol: f64) -> Relax {
    if lp.names.is_empty() {
        return Relax::Optimal {
            objective: 0.0,
            values: Vec::new(),
        };
    }
    let mut problem = minilp::Problem::new(minilp::OptimizationDirection::Minimize);
    let vars: Vec<minilp::Variable> = (0..lp.names.len())
        .map(|i| lp.add_var_to(&mut problem, i, lower[i], upper[i]))
        .collect();
    for (coeffs, sense, rhs) in &lp.constraints {
        if coeffs.is_empty() {
            let ok = match sense {
                Sense::Le => 0.0 <= rhs + feas_tol,
                Sense::Ge => 0.0 >= rhs - feas_tol,
                Sense::Eq => rhs.abs() <= feas_tol,
            };
            if !ok {
                return Relax::Infeasible;
            }
            continue;
        }
        let op = match sense {
            Sense::Le => minilp::ComparisonOp::Le,
            Sense::Eq => minilp::ComparisonOp::Eq,
            Sense::Ge => minilp::ComparisonOp::Ge,
        };
        let expr: Vec<(minilp::Variable, f64)> =
            coeffs.iter().map(|&(i, v)| (vars[i], v)).collect();
        problem.add_constraint(expr.iter().copied(), op, *rhs);
    }
    match problem.solve() {
        Ok(sol) => {
            let values: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
            Relax::Optimal {
                objective: sol.objective(),
                values,
            }
        }
        Err(minilp::Error::Infeasible) => Relax::Infeasible,
        Err(minilp::Error::Unbounded) => Relax::Unbounded,
    }
}

impl Lp64 {
    fn add_var_to(&self, problem: &mut minilp::Problem, i: usize, lo: f64, up: f64) -> minilp::Variable {
        problem.add_var(self.objective[i], (lo, up))
    }
}

/// Solve a pure linear program. Binary markers are ignored (bounds still
/// apply), so this doubles as the relaxation entry point.
pub fn solve_lp<F: Scalar>(
    problem: &LpProblem<F>,
    options: &SolverOptions,
) -> Result<Solution<F>, SolverError> {
    problem.validate()?;
    options.validate()?;
    let start = Instant::now();
    let lp = to_f64(problem);
    let sol = match relax(&lp, &lp.lower, &lp.upper, options.feasibility_tol) {
        Relax::Optimal { objective, values } => Solution {
            status: SolveStatus::Optimal,
            values: values.iter().map(|&v| F::of(v)).collect(),
            objective: F::of(objective + lp.offset),
            gap: 0.0,
            nodes: 0,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        Relax::Infeasible => Solution {
            wall_time_s: start.elapsed().as_secs_f64(),
            ..Solution::empty(SolveStatus::Infeasible)
        },
        Relax::Unbounded => Solution {
            wall_time_s: start.elapsed().as_secs_f64(),
            ..Solution::empty(SolveStatus::Unbounded)
        },
    };
    Ok(sol)
}

/// Solve a mixed-binary program with branch and bound: most-fractional
/// branching with ties broken by lowest variable id, best-bound node
/// selection, and interval propagation at every node. Deterministic for a
/// fixed problem and options.
pub fn solve_milp<F: Scalar>(
    problem: &LpProblem<F>,
    options: &SolverOptions,
) -> Result<Solution<F>, SolverError> {
    problem.validate()?;
    options.validate()?;
    let binaries: Vec<usize> = problem
        .binary_ids()
        .into_iter()
        .map(|VarId(i)| i)
        .collect();
    if binaries.is_empty() {
        return solve_lp(problem, options);
    }
    let start = Instant::now();
    let lp = to_f64(problem);
    let search = super::branch::branch_and_bound(&lp, &binaries, options, start);
    Ok(Solution {
        status: search.status,
        values: search.values.iter().map(|&v| F::of(v)).collect(),
        objective: F::of(search.objective + if search.values.is_empty() { 0.0 } else { lp.offset }),
        gap: search.gap,
        nodes: search.nodes,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::problem::VarKind;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn minimizes_single_variable() {
        let mut p = LpProblem::<f64>::new();
        let x = p.add_var("x", VarKind::Continuous, 3.0, f64::INFINITY, 1.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.values[x.0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn maximization_via_negated_objective() {
        let mut p = LpProblem::<f64>::new();
        p.add_var("x", VarKind::Continuous, 0.0, 2.0, -1.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn reports_infeasible_and_unbounded() {
        let mut p = LpProblem::<f64>::new();
        let x = p.add_var("x", VarKind::Continuous, 0.0, 1.0, 1.0);
        p.add_constraint("r", vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&p, &opts()).unwrap().status, SolveStatus::Infeasible);

        let mut p = LpProblem::<f64>::new();
        p.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY, 1.0);
        assert_eq!(solve_lp(&p, &opts()).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn milp_with_fixed_binaries_reduces_to_lp() {
        let mut p = LpProblem::<f64>::new();
        let z = p.add_var("z", VarKind::Binary, 1.0, 1.0, 5.0);
        let x = p.add_var("x", VarKind::Continuous, 0.0, 10.0, 1.0);
        p.add_constraint("r", vec![(x, 1.0), (z, -4.0)], Sense::Ge, 0.0);
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 9.0).abs() < 1e-9);
    }

    #[test]
    fn knapsack_toy() {
        // max 5a + 4b + 3c s.t. 2a + 3b + c <= 4 (binary) -> a=1, c=1.
        let mut p = LpProblem::<f64>::new();
        let a = p.add_var("a", VarKind::Binary, 0.0, 1.0, -5.0);
        let b = p.add_var("b", VarKind::Binary, 0.0, 1.0, -4.0);
        let c = p.add_var("c", VarKind::Binary, 0.0, 1.0, -3.0);
        p.add_constraint("cap", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 4.0);
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective + 8.0).abs() < 1e-9);
        assert!((s.values[a.0] - 1.0).abs() < 1e-6);
        assert!(s.values[b.0] < 1e-6);
        assert!((s.values[c.0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_integer_system() {
        // x1 + x2 = 1.5 with both binary has no integer solution.
        let mut p = LpProblem::<f64>::new();
        let x1 = p.add_var("x1", VarKind::Binary, 0.0, 1.0, 1.0);
        let x2 = p.add_var("x2", VarKind::Binary, 0.0, 1.0, 1.0);
        p.add_constraint("sum", vec![(x1, 1.0), (x2, 1.0)], Sense::Eq, 1.5);
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn deterministic_resolve() {
        let mut p = LpProblem::<f64>::new();
        let vars: Vec<_> = (0..6)
            .map(|i| p.add_var(format!("z{i}"), VarKind::Binary, 0.0, 1.0, -(1.0 + i as f64 * 0.3)))
            .collect();
        let coeffs: Vec<_> = vars.iter().enumerate().map(|(i, &v)| (v, 1.0 + (i % 3) as f64)).collect();
        p.add_constraint("cap", coeffs, Sense::Le, 5.0);
        let a = solve_milp(&p, &opts()).unwrap();
        let b = solve_milp(&p, &opts()).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.nodes, b.nodes);
    }
}
