//! Pluggable solver backends.
//!
//! Backends register under a name and share the [`Solution`] semantics of the
//! reference solver. The experiment runner picks one by name from its
//! configuration; asking for an unregistered backend is a configuration
//! error, never a silent fallback. The registry is `f64`-typed because it is
//! runtime plumbing at the process boundary.

use super::problem::{LpProblem, SolverError, SolverOptions, Solution};
use super::reference;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, problem: &LpProblem<f64>, options: &SolverOptions)
        -> Result<Solution<f64>, SolverError>;
}

/// The built-in reference solver.
pub struct ReferenceBackend;

impl SolverBackend for ReferenceBackend {
    fn name(&self) -> &str {
        "reference"
    }

    fn solve(
        &self,
        problem: &LpProblem<f64>,
        options: &SolverOptions,
    ) -> Result<Solution<f64>, SolverError> {
        reference::solve_milp(problem, options)
    }
}

fn registry() -> &'static Mutex<HashMap<String, Arc<dyn SolverBackend>>> {
    static REGISTRY: OnceLock<Mutex<HashMap<String, Arc<dyn SolverBackend>>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut map: HashMap<String, Arc<dyn SolverBackend>> = HashMap::new();
        map.insert("reference".to_string(), Arc::new(ReferenceBackend));
        Mutex::new(map)
    })
}

/// Register (or replace) a backend under its own name.
pub fn register_backend(backend: Arc<dyn SolverBackend>) {
    registry()
        .lock()
        .expect("backend registry poisoned")
        .insert(backend.name().to_string(), backend);
}

/// Look up a backend by name.
pub fn backend(name: &str) -> Result<Arc<dyn SolverBackend>, SolverError> {
    registry()
        .lock()
        .expect("backend registry poisoned")
        .get(name)
        .cloned()
        .ok_or_else(|| SolverError::UnknownBackend(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::problem::{SolveStatus, VarKind};

    struct MockBackend;

    impl SolverBackend for MockBackend {
        fn name(&self) -> &str {
            "mock"
        }
        fn solve(
            &self,
            problem: &LpProblem<f64>,
            _options: &SolverOptions,
        ) -> Result<Solution<f64>, SolverError> {
            Ok(Solution {
                status: SolveStatus::Optimal,
                values: vec![0.0; problem.n_vars()],
                objective: 42.0,
                gap: 0.0,
                nodes: 0,
                wall_time_s: 0.0,
            })
        }
    }

    #[test]
    fn reference_is_registered_by_default() {
        assert_eq!(backend("reference").unwrap().name(), "reference");
    }

    #[test]
    fn unknown_backend_is_an_error() {
        assert!(matches!(
            backend("no-such-solver"),
            Err(SolverError::UnknownBackend(_))
        ));
    }

    #[test]
    fn mock_backend_round_trips() {
        register_backend(Arc::new(MockBackend));
        let b = backend("mock").unwrap();
        let mut p = LpProblem::<f64>::new();
        p.add_var("x", VarKind::Continuous, 0.0, 1.0, 1.0);
        let s = b.solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(s.objective, 42.0);
        assert_eq!(s.values.len(), 1);
    }
}
