//! Branch and bound over binary variables with interval propagation.

use super::problem::{Sense, SolveStatus, SolverOptions};
use super::reference::{relax, Lp64, Relax};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

pub(crate) struct SearchResult {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub gap: f64,
    pub nodes: u64,
}

/// All rows in `sum a_i x_i <= rhs` form for propagation; equalities become
/// two rows.
struct PropRows {
    rows: Vec<(Vec<(usize, f64)>, f64)>,
}

impl PropRows {
    fn new(lp: &Lp64) -> Self {
        let mut rows = Vec::new();
        for (coeffs, sense, rhs) in &lp.constraints {
            if coeffs.is_empty() {
                continue;
            }
            match sense {
                Sense::Le => rows.push((coeffs.clone(), *rhs)),
                Sense::Ge => rows.push((negate(coeffs), -rhs)),
                Sense::Eq => {
                    rows.push((coeffs.clone(), *rhs));
                    rows.push((negate(coeffs), -rhs));
                }
            }
        }
        Self { rows }
    }

    /// Tighten `lower`/`upper` in place. Returns false when some row proves
    /// the box infeasible.
    fn propagate(&self, lower: &mut [f64], upper: &mut [f64], kinds_binary: &[bool], tol: f64) -> bool {
        const MAX_ROUNDS: usize = 12;
        for _ in 0..MAX_ROUNDS {
            let mut changed = false;
            for (coeffs, rhs) in &self.rows {
                // Minimum activity and the count of infinite contributions.
                let mut min_act = 0.0;
                let mut inf_count = 0;
                let mut inf_at = usize::MAX;
                for &(i, a) in coeffs {
                    let contrib = if a > 0.0 { a * lower[i] } else { a * upper[i] };
                    if contrib.is_infinite() {
                        inf_count += 1;
                        inf_at = i;
                    } else {
                        min_act += contrib;
                    }
                }
                if inf_count == 0 && min_act > rhs + tol.max(1e-9) {
                    return false;
                }
                if inf_count > 1 {
                    continue;
                }
                for &(i, a) in coeffs {
                    if inf_count == 1 && i != inf_at {
                        continue;
                    }
                    let own = if a > 0.0 { a * lower[i] } else { a * upper[i] };
                    let rest = if inf_count == 1 { min_act } else { min_act - own };
                    let slack = rhs - rest;
                    if a > 0.0 {
                        let mut new_up = slack / a;
                        if kinds_binary[i] && new_up < 1.0 - tol {
                            new_up = new_up.floor().max(0.0).min(1.0);
                        }
                        if new_up < upper[i] - 1e-9 {
                            upper[i] = new_up;
                            if upper[i] < lower[i] - tol.max(1e-9) {
                                return false;
                            }
                            changed = true;
                        }
                    } else {
                        let mut new_lo = slack / a;
                        if kinds_binary[i] && new_lo > tol {
                            new_lo = new_lo.ceil().min(1.0).max(0.0);
                        }
                        if new_lo > lower[i] + 1e-9 {
                            lower[i] = new_lo;
                            if upper[i] < lower[i] - tol.max(1e-9) {
                                return false;
                            }
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
        true
    }
}

fn negate(coeffs: &[(usize, f64)]) -> Vec<(usize, f64)> {
    coeffs.iter().map(|&(i, a)| (i, -a)).collect()
}

struct Node {
    bound: f64,
    id: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap; invert so the lowest bound pops first, with
    // the older node winning ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

pub(crate) fn branch_and_bound(
    lp: &Lp64,
    binaries: &[usize],
    options: &SolverOptions,
    start: Instant,
) -> SearchResult {
    let kinds_binary: Vec<bool> = {
        let mut v = vec![false; lp.names.len()];
        for &i in binaries {
            v[i] = true;
        }
        v
    };
    let prop = PropRows::new(lp);
    let int_tol = options.integrality_tol;

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes: u64 = 0;
    let mut next_id: u64 = 1;
    let mut worst_pruned = f64::INFINITY;
    let mut queue: BinaryHeap<Node> = BinaryHeap::new();
    queue.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        lower: lp.lower.clone(),
        upper: lp.upper.clone(),
    });
    let mut hit_limit = false;
    let mut root_unbounded = false;

    while let Some(mut node) = queue.pop() {
        if nodes >= options.node_limit || start.elapsed().as_secs_f64() > options.time_limit_s {
            hit_limit = true;
            // The popped node still counts toward the remaining bound.
            queue.push(node);
            break;
        }
        // Bound-based pruning against the incumbent with the allowed gap.
        if let Some((inc_obj, _)) = &incumbent {
            let margin = options.mip_gap * inc_obj.abs().max(1e-10);
            if node.bound >= inc_obj - margin {
                worst_pruned = worst_pruned.min(node.bound);
                continue;
            }
        }
        nodes += 1;
        if !prop.propagate(
            &mut node.lower,
            &mut node.upper,
            &kinds_binary,
            options.feasibility_tol,
        ) {
            continue;
        }
        let (objective, values) = match relax(lp, &node.lower, &node.upper, options.feasibility_tol) {
            Relax::Infeasible => continue,
            Relax::Unbounded => {
                if incumbent.is_none() {
                    root_unbounded = true;
                    break;
                }
                continue;
            }
            Relax::Optimal { objective, values } => (objective, values),
        };
        if let Some((inc_obj, _)) = &incumbent {
            let margin = options.mip_gap * inc_obj.abs().max(1e-10);
            if objective >= inc_obj - margin {
                worst_pruned = worst_pruned.min(objective);
                continue;
            }
        }
        // Most fractional binary, ties by lowest variable id.
        let mut pick: Option<(usize, f64)> = None;
        for &i in binaries {
            let v = values[i];
            let frac = (v - v.round()).abs();
            if frac > int_tol {
                let score = (v - v.floor()).min(v.ceil() - v);
                if pick.map_or(true, |(_, best)| score > best + 1e-12) {
                    pick = Some((i, score));
                }
            }
        }
        match pick {
            None => {
                // Integer feasible; snap binaries exactly.
                let mut snapped = values;
                for &i in binaries {
                    snapped[i] = snapped[i].round();
                }
                if incumbent
                    .as_ref()
                    .map_or(true, |(inc_obj, _)| objective < *inc_obj)
                {
                    incumbent = Some((objective, snapped));
                }
            }
            Some((var, _)) => {
                for fix_to in [0.0, 1.0] {
                    let mut lower = node.lower.clone();
                    let mut upper = node.upper.clone();
                    lower[var] = fix_to;
                    upper[var] = fix_to;
                    queue.push(Node {
                        bound: objective,
                        id: next_id,
                        lower,
                        upper,
                    });
                    next_id += 1;
                }
            }
        }
    }

    if root_unbounded {
        return SearchResult {
            status: SolveStatus::Unbounded,
            values: Vec::new(),
            objective: 0.0,
            gap: f64::INFINITY,
            nodes,
        };
    }

    let remaining_bound = queue
        .iter()
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min)
        .min(worst_pruned);
    match incumbent {
        Some((obj, values)) => {
            let best_bound = remaining_bound.min(obj);
            let gap = if best_bound.is_finite() {
                ((obj - best_bound) / obj.abs().max(1e-10)).max(0.0)
            } else {
                f64::INFINITY
            };
            let status = if !hit_limit || gap <= options.mip_gap {
                SolveStatus::Optimal
            } else {
                SolveStatus::GapFeasible
            };
            SearchResult {
                status,
                values,
                objective: obj,
                gap: if hit_limit { gap } else { gap.min(options.mip_gap) },
                nodes,
            }
        }
        None => SearchResult {
            status: if hit_limit {
                SolveStatus::TimeLimit
            } else {
                SolveStatus::Infeasible
            },
            values: Vec::new(),
            objective: 0.0,
            gap: f64::INFINITY,
            nodes,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::problem::{LpProblem, VarKind};
    use crate::solver::reference::to_f64;

    #[test]
    fn propagation_detects_forced_binaries() {
        // y - 10 z <= 0 with y >= 4 forces z = 1.
        let mut p = LpProblem::<f64>::new();
        let y = p.add_var("y", VarKind::Continuous, 4.0, 8.0, 0.0);
        let z = p.add_var("z", VarKind::Binary, 0.0, 1.0, 0.0);
        p.add_constraint("link", vec![(y, 1.0), (z, -10.0)], Sense::Le, 0.0);
        let lp = to_f64(&p);
        let prop = PropRows::new(&lp);
        let mut lo = lp.lower.clone();
        let mut up = lp.upper.clone();
        assert!(prop.propagate(&mut lo, &mut up, &[false, true], 1e-7));
        assert_eq!(lo[z.0], 1.0);
    }

    #[test]
    fn propagation_proves_infeasibility() {
        let mut p = LpProblem::<f64>::new();
        let x = p.add_var("x", VarKind::Continuous, 2.0, 3.0, 0.0);
        p.add_constraint("cap", vec![(x, 1.0)], Sense::Le, 1.0);
        let lp = to_f64(&p);
        let prop = PropRows::new(&lp);
        let mut lo = lp.lower.clone();
        let mut up = lp.upper.clone();
        assert!(!prop.propagate(&mut lo, &mut up, &[false], 1e-7));
    }
}
