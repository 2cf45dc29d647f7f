//! Fitness evaluation and the lexicographic solution comparator.
//!
//! The primary value couples the open-workplace count with how evenly
//! the cycle time is filled: `m * sqrt(sum_k (C - t_k)^2)` over the open
//! workplaces, where `t_k` excludes idle time. Total workload breaks
//! ties so the search prefers solutions with fewer displacements.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::BalancingSolution;
use crate::TIME_EPS;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("workplace workload {workload} exceeds cycle time {cycle_time}")]
    InfeasibleWorkload { workload: f64, cycle_time: f64 },
}

/// Scalar fitness plus the tie-break ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    /// Minimized primary objective.
    pub primary: f64,
    /// Total workload over all open workplaces (idle excluded).
    pub workload: f64,
    /// Number of open workplaces.
    pub open: usize,
}

/// Computes the primary objective from per-workplace workloads.
pub fn primary_from_workloads(workloads: &[f64], cycle_time: f64) -> Result<f64, ObjectiveError> {
    let m = workloads.len() as f64;
    let mut sq = 0.0;
    for &t in workloads {
        if t > cycle_time + TIME_EPS {
            return Err(ObjectiveError::InfeasibleWorkload {
                workload: t,
                cycle_time,
            });
        }
        sq += (cycle_time - t) * (cycle_time - t);
    }
    Ok(m * sq.sqrt())
}

/// Root of the squared cycle-time deficits, without the workplace-count
/// multiplier. Reported separately as the balance-quality criterion.
pub fn smoothness(sol: &BalancingSolution, cycle_time: f64) -> f64 {
    let sq: f64 = sol
        .workplaces()
        .map(|wp| (cycle_time - wp.workload) * (cycle_time - wp.workload))
        .sum();
    sq.sqrt()
}

/// Evaluates a decoded solution.
pub fn fitness(sol: &BalancingSolution, cycle_time: f64) -> Result<FitnessValue, ObjectiveError> {
    let workloads: Vec<f64> = sol.workplaces().map(|wp| wp.workload).collect();
    let primary = primary_from_workloads(&workloads, cycle_time)?;
    Ok(FitnessValue {
        primary,
        workload: workloads.iter().sum(),
        open: workloads.len(),
    })
}

/// Strict comparator: lower primary wins; near-equal primaries fall back
/// to the lower total workload. Returns true iff `a` is strictly better.
pub fn better(a: &FitnessValue, b: &FitnessValue) -> bool {
    if a.primary < b.primary - TIME_EPS {
        return true;
    }
    if (a.primary - b.primary).abs() <= TIME_EPS {
        return a.workload < b.workload - TIME_EPS;
    }
    false
}

/// Fitness variation fed to the swarm operators: positive on improvement
/// (the primary objective is minimized).
pub fn delta_f(old: &FitnessValue, new: &FitnessValue) -> f64 {
    old.primary - new.primary
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fv(primary: f64, workload: f64) -> FitnessValue {
        FitnessValue {
            primary,
            workload,
            open: 1,
        }
    }

    #[test]
    fn perfectly_full_single_workplace() {
        assert_eq!(primary_from_workloads(&[10.0], 10.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_two_workplaces() {
        assert_eq!(primary_from_workloads(&[10.0, 10.0], 10.0).unwrap(), 0.0);
        assert_relative_eq!(primary_from_workloads(&[10.0, 6.0], 10.0).unwrap(), 8.0);
    }

    #[test]
    fn overload_rejected() {
        assert!(primary_from_workloads(&[10.1], 10.0).is_err());
    }

    #[test]
    fn comparator_tiers() {
        assert!(better(&fv(100.0, 50.0), &fv(200.0, 10.0)));
        assert!(better(&fv(100.0, 40.0), &fv(100.0, 50.0)));
        let same = fv(100.0, 40.0);
        assert!(!better(&same, &same));
    }

    proptest! {
        /// The primary value equals m * ||C - t||_2, checked against a
        /// direct summation oracle.
        #[test]
        fn matches_norm_oracle(loads in proptest::collection::vec(0.0f64..100.0, 1..12)) {
            let c = 100.0;
            let primary = primary_from_workloads(&loads, c).unwrap();
            let oracle: f64 = loads.iter().map(|t| (c - t).powi(2)).sum::<f64>().sqrt()
                * loads.len() as f64;
            prop_assert!((primary - oracle).abs() <= 1e-9 * oracle.max(1.0));
        }

        /// Workplace ordering does not change the fitness value.
        #[test]
        fn invariant_to_workplace_order(loads in proptest::collection::vec(0.0f64..100.0, 2..12)) {
            let c = 100.0;
            let forward = primary_from_workloads(&loads, c).unwrap();
            let mut reversed = loads.clone();
            reversed.reverse();
            let backward = primary_from_workloads(&reversed, c).unwrap();
            prop_assert!((forward - backward).abs() <= 1e-9 * forward.max(1.0));
        }

        /// better() is a strict partial order on random triples (values
        /// spaced far above the comparison tolerance, as in the domain).
        #[test]
        fn strict_partial_order(
            vals in proptest::collection::vec((0u32..40, 0u32..40), 3)
        ) {
            let f: Vec<FitnessValue> = vals
                .iter()
                .map(|&(p, w)| fv(p as f64 / 4.0, w as f64 / 4.0))
                .collect();
            for x in &f {
                prop_assert!(!better(x, x));
            }
            for x in &f {
                for y in &f {
                    prop_assert!(!(better(x, y) && better(y, x)));
                }
            }
            for x in &f {
                for y in &f {
                    for z in &f {
                        if better(x, y) && better(y, z) {
                            prop_assert!(better(x, z));
                        }
                    }
                }
            }
        }
    }
}
