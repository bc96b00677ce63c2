//! Occurrence-weighted cost and solve loop.
//!
//! Frequently occurring variables, and the clauses containing them, get
//! proportionally larger say in the cost, steering the minimization toward
//! the constraints that are hardest to repair later. Variable weights are
//! occurrence counts normalized to mean one; a clause's weight is the sum of
//! its distinct variables' weights. The control flow is identical to the
//! unweighted [`crate::solver::solve`]; thresholding still minimizes the
//! plain falsified-clause count, so reported errors stay comparable.

use crate::matrix::InstanceMatrix;
use crate::par;
use crate::solver::{
    cost_given_sums, jacobian_given_sums, solve_loop, CancelToken, LoopWeights, SolveOutcome,
    SolverConfig,
};

/// Per-variable and per-clause weights. `w_v_raw` holds the plain occurrence
/// counts the normalized weights derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVectors {
    /// Occurrence count of each variable divided by the mean count; mean
    /// exactly one up to rounding.
    pub w_v: Vec<f64>,
    /// Sum of `w_v` over the distinct variables of each clause.
    pub w_c: Vec<f64>,
    /// Positive plus negative occurrences per variable (duplicates within a
    /// clause collapsed).
    pub w_v_raw: Vec<u32>,
}

impl WeightVectors {
    /// Unit weights: makes the weighted cost and Jacobian coincide with the
    /// unweighted ones. Exists for testing the reduction law.
    pub fn unit(num_clauses: usize, num_vars: usize) -> Self {
        WeightVectors {
            w_v: vec![1.0; num_vars],
            w_c: vec![1.0; num_clauses],
            w_v_raw: vec![1; num_vars],
        }
    }

    pub(crate) fn w_v_squared(&self) -> Vec<f64> {
        self.w_v.iter().map(|w| w * w).collect()
    }
}

/// Derives the natural occurrence weights of an instance.
pub fn compute_weights(q: &InstanceMatrix) -> WeightVectors {
    let n = q.num_vars();
    let m = q.num_clauses();
    let w_v_raw: Vec<u32> = (0..n)
        .map(|j| (q.var_pos_clauses(j).len() + q.var_neg_clauses(j).len()) as u32)
        .collect();
    let total: u64 = w_v_raw.iter().map(|&c| u64::from(c)).sum();
    debug_assert!(total > 0, "a valid instance has at least one literal");
    let mean = total as f64 / n as f64;
    let w_v: Vec<f64> = w_v_raw.iter().map(|&c| f64::from(c) / mean).collect();

    let mut w_c = vec![0.0; m];
    for (i, slot) in w_c.iter_mut().enumerate() {
        // merge the sorted polarity lists so a variable occurring with both
        // polarities contributes once
        let pos = q.clause_pos_vars(i);
        let neg = q.clause_neg_vars(i);
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < pos.len() || b < neg.len() {
            let j = match (pos.get(a), neg.get(b)) {
                (Some(&p), Some(&ng)) => {
                    if p == ng {
                        a += 1;
                        b += 1;
                        p
                    } else if p < ng {
                        a += 1;
                        p
                    } else {
                        b += 1;
                        ng
                    }
                }
                (Some(&p), None) => {
                    a += 1;
                    p
                }
                (None, Some(&ng)) => {
                    b += 1;
                    ng
                }
                (None, None) => unreachable!(),
            };
            sum += w_v[j as usize];
        }
        *slot = sum;
    }

    WeightVectors { w_v, w_c, w_v_raw }
}

/// Weighted cost: falsity of each clause scaled by its clause weight, the
/// binary penalty scaled per variable by its weight. Reduces exactly to
/// [`crate::solver::eval_cost`] under [`WeightVectors::unit`].
pub fn eval_cost_weighted(q: &InstanceMatrix, u: &[f64], w: &WeightVectors, ell: f64) -> f64 {
    assert_eq!(w.w_v.len(), q.num_vars(), "variable weight length mismatch");
    assert_eq!(w.w_c.len(), q.num_clauses(), "clause weight length mismatch");
    let c = q.clause_sums(u);
    cost_given_sums(u, &c, Some(&w.w_c), Some(&w.w_v), ell)
}

/// Jacobian of [`eval_cost_weighted`]; the penalty derivative carries the
/// squared variable weights.
pub fn eval_jacobian_weighted(
    q: &InstanceMatrix,
    u: &[f64],
    w: &WeightVectors,
    ell: f64,
) -> Vec<f64> {
    assert_eq!(w.w_v.len(), q.num_vars(), "variable weight length mismatch");
    assert_eq!(w.w_c.len(), q.num_clauses(), "clause weight length mismatch");
    let c = q.clause_sums(u);
    let w_v_sq = w.w_v_squared();
    let weights = LoopWeights { w_c: &w.w_c, w_v: &w.w_v, w_v_sq: &w_v_sq };
    let mut ind = vec![0.0; q.num_clauses()];
    let mut out = vec![0.0; q.num_vars()];
    jacobian_given_sums(q, u, &c, Some(&weights), ell, &mut ind, &mut out);
    out
}

/// The solve loop with natural occurrence weights, computed once per
/// instance before iterating. Error counts and termination are identical in
/// kind to the unweighted solve.
pub fn solve_weighted(q: &InstanceMatrix, config: &SolverConfig) -> SolveOutcome {
    solve_weighted_with_control(q, config, &CancelToken::new())
}

pub fn solve_weighted_with_control(
    q: &InstanceMatrix,
    config: &SolverConfig,
    cancel: &CancelToken,
) -> SolveOutcome {
    let w = compute_weights(q);
    let w_v_sq = w.w_v_squared();
    let weights = LoopWeights { w_c: &w.w_c, w_v: &w.w_v, w_v_sq: &w_v_sq };
    solve_loop(q, config, Some(&weights), cancel)
}

/// Mean of the normalized variable weights; one up to rounding.
pub fn mean_variable_weight(w: &WeightVectors) -> f64 {
    par::sum_indexed_seq(w.w_v.len(), |j| w.w_v[j]) / w.w_v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{verify_assignment, CnfInstance, Literal};
    use crate::solver::{eval_cost, eval_jacobian, solve, SolveStatus, SolverConfig};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn s0() -> CnfInstance {
        CnfInstance {
            num_vars: 3,
            clauses: vec![
                vec![Literal::positive(1), Literal::positive(2), Literal::negative(3)],
                vec![Literal::negative(1), Literal::negative(2)],
            ],
        }
    }

    #[test]
    fn weights_of_s0() {
        let q = InstanceMatrix::build(&s0());
        let w = compute_weights(&q);
        assert_eq!(w.w_v_raw, vec![2, 2, 1]);
        for (got, want) in w.w_v.iter().zip([1.2, 1.2, 0.6]) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        for (got, want) in w.w_c.iter().zip([3.0, 2.4]) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert_relative_eq!(mean_variable_weight(&w), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn uniform_occurrence_gives_unit_variable_weights() {
        // every clause contains all variables, so every variable occurs m times
        let q = InstanceMatrix::build(&CnfInstance {
            num_vars: 3,
            clauses: vec![
                vec![Literal::positive(1), Literal::negative(2), Literal::positive(3)],
                vec![Literal::negative(1), Literal::positive(2), Literal::negative(3)],
            ],
        });
        let w = compute_weights(&q);
        assert_eq!(w.w_v, vec![1.0, 1.0, 1.0]);
        assert_eq!(w.w_c, vec![3.0, 3.0]);
    }

    #[test]
    fn unused_variable_gets_zero_weight() {
        let q = InstanceMatrix::build(&CnfInstance {
            num_vars: 3,
            clauses: vec![vec![Literal::positive(1), Literal::negative(2)]],
        });
        let w = compute_weights(&q);
        assert_eq!(w.w_v_raw, vec![1, 1, 0]);
        assert_eq!(w.w_v[2], 0.0);
        assert_relative_eq!(mean_variable_weight(&w), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn tautological_clause_counts_its_variable_once() {
        let q = InstanceMatrix::build(&CnfInstance {
            num_vars: 1,
            clauses: vec![vec![Literal::positive(1), Literal::negative(1)]],
        });
        let w = compute_weights(&q);
        // the variable occurs twice (both polarities), mean 2, weight 1
        assert_eq!(w.w_v_raw, vec![2]);
        assert_eq!(w.w_v, vec![1.0]);
        assert_eq!(w.w_c, vec![1.0]);
    }

    #[test]
    fn weighted_cost_at_satisfying_point_is_zero() {
        let q = InstanceMatrix::build(&s0());
        let w = compute_weights(&q);
        assert_eq!(eval_cost_weighted(&q, &[1.0, 0.0, 0.0], &w, 1.0), 0.0);
    }

    #[test]
    fn weighted_cost_near_binary_point() {
        let q = InstanceMatrix::build(&s0());
        let w = compute_weights(&q);
        // falsity of the second clause weighted 2.4 plus the weighted penalty:
        // 2.4 * 0.8 + 0.5 * (1.2^2 + 1.2^2 + 0.6^2) * 0.09^2
        assert_relative_eq!(
            eval_cost_weighted(&q, &[0.9, 0.9, 0.9], &w, 1.0),
            1.933122,
            max_relative = 1e-10
        );
    }

    #[test]
    fn weighted_jacobian_near_binary_point() {
        let q = InstanceMatrix::build(&s0());
        let w = compute_weights(&q);
        let jac = eval_jacobian_weighted(&q, &[0.9, 0.9, 0.9], &w, 1.0);
        let expected = [2.29632, 2.29632, -0.02592];
        for (got, want) in jac.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn weighted_jacobian_zero_at_binary_satisfying_state() {
        let q = InstanceMatrix::build(&s0());
        let w = compute_weights(&q);
        assert_eq!(
            eval_jacobian_weighted(&q, &[1.0, 0.0, 0.0], &w, 1.0),
            vec![0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn unit_weights_reduce_to_unweighted_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let n = 24;
        let clauses: Vec<Vec<Literal>> = (0..80)
            .map(|_| {
                (0..3)
                    .map(|_| Literal::new(rng.gen_range(1..=n), rng.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        let q = InstanceMatrix::build(&CnfInstance { num_vars: n, clauses });
        let unit = WeightVectors::unit(q.num_clauses(), q.num_vars());
        for _ in 0..50 {
            let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1.4 - 0.2).collect();
            let ell = rng.gen_range(0.1..4.0);
            assert_eq!(
                eval_cost_weighted(&q, &u, &unit, ell).to_bits(),
                eval_cost(&q, &u, ell).to_bits()
            );
            let jw = eval_jacobian_weighted(&q, &u, &unit, ell);
            let ju = eval_jacobian(&q, &u, ell);
            assert!(jw.iter().zip(&ju).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn solve_weighted_s0() {
        let q = InstanceMatrix::build(&s0());
        let out = solve_weighted(&q, &SolverConfig::default());
        assert_eq!(out.status, SolveStatus::Satisfied);
        let (ok, _) = verify_assignment(&s0(), &out.assignment);
        assert!(ok);
    }

    #[test]
    fn uniform_instance_tracks_unweighted_trajectory() {
        // On a uniform-occurrence instance the clause weights are a constant
        // k, so running the weighted solve with ell scaled by k makes both
        // costs and Jacobians exact multiples of the unweighted ones; the
        // step is invariant under that common scale. Thresholded outcomes
        // must then agree while the trajectories stay numerically close.
        use crate::generator::{generate_forced_ksat, GenSpec};

        let gi = generate_forced_ksat(&GenSpec {
            num_vars: 6,
            num_clauses: 14,
            clause_len: 6,
            seed: 5,
        })
        .unwrap();
        let q = InstanceMatrix::build(&gi.cnf);
        let w = compute_weights(&q);
        assert!(w.w_v.iter().all(|&x| x == 1.0));
        assert!(w.w_c.iter().all(|&x| x == 6.0));

        let base = SolverConfig { seed: 77, max_itr: 25, max_try: 1, ..SolverConfig::default() };
        let scaled = SolverConfig { ell: 6.0 * base.ell, ..base.clone() };
        let unweighted = solve(&q, &base);
        let weighted = solve_weighted(&q, &scaled);
        assert_eq!(unweighted.status, weighted.status);
        assert_eq!(unweighted.error, weighted.error);
        assert_eq!(unweighted.iterations_total, weighted.iterations_total);
        assert_eq!(unweighted.assignment, weighted.assignment);
    }
}
