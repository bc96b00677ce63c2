//! The Newton-iteration solve loop.
//!
//! The cost of a relaxed state u in R^n is
//!
//! ```text
//! J(u) = sum_i (1 - min(c_i, 1)) + (ell/2) * sum_j (u_j (1 - u_j))^2
//! ```
//!
//! where `c_i` is clause i's sum of literal truth values. The first term is a
//! continuous count of falsified clauses, the second a penalty pulling the
//! state toward binary vectors; J(u) = 0 exactly at binary satisfying
//! assignments. Each iteration takes a Newton-style step
//! `u <- u - (J / |g|^2) g` along the Jacobian g, thresholds the state to a
//! binary candidate by grid search, and exits as soon as the candidate
//! satisfies every clause. Stalled runs are restarted by mixing the state
//! with fresh uniform noise.
//!
//! All randomness comes from one ChaCha8 stream seeded by
//! [`SolverConfig::seed`]: the initial state is drawn componentwise first,
//! then each perturbation vector componentwise in the order the
//! perturbations occur. Given the same matrix and config, a solve is fully
//! deterministic (timing aside), with or without the `parallel` feature.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::Assignment;
use crate::matrix::InstanceMatrix;
use crate::par;

/// Deterministic generator used for initialization and perturbation.
pub type SolverRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Penalty coefficient, > 0.
    pub ell: f64,
    /// Perturbation mix in [0, 1]; 0 keeps the state, 1 redraws it.
    pub beta: f64,
    /// Newton iterations per try.
    pub max_itr: usize,
    /// Restart budget.
    pub max_try: usize,
    /// Number of evenly spaced candidate thresholds.
    pub grid_levels: usize,
    /// Minimum squared Jacobian norm for a step; below it the state is
    /// perturbed instead of divided by a vanishing denominator.
    pub step_guard: f64,
    pub seed: u64,
    /// Iterations between threshold searches (1 = every iteration).
    pub threshold_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            ell: 1.0,
            beta: 0.5,
            max_itr: 500,
            max_try: 100,
            grid_levels: 200,
            step_guard: 1e-12,
            seed: 0,
            threshold_stride: 1,
        }
    }
}

impl SolverConfig {
    fn validate(&self) {
        assert!(self.ell > 0.0 && self.ell.is_finite(), "ell must be positive");
        assert!((0.0..=1.0).contains(&self.beta), "beta must lie in [0, 1]");
        assert!(self.max_itr >= 1, "max_itr must be >= 1");
        assert!(self.max_try >= 1, "max_try must be >= 1");
        assert!(self.grid_levels >= 1, "grid_levels must be >= 1");
        assert!(self.step_guard > 0.0, "step_guard must be positive");
        assert!(self.threshold_stride >= 1, "threshold_stride must be >= 1");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// A verified satisfying assignment was found.
    Satisfied,
    /// The iteration/restart budget (or a deadline) ran out; the returned
    /// assignment is the best one seen.
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Best binary assignment found.
    pub assignment: Assignment,
    /// Number of clauses the returned assignment falsifies.
    pub error: usize,
    /// Restarts entered (1-based count of tries).
    pub tries_used: usize,
    /// Newton iterations across all tries.
    pub iterations_total: u64,
    pub wall_time: Duration,
    /// Threshold that produced the returned assignment.
    pub final_theta: f64,
}

/// Cooperative cancellation checked once per iteration: an optional shared
/// flag (portfolio mode) and an optional deadline.
#[derive(Debug, Clone, Default)]
pub struct CancelToken {
    flag: Option<Arc<AtomicBool>>,
    deadline: Option<Instant>,
}

impl CancelToken {
    pub fn new() -> Self {
        CancelToken::default()
    }

    pub fn with_flag(mut self, flag: Arc<AtomicBool>) -> Self {
        self.flag = Some(flag);
        self
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn cancelled(&self) -> bool {
        if let Some(flag) = &self.flag {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return true;
            }
        }
        false
    }
}

/// Optional per-clause and per-variable weights threaded through the shared
/// solve loop. `w_v_sq` caches the squared variable weights of the penalty
/// derivative.
pub(crate) struct LoopWeights<'a> {
    pub w_c: &'a [f64],
    pub w_v: &'a [f64],
    pub w_v_sq: &'a [f64],
}

pub(crate) fn cost_given_sums(
    u: &[f64],
    c: &[f64],
    w_c: Option<&[f64]>,
    w_v: Option<&[f64]>,
    ell: f64,
) -> f64 {
    let clause_term = match w_c {
        None => par::sum_indexed(c.len(), |i| 1.0 - c[i].min(1.0)),
        Some(w) => par::sum_indexed(c.len(), |i| w[i] * (1.0 - c[i].min(1.0))),
    };
    let penalty = match w_v {
        None => par::sum_indexed(u.len(), |j| {
            let d = u[j] * (1.0 - u[j]);
            d * d
        }),
        Some(w) => par::sum_indexed(u.len(), |j| {
            let d = w[j] * (u[j] * (1.0 - u[j]));
            d * d
        }),
    };
    clause_term + (0.5 * ell) * penalty
}

/// Cost of a relaxed state. Always >= 0; exactly 0 iff the state is a binary
/// satisfying assignment.
pub fn eval_cost(q: &InstanceMatrix, u: &[f64], ell: f64) -> f64 {
    assert!(ell > 0.0, "ell must be positive");
    let c = q.clause_sums(u);
    cost_given_sums(u, &c, None, None, ell)
}

#[doc(hidden)]
pub fn eval_cost_seq(q: &InstanceMatrix, u: &[f64], ell: f64) -> f64 {
    let mut c = vec![0.0; q.num_clauses()];
    q.clause_sums_seq_into(u, &mut c);
    let clause_term = par::sum_indexed_seq(c.len(), |i| 1.0 - c[i].min(1.0));
    let penalty = par::sum_indexed_seq(u.len(), |j| {
        let d = u[j] * (1.0 - u[j]);
        d * d
    });
    clause_term + (0.5 * ell) * penalty
}

pub(crate) fn jacobian_given_sums(
    q: &InstanceMatrix,
    u: &[f64],
    c: &[f64],
    weights: Option<&LoopWeights<'_>>,
    ell: f64,
    indicator_buf: &mut [f64],
    out: &mut [f64],
) {
    // strict indicator of clause sums below one, optionally clause-weighted
    match weights {
        None => par::fill_indexed(indicator_buf, |i| if c[i] < 1.0 { 1.0 } else { 0.0 }),
        Some(w) => {
            let w_c = w.w_c;
            par::fill_indexed(indicator_buf, |i| if c[i] < 1.0 { w_c[i] } else { 0.0 })
        }
    }
    q.transpose_diff_product_into(indicator_buf, out);
    match weights {
        None => par::update_indexed(out, |j, acc| {
            acc + ell * (u[j] * (1.0 - u[j]) * (1.0 - 2.0 * u[j]))
        }),
        Some(w) => {
            let w2 = w.w_v_sq;
            par::update_indexed(out, |j, acc| {
                acc + ell * (w2[j] * (u[j] * (1.0 - u[j]) * (1.0 - 2.0 * u[j])))
            })
        }
    }
}

/// Jacobian of [`eval_cost`]: the transposed signed incidence applied to the
/// indicator of clause sums strictly below one, plus the penalty derivative
/// `ell * u (1-u) (1-2u)`. At a clause-sum kink (sum exactly 1) the indicator
/// selects the zero subgradient.
pub fn eval_jacobian(q: &InstanceMatrix, u: &[f64], ell: f64) -> Vec<f64> {
    let c = q.clause_sums(u);
    let mut ind = vec![0.0; q.num_clauses()];
    let mut out = vec![0.0; q.num_vars()];
    jacobian_given_sums(q, u, &c, None, ell, &mut ind, &mut out);
    out
}

#[doc(hidden)]
pub fn eval_jacobian_seq(q: &InstanceMatrix, u: &[f64], ell: f64) -> Vec<f64> {
    let mut c = vec![0.0; q.num_clauses()];
    q.clause_sums_seq_into(u, &mut c);
    let mut ind = vec![0.0; q.num_clauses()];
    par::fill_indexed_seq(&mut ind, |i| if c[i] < 1.0 { 1.0 } else { 0.0 });
    let mut out = vec![0.0; q.num_vars()];
    q.transpose_diff_product_seq_into(&ind, &mut out);
    par::update_indexed_seq(&mut out, |j, acc| {
        acc + ell * (u[j] * (1.0 - u[j]) * (1.0 - 2.0 * u[j]))
    });
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewtonStep {
    Stepped(Vec<f64>),
    /// Squared Jacobian norm below the guard (or a non-finite quantity); the
    /// caller must perturb instead of stepping.
    Degenerate,
}

/// One Newton-style update `u - (cost / |jacobian|^2) * jacobian`. When
/// stepping, `jacobian . (u_new - u) = -cost` holds up to rounding.
pub fn newton_step(u: &[f64], cost: f64, jacobian: &[f64], guard: f64) -> NewtonStep {
    assert_eq!(u.len(), jacobian.len(), "state and jacobian lengths differ");
    let norm_sq = par::sum_indexed(jacobian.len(), |j| jacobian[j] * jacobian[j]);
    if !cost.is_finite() || !norm_sq.is_finite() || norm_sq < guard {
        return NewtonStep::Degenerate;
    }
    let alpha = cost / norm_sq;
    let mut next = u.to_vec();
    par::update_indexed(&mut next, |j, x| x - alpha * jacobian[j]);
    NewtonStep::Stepped(next)
}

/// Number of clauses with no true literal under the binary assignment.
pub fn count_unsat(q: &InstanceMatrix, bits: &[bool]) -> usize {
    assert_eq!(bits.len(), q.num_vars(), "assignment length does not match variable count");
    par::count_indexed(q.num_clauses(), |i| clause_unsat(q, i, bits))
}

#[doc(hidden)]
pub fn count_unsat_seq(q: &InstanceMatrix, bits: &[bool]) -> usize {
    assert_eq!(bits.len(), q.num_vars());
    par::count_indexed_seq(q.num_clauses(), |i| clause_unsat(q, i, bits))
}

fn clause_unsat(q: &InstanceMatrix, i: usize, bits: &[bool]) -> bool {
    !q.clause_pos_vars(i).iter().any(|&j| bits[j as usize])
        && !q.clause_neg_vars(i).iter().any(|&j| !bits[j as usize])
}

/// Evenly spaced thresholds over [lo, hi] with exact endpoints.
fn threshold_grid(lo: f64, hi: f64, levels: usize) -> Vec<f64> {
    if levels == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (levels - 1) as f64;
    let mut grid: Vec<f64> = (0..levels).map(|t| lo + step * t as f64).collect();
    grid[0] = lo;
    *grid.last_mut().unwrap() = hi;
    debug_assert!(grid.windows(2).all(|w| w[0] <= w[1]));
    grid
}

/// Falsified-clause count at every grid threshold.
///
/// Clause i is falsified at threshold t iff no positive variable reaches t
/// and every negative variable does, i.e. iff
/// `max(u over positives) < t <= min(u over negatives)`. Each clause
/// therefore contributes one contiguous grid interval, accumulated as a
/// difference array and prefix-summed. This is an exact reformulation of
/// rebinarizing and recounting at every threshold, at O(m log g) instead of
/// O(m g).
fn grid_errors(q: &InstanceMatrix, u: &[f64], grid: &[f64]) -> Vec<i32> {
    let levels = grid.len();
    let mut diff = par::accumulate_i32(q.num_clauses(), levels + 1, |i, acc| {
        let mut max_pos = f64::NEG_INFINITY;
        for &j in q.clause_pos_vars(i) {
            max_pos = max_pos.max(u[j as usize]);
        }
        let mut min_neg = f64::INFINITY;
        for &j in q.clause_neg_vars(i) {
            min_neg = min_neg.min(u[j as usize]);
        }
        let t_lo = grid.partition_point(|&t| t <= max_pos);
        let t_hi = grid.partition_point(|&t| t <= min_neg);
        if t_lo < t_hi {
            acc[t_lo] += 1;
            acc[t_hi] -= 1;
        }
    });
    let mut running = 0;
    for slot in diff.iter_mut().take(levels) {
        running += *slot;
        *slot = running;
    }
    diff.truncate(levels);
    diff
}

/// Binarizes `u` at the best of `grid_levels` evenly spaced thresholds
/// spanning [min(u), max(u)], both endpoints included. A component is set
/// iff it is >= the threshold. Returns the assignment minimizing the
/// falsified-clause count, ties broken by the smallest threshold. When the
/// state is constant the interval collapses; exactly the all-ones and
/// all-zeros assignments are compared then.
pub fn threshold_search(
    q: &InstanceMatrix,
    u: &[f64],
    grid_levels: usize,
) -> (Assignment, f64, usize) {
    assert_eq!(u.len(), q.num_vars(), "state length does not match variable count");
    assert!(grid_levels >= 1, "grid_levels must be >= 1");
    let (lo, hi) = par::minmax(u);
    debug_assert!(lo.is_finite() && hi.is_finite(), "state must be finite");

    if lo == hi {
        let ones = Assignment::all_true(q.num_vars());
        let zeros = Assignment::all_false(q.num_vars());
        let err_ones = count_unsat(q, &ones.bits);
        let err_zeros = count_unsat(q, &zeros.bits);
        return if err_ones <= err_zeros {
            (ones, lo, err_ones)
        } else {
            // any threshold above the constant state clears every bit
            (zeros, hi + 1.0, err_zeros)
        };
    }

    let grid = threshold_grid(lo, hi, grid_levels);
    let errors = grid_errors(q, u, &grid);
    let mut best_t = 0;
    for (t, &e) in errors.iter().enumerate() {
        if e < errors[best_t] {
            best_t = t;
        }
    }
    let theta = grid[best_t];
    let mut bits = vec![false; q.num_vars()];
    par::fill_indexed(&mut bits, |j| u[j] >= theta);
    (Assignment::new(bits), theta, errors[best_t] as usize)
}

#[doc(hidden)]
pub fn threshold_search_seq(
    q: &InstanceMatrix,
    u: &[f64],
    grid_levels: usize,
) -> (Assignment, f64, usize) {
    assert_eq!(u.len(), q.num_vars());
    assert!(grid_levels >= 1);
    let (lo, hi) = par::minmax_seq(u);
    if lo == hi {
        let ones = Assignment::all_true(q.num_vars());
        let zeros = Assignment::all_false(q.num_vars());
        let err_ones = count_unsat_seq(q, &ones.bits);
        let err_zeros = count_unsat_seq(q, &zeros.bits);
        return if err_ones <= err_zeros {
            (ones, lo, err_ones)
        } else {
            (zeros, hi + 1.0, err_zeros)
        };
    }
    let grid = threshold_grid(lo, hi, grid_levels);
    let levels = grid.len();
    let mut diff = par::accumulate_i32_seq(q.num_clauses(), levels + 1, |i, acc| {
        let mut max_pos = f64::NEG_INFINITY;
        for &j in q.clause_pos_vars(i) {
            max_pos = max_pos.max(u[j as usize]);
        }
        let mut min_neg = f64::INFINITY;
        for &j in q.clause_neg_vars(i) {
            min_neg = min_neg.min(u[j as usize]);
        }
        let t_lo = grid.partition_point(|&t| t <= max_pos);
        let t_hi = grid.partition_point(|&t| t <= min_neg);
        if t_lo < t_hi {
            acc[t_lo] += 1;
            acc[t_hi] -= 1;
        }
    });
    let mut running = 0;
    for slot in diff.iter_mut().take(levels) {
        running += *slot;
        *slot = running;
    }
    let mut best_t = 0;
    for t in 0..levels {
        if diff[t] < diff[best_t] {
            best_t = t;
        }
    }
    let theta = grid[best_t];
    let bits: Vec<bool> = u.iter().map(|&x| x >= theta).collect();
    (Assignment::new(bits), theta, diff[best_t] as usize)
}

/// Mixes each component with an independent uniform(0,1) draw:
/// `u_j <- (1 - beta) u_j + beta * d_j`. Draws are consumed even when
/// `beta = 0` so the stream position depends only on how many perturbations
/// occurred.
pub fn perturb(u: &[f64], beta: f64, rng: &mut SolverRng) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&beta), "beta must lie in [0, 1]");
    let mut next = u.to_vec();
    perturb_in_place(&mut next, beta, rng);
    next
}

pub(crate) fn perturb_in_place(u: &mut [f64], beta: f64, rng: &mut SolverRng) {
    for x in u.iter_mut() {
        *x = (1.0 - beta) * *x + beta * rng.gen::<f64>();
    }
}

/// Runs the full solve: at most `max_try` tries of at most `max_itr` Newton
/// iterations each, thresholding at the configured stride and returning the
/// moment a candidate satisfies every clause. Deterministic given the
/// instance and the config.
pub fn solve(q: &InstanceMatrix, config: &SolverConfig) -> SolveOutcome {
    solve_with_control(q, config, &CancelToken::new())
}

/// [`solve`] with cooperative cancellation; a cancelled run returns the best
/// assignment seen so far with status [`SolveStatus::Exhausted`].
pub fn solve_with_control(
    q: &InstanceMatrix,
    config: &SolverConfig,
    cancel: &CancelToken,
) -> SolveOutcome {
    solve_loop(q, config, None, cancel)
}

pub(crate) fn solve_loop(
    mat: &InstanceMatrix,
    config: &SolverConfig,
    weights: Option<&LoopWeights<'_>>,
    cancel: &CancelToken,
) -> SolveOutcome {
    config.validate();
    let start = Instant::now();
    let n = mat.num_vars();
    let m = mat.num_clauses();
    let (w_c, w_v) = match weights {
        Some(w) => (Some(w.w_c), Some(w.w_v)),
        None => (None, None),
    };

    let mut rng = SolverRng::seed_from_u64(config.seed);
    let mut u = vec![0.0; n];
    for x in u.iter_mut() {
        *x = rng.gen::<f64>();
    }

    let mut sums = vec![0.0; m];
    let mut indicator = vec![0.0; m];
    let mut jacobian = vec![0.0; n];

    let mut best: Option<(usize, Assignment, f64)> = None;
    let mut iterations: u64 = 0;
    let mut tries_used = 0;

    let outcome = |status, assignment, error, tries, iterations, theta, start: Instant| SolveOutcome {
        status,
        assignment,
        error,
        tries_used: tries,
        iterations_total: iterations,
        wall_time: start.elapsed(),
        final_theta: theta,
    };

    'tries: for try_idx in 1..=config.max_try {
        tries_used = try_idx;
        for iter_idx in 1..=config.max_itr {
            if cancel.cancelled() {
                break 'tries;
            }
            iterations += 1;

            mat.clause_sums_into(&u, &mut sums);
            let cost = cost_given_sums(&u, &sums, w_c, w_v, config.ell);
            if cost == 0.0 {
                // exact binary root: rounding reproduces it, no grid needed;
                // without this check the zero Jacobian below would perturb a
                // finished state away
                let mut bits = vec![false; n];
                par::fill_indexed(&mut bits, |j| u[j] >= 0.5);
                let assignment = Assignment::new(bits);
                debug_assert_eq!(count_unsat(mat, &assignment.bits), 0);
                return outcome(SolveStatus::Satisfied, assignment, 0, try_idx, iterations, 0.5, start);
            }

            jacobian_given_sums(mat, &u, &sums, weights, config.ell, &mut indicator, &mut jacobian);
            let norm_sq = par::sum_indexed(n, |j| jacobian[j] * jacobian[j]);
            if !cost.is_finite() || !norm_sq.is_finite() || norm_sq < config.step_guard {
                // degenerate step (vanishing or overflowed Jacobian): escape
                // by perturbation and keep iterating this try
                if u.iter().any(|x| !x.is_finite()) {
                    for x in u.iter_mut() {
                        *x = rng.gen::<f64>();
                    }
                } else {
                    perturb_in_place(&mut u, config.beta, &mut rng);
                }
            } else {
                let alpha = cost / norm_sq;
                par::update_indexed(&mut u, |j, x| x - alpha * jacobian[j]);
            }

            if iter_idx % config.threshold_stride == 0 || iter_idx == config.max_itr {
                let (assignment, theta, error) = threshold_search(mat, &u, config.grid_levels);
                let improved = best.as_ref().map_or(true, |(be, _, _)| error < *be);
                if improved {
                    best = Some((error, assignment, theta));
                }
                if error == 0 {
                    let (error, assignment, theta) = best.take().unwrap();
                    return outcome(SolveStatus::Satisfied, assignment, error, try_idx, iterations, theta, start);
                }
            }
        }
        if try_idx < config.max_try {
            perturb_in_place(&mut u, config.beta, &mut rng);
        }
    }

    // budget exhausted or cancelled; if cancellation struck before the first
    // threshold, evaluate one now so there is an assignment to report
    let (error, assignment, theta) =
        best.unwrap_or_else(|| {
            let (assignment, theta, error) = threshold_search(mat, &u, config.grid_levels);
            (error, assignment, theta)
        });
    outcome(SolveStatus::Exhausted, assignment, error, tries_used, iterations, theta, start)
}
