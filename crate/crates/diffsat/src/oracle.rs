//! Exhaustive ground truth for desk-scale verification.
//!
//! Deliberately dumb: every assignment is enumerated in lexicographic order
//! of the bit vector (variable 1 is the most significant bit), with no
//! pruning, so results are trustworthy references for the solver and the
//! matrix kernels. Capped at 26 variables.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cnf::{Assignment, CnfInstance};

pub const MAX_ORACLE_VARS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceOutcome {
    Sat(Assignment),
    Unsat,
}

/// Per-clause bit masks over an n-bit assignment word where variable j
/// (1-based) occupies bit n - j. With that layout the numeric order of words
/// is the lexicographic order of assignment vectors.
fn clause_masks(cnf: &CnfInstance) -> Vec<(u64, u64)> {
    let n = cnf.num_vars;
    cnf.clauses
        .iter()
        .map(|clause| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for lit in clause {
                let bit = 1u64 << (n - lit.var());
                if lit.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect()
}

fn unsat_count(word: u64, masks: &[(u64, u64)]) -> usize {
    masks
        .iter()
        .filter(|&&(pos, neg)| word & pos == 0 && !word & neg == 0)
        .count()
}

fn word_to_assignment(word: u64, n: usize) -> Assignment {
    let bits = (0..n).map(|j| word >> (n - 1 - j) & 1 == 1).collect();
    Assignment::new(bits)
}

fn check_cap(cnf: &CnfInstance) -> usize {
    let n = cnf.num_vars;
    assert!(
        n <= MAX_ORACLE_VARS,
        "brute force capped at {MAX_ORACLE_VARS} variables, instance has {n}"
    );
    n
}

const SCAN_CHUNK: u64 = 1 << 14;

/// First satisfying assignment in lexicographic order, or `Unsat`.
/// Panics above the variable cap.
pub fn brute_force_solve(cnf: &CnfInstance) -> BruteForceOutcome {
    let n = check_cap(cnf);
    let masks = clause_masks(cnf);
    let total: u64 = 1 << n;
    let scan = |start: u64| -> Option<u64> {
        (start..(start + SCAN_CHUNK).min(total)).find(|&w| unsat_count(w, &masks) == 0)
    };

    let chunks = total.div_ceil(SCAN_CHUNK);
    #[cfg(feature = "parallel")]
    let first = (0..chunks)
        .into_par_iter()
        .find_map_first(|c| scan(c * SCAN_CHUNK));
    #[cfg(not(feature = "parallel"))]
    let first = (0..chunks).find_map(|c| scan(c * SCAN_CHUNK));

    match first {
        Some(word) => BruteForceOutcome::Sat(word_to_assignment(word, n)),
        None => BruteForceOutcome::Unsat,
    }
}

/// Assignment minimizing the falsified-clause count, ties broken toward the
/// lexicographically smallest. Panics above the variable cap.
pub fn brute_force_min_error(cnf: &CnfInstance) -> (Assignment, usize) {
    let n = check_cap(cnf);
    let masks = clause_masks(cnf);
    let total: u64 = 1 << n;
    let scan = |start: u64| -> (usize, u64) {
        let mut best = (usize::MAX, 0u64);
        for w in start..(start + SCAN_CHUNK).min(total) {
            let e = unsat_count(w, &masks);
            if e < best.0 {
                best = (e, w);
            }
        }
        best
    };

    let chunks = total.div_ceil(SCAN_CHUNK);
    #[cfg(feature = "parallel")]
    let (error, word) = (0..chunks)
        .into_par_iter()
        .map(|c| scan(c * SCAN_CHUNK))
        .reduce(|| (usize::MAX, u64::MAX), std::cmp::min);
    #[cfg(not(feature = "parallel"))]
    let (error, word) = (0..chunks)
        .map(|c| scan(c * SCAN_CHUNK))
        .fold((usize::MAX, u64::MAX), std::cmp::min);

    (word_to_assignment(word, n), error)
}

/// Central differences `(f(x + h e_j) - f(x - h e_j)) / 2h` per component.
pub fn finite_diff_gradient<F>(f: F, point: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for j in 0..point.len() {
        let original = x[j];
        x[j] = original + h;
        let above = f(&x);
        x[j] = original - h;
        let below = f(&x);
        x[j] = original;
        grad.push((above - below) / (2.0 * h));
    }
    grad
}
