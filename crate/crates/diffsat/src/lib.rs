//! Differentiable SAT solving.
//!
//! A CNF instance over n variables is encoded as a sparse binary incidence
//! matrix. A real vector u in R^n is scored by a piecewise-linear cost that
//! is zero exactly at binary satisfying assignments; the solver drives the
//! cost toward zero with Newton-style updates, binarizes the state by a
//! threshold grid search every iteration, and restarts stalled runs by
//! mixing in uniform noise. It is an incomplete solver: it can exhibit a
//! model but never certifies unsatisfiability.
//!
//! The crate also ships a forced (planted) random k-SAT generator, an
//! occurrence-weighted cost variant, and a brute-force oracle for
//! desk-scale verification.
//!
//! With the default `parallel` feature the kernels run data-parallel under
//! rayon; without it they fall back to sequential loops. Both paths produce
//! bit-identical results.

pub mod cnf;
pub mod generator;
pub mod matrix;
pub mod oracle;
mod par;
pub mod solver;
pub mod weighted;

pub use cnf::{
    parse_dimacs, verify_assignment, write_dimacs, Assignment, Clause, CnfInstance, Literal,
    ModelError, ParseError, ParseWarning,
};
pub use generator::{
    generate_forced_ksat, parse_solution_line, write_instance, GenError, GenSpec,
    GeneratedInstance,
};
pub use matrix::{InstanceMatrix, RelaxedAssignment};
pub use oracle::{brute_force_min_error, brute_force_solve, finite_diff_gradient, BruteForceOutcome};
pub use solver::{
    count_unsat, eval_cost, eval_jacobian, newton_step, perturb, solve, solve_with_control,
    threshold_search, CancelToken, NewtonStep, SolveOutcome, SolveStatus, SolverConfig, SolverRng,
};
pub use weighted::{
    compute_weights, eval_cost_weighted, eval_jacobian_weighted, solve_weighted,
    solve_weighted_with_control, WeightVectors,
};
