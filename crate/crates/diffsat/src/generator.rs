//! Forced uniform random k-SAT generation.
//!
//! A hidden assignment is drawn first; candidate clauses over k mutually
//! different variables with fair-coin polarities are then kept only when the
//! hidden assignment satisfies them, so every generated instance is
//! satisfiable by construction. Draw order per seed: the hidden assignment
//! componentwise, then per clause attempt the variable subset followed by
//! one polarity coin per chosen variable in ascending variable order.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::cnf::{clause_satisfied, write_dimacs, Assignment, Clause, CnfInstance, Literal};
use crate::solver::SolverRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub num_vars: usize,
    pub num_clauses: usize,
    /// Literals per clause (k).
    pub clause_len: usize,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("clause length {clause_len} exceeds variable count {num_vars}")]
    ClauseLenExceedsVars { clause_len: usize, num_vars: usize },
    #[error("variable count must be >= 1")]
    ZeroVars,
    #[error("clause count must be >= 1")]
    ZeroClauses,
    #[error("clause length must be >= 1")]
    ZeroClauseLen,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.num_vars == 0 {
            return Err(GenError::ZeroVars);
        }
        if self.num_clauses == 0 {
            return Err(GenError::ZeroClauses);
        }
        if self.clause_len == 0 {
            return Err(GenError::ZeroClauseLen);
        }
        if self.clause_len > self.num_vars {
            return Err(GenError::ClauseLenExceedsVars {
                clause_len: self.clause_len,
                num_vars: self.num_vars,
            });
        }
        Ok(())
    }
}

/// An instance together with the planted assignment that satisfies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub spec: GenSpec,
    pub cnf: CnfInstance,
    pub hidden: Assignment,
}

/// Uniform k-subset of {1, .., n} via Floyd's sampling, returned ascending.
fn sample_distinct_vars(rng: &mut SolverRng, n: usize, k: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for j in (n - k)..n {
        let candidate = rng.gen_range(0..=j) + 1;
        if chosen.contains(&candidate) {
            chosen.push(j + 1);
        } else {
            chosen.push(candidate);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Generates a forced instance: rejection sampling of clauses against a
/// uniformly drawn hidden assignment until `num_clauses` are kept. Expected
/// acceptance rate is 1 - 2^-k, so this terminates quickly. Deterministic
/// given the seed; duplicate clauses may occur.
pub fn generate_forced_ksat(spec: &GenSpec) -> Result<GeneratedInstance, GenError> {
    spec.validate()?;
    let n = spec.num_vars;
    let mut rng = SolverRng::seed_from_u64(spec.seed);
    let hidden: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();

    let mut clauses: Vec<Clause> = Vec::with_capacity(spec.num_clauses);
    while clauses.len() < spec.num_clauses {
        let vars = sample_distinct_vars(&mut rng, n, spec.clause_len);
        let clause: Clause = vars
            .into_iter()
            .map(|v| Literal::new(v, rng.gen_bool(0.5)))
            .collect();
        if clause_satisfied(&clause, &hidden) {
            clauses.push(clause);
        }
    }

    Ok(GeneratedInstance {
        spec: *spec,
        cnf: CnfInstance { num_vars: n, clauses },
        hidden: Assignment::new(hidden),
    })
}

/// Renders the instance as DIMACS with provenance comments, plus an optional
/// sidecar solution line of signed codes ("1 -2 3 ... 0").
pub fn write_instance(gi: &GeneratedInstance, with_solution: bool) -> (String, Option<String>) {
    let mut dimacs = String::new();
    writeln!(
        dimacs,
        "c forced uniform random {}-SAT with planted solution",
        gi.spec.clause_len
    )
    .unwrap();
    writeln!(
        dimacs,
        "c n={} m={} k={} seed={}",
        gi.spec.num_vars, gi.spec.num_clauses, gi.spec.clause_len, gi.spec.seed
    )
    .unwrap();
    dimacs.push_str(&write_dimacs(&gi.cnf).expect("generated instance is structurally valid"));

    let solution = with_solution.then(|| {
        let mut line = String::new();
        for code in gi.hidden.dimacs_codes() {
            write!(line, "{code} ").unwrap();
        }
        line.push_str("0\n");
        line
    });
    (dimacs, solution)
}

/// Parses a sidecar solution line back into an assignment.
pub fn parse_solution_line(text: &str, num_vars: usize) -> Option<Assignment> {
    let mut bits = vec![false; num_vars];
    let mut seen = 0;
    for tok in text.split_whitespace() {
        let code: i64 = tok.parse().ok()?;
        if code == 0 {
            break;
        }
        let var = code.unsigned_abs() as usize;
        if var == 0 || var > num_vars {
            return None;
        }
        bits[var - 1] = code > 0;
        seen += 1;
    }
    (seen == num_vars).then(|| Assignment::new(bits))
}
