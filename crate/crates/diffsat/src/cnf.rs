//! CNF data model, DIMACS text I/O, and direct clause-by-clause verification.
//!
//! Variables are numbered 1..=n externally (DIMACS convention). Assignment
//! bit vectors and clause indices returned by [`verify_assignment`] are
//! zero-based.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// A signed literal in DIMACS encoding: magnitude is the 1-based variable
/// index, sign is the polarity. Never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(var >= 1, "variable index must be >= 1");
        assert!(var <= i32::MAX as usize, "variable index {var} too large");
        Literal(if positive { var as i32 } else { -(var as i32) })
    }

    pub fn positive(var: usize) -> Self {
        Literal::new(var, true)
    }

    pub fn negative(var: usize) -> Self {
        Literal::new(var, false)
    }

    /// Builds from a raw DIMACS code. Panics on zero (the clause terminator).
    pub fn from_dimacs(code: i32) -> Self {
        assert!(code != 0, "literal code must be nonzero");
        Literal(code)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Self {
        Literal(-self.0)
    }

    /// Truth value under a zero-based assignment bit vector.
    pub fn eval(self, bits: &[bool]) -> bool {
        bits[self.var() - 1] == self.is_positive()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals, in input order. Duplicates are allowed here;
/// the matrix encoding collapses them.
pub type Clause = Vec<Literal>;

/// True iff at least one literal of `clause` is true under `bits`.
pub fn clause_satisfied(clause: &[Literal], bits: &[bool]) -> bool {
    clause.iter().any(|lit| lit.eval(bits))
}

/// A CNF formula: `num_vars` variables and a conjunction of clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, ModelError> {
        let cnf = CnfInstance { num_vars, clauses };
        cnf.validate()?;
        Ok(cnf)
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Checks the structural invariants: at least one variable and clause,
    /// no empty clause, every literal within range.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.num_vars == 0 {
            return Err(ModelError::NoVariables);
        }
        if self.clauses.is_empty() {
            return Err(ModelError::NoClauses);
        }
        for (i, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(ModelError::EmptyClause { clause: i });
            }
            for lit in clause {
                if lit.var() > self.num_vars {
                    return Err(ModelError::VarOutOfRange {
                        literal: lit.to_dimacs(),
                        num_vars: self.num_vars,
                        clause: i,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A binary assignment; `bits[j]` is the truth value of variable `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn all_false(n: usize) -> Self {
        Assignment { bits: vec![false; n] }
    }

    pub fn all_true(n: usize) -> Self {
        Assignment { bits: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Signed DIMACS codes (positive = true), in variable order.
    pub fn dimacs_codes(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits
            .iter()
            .enumerate()
            .map(|(j, &b)| if b { (j + 1) as i64 } else { -((j + 1) as i64) })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance declares no variables")]
    NoVariables,
    #[error("instance has no clauses")]
    NoClauses,
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("literal {literal} out of range for {num_vars} variables (clause {clause})")]
    VarOutOfRange { literal: i32, num_vars: usize, clause: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing 'p cnf' header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unexpected token {0:?} in clause data")]
    BadToken(String),
    #[error("literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: i64, num_vars: usize },
    #[error("clause {clause} is empty: instance is trivially unsatisfiable")]
    TriviallyUnsat { clause: usize },
    #[error("unterminated clause at end of input")]
    UnterminatedClause,
    #[error("no clauses in instance")]
    NoClauses,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Header declared one clause count, the body contained another.
    /// The body wins.
    ClauseCountMismatch { header: usize, body: usize },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::ClauseCountMismatch { header, body } => {
                write!(f, "header declares m={header} clauses but body has {body}; using body count")
            }
        }
    }
}

/// Parses DIMACS CNF text.
///
/// Accepts 'c' comment lines anywhere, one 'p cnf n m' header, whitespace- and
/// newline-separated zero-terminated clauses (LF or CRLF), and ignores a
/// trailing '%' section as found in SATLIB files. A body clause count that
/// differs from the header yields a [`ParseWarning`], not an error. An empty
/// clause is rejected with [`ParseError::TriviallyUnsat`] since no assignment
/// can satisfy it.
pub fn parse_dimacs(input: &str) -> Result<(CnfInstance, Vec<ParseWarning>), ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Clause = Vec::new();
    let mut warnings = Vec::new();

    for raw_line in input.lines() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::MalformedHeader("duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(ParseError::MalformedHeader(line.to_string()));
            }
            let n: usize = fields[2]
                .parse()
                .map_err(|_| ParseError::MalformedHeader(line.to_string()))?;
            let m: usize = fields[3]
                .parse()
                .map_err(|_| ParseError::MalformedHeader(line.to_string()))?;
            if n == 0 {
                return Err(ParseError::MalformedHeader(format!(
                    "variable count must be >= 1: {line}"
                )));
            }
            header = Some((n, m));
            continue;
        }
        let (num_vars, _) = header.ok_or(ParseError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let code: i64 = tok
                .parse()
                .map_err(|_| ParseError::BadToken(tok.to_string()))?;
            if code == 0 {
                if current.is_empty() {
                    return Err(ParseError::TriviallyUnsat { clause: clauses.len() });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if code.unsigned_abs() as usize > num_vars {
                    return Err(ParseError::LiteralOutOfRange { literal: code, num_vars });
                }
                current.push(Literal::from_dimacs(code as i32));
            }
        }
    }

    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }
    let (num_vars, header_m) = header.ok_or(ParseError::MissingHeader)?;
    if clauses.is_empty() {
        return Err(ParseError::NoClauses);
    }
    if clauses.len() != header_m {
        warnings.push(ParseWarning::ClauseCountMismatch {
            header: header_m,
            body: clauses.len(),
        });
    }
    Ok((CnfInstance { num_vars, clauses }, warnings))
}

/// Serializes to canonical DIMACS (no comments, one clause per line).
/// Round-trips through [`parse_dimacs`] to a structurally equal instance.
pub fn write_dimacs(cnf: &CnfInstance) -> Result<String, ModelError> {
    cnf.validate()?;
    let mut out = String::with_capacity(16 + cnf.clauses.len() * 12);
    writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len()).unwrap();
    for clause in &cnf.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Evaluates every clause of `cnf` under `assignment`.
///
/// Returns whether all clauses are satisfied plus the zero-based indices of
/// falsified clauses. Panics if the assignment length does not match
/// `num_vars`.
pub fn verify_assignment(cnf: &CnfInstance, assignment: &Assignment) -> (bool, Vec<usize>) {
    assert_eq!(
        assignment.len(),
        cnf.num_vars,
        "assignment length does not match variable count"
    );
    let unsat: Vec<usize> = cnf
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, clause)| !clause_satisfied(clause, &assignment.bits))
        .map(|(i, _)| i)
        .collect();
    (unsat.is_empty(), unsat)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S0_TEXT: &str = "p cnf 3 2\n1 2 -3 0\n-1 -2 0\n";

    /// (a or b or not c) and (not a or not b)
    pub(crate) fn s0() -> CnfInstance {
        CnfInstance {
            num_vars: 3,
            clauses: vec![
                vec![Literal::positive(1), Literal::positive(2), Literal::negative(3)],
                vec![Literal::negative(1), Literal::negative(2)],
            ],
        }
    }

    #[test]
    fn parse_s0() {
        let (cnf, warnings) = parse_dimacs(S0_TEXT).unwrap();
        assert_eq!(cnf, s0());
        assert!(warnings.is_empty());
    }

    #[test]
    fn parse_comments_and_unit_clause() {
        let (cnf, warnings) = parse_dimacs("c comment\np cnf 1 1\n1 0\n").unwrap();
        assert_eq!(cnf.num_vars, 1);
        assert_eq!(cnf.clauses, vec![vec![Literal::positive(1)]]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn body_count_wins_with_warning() {
        let (cnf, warnings) = parse_dimacs("p cnf 2 1\n1 0 2 0\n").unwrap();
        assert_eq!(cnf.num_clauses(), 2);
        assert_eq!(
            warnings,
            vec![ParseWarning::ClauseCountMismatch { header: 1, body: 2 }]
        );
    }

    #[test]
    fn parse_crlf_and_clause_spanning_lines() {
        let (cnf, _) = parse_dimacs("p cnf 3 2\r\n1 2\r\n-3 0 -1\r\n-2 0\r\n").unwrap();
        assert_eq!(cnf, s0());
    }

    #[test]
    fn parse_satlib_percent_trailer() {
        let (cnf, _) = parse_dimacs("p cnf 3 2\n1 2 -3 0\n-1 -2 0\n%\n0\n\n").unwrap();
        assert_eq!(cnf, s0());
    }

    #[test]
    fn parse_rejects_out_of_range_literal() {
        let err = parse_dimacs("p cnf 3 1\n1 4 0\n").unwrap_err();
        assert_eq!(err, ParseError::LiteralOutOfRange { literal: 4, num_vars: 3 });
    }

    #[test]
    fn parse_rejects_empty_clause_as_trivially_unsat() {
        let err = parse_dimacs("p cnf 2 2\n1 0\n0\n").unwrap_err();
        assert_eq!(err, ParseError::TriviallyUnsat { clause: 1 });
    }

    #[test]
    fn parse_rejects_malformed_header() {
        assert!(matches!(
            parse_dimacs("p cnf x 2\n1 0\n"),
            Err(ParseError::MalformedHeader(_))
        ));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(ParseError::MissingHeader)));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\np cnf 2 1\n1 0\n"),
            Err(ParseError::MalformedHeader(_))
        ));
    }

    #[test]
    fn parse_rejects_unterminated_clause() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err(),
            ParseError::UnterminatedClause
        );
    }

    #[test]
    fn parse_rejects_empty_body() {
        assert_eq!(parse_dimacs("p cnf 2 0\n").unwrap_err(), ParseError::NoClauses);
    }

    #[test]
    fn write_s0_exact_bytes() {
        assert_eq!(write_dimacs(&s0()).unwrap(), S0_TEXT);
    }

    #[test]
    fn write_rejects_empty_clause() {
        let bad = CnfInstance { num_vars: 1, clauses: vec![vec![]] };
        assert_eq!(write_dimacs(&bad).unwrap_err(), ModelError::EmptyClause { clause: 0 });
    }

    #[test]
    fn verify_s0_solution_and_counterexample() {
        let cnf = s0();
        let (ok, unsat) = verify_assignment(&cnf, &Assignment::new(vec![true, false, false]));
        assert!(ok);
        assert!(unsat.is_empty());

        // second clause (not a or not b) is falsified
        let (ok, unsat) = verify_assignment(&cnf, &Assignment::new(vec![true, true, false]));
        assert!(!ok);
        assert_eq!(unsat, vec![1]);
    }

    #[test]
    fn unit_clause_satisfied_by_exactly_one_polarity() {
        let cnf = CnfInstance {
            num_vars: 1,
            clauses: vec![vec![Literal::negative(1)]],
        };
        let (sat_true, _) = verify_assignment(&cnf, &Assignment::new(vec![true]));
        let (sat_false, _) = verify_assignment(&cnf, &Assignment::new(vec![false]));
        assert!(sat_true != sat_false);
    }

    #[test]
    #[should_panic(expected = "assignment length")]
    fn verify_panics_on_length_mismatch() {
        verify_assignment(&s0(), &Assignment::new(vec![true]));
    }
}
