//! Sparse clause/variable incidence structure and the two matrix-vector
//! kernels the solver iterates on.
//!
//! A formula with m clauses over n variables is a binary m x 2n matrix whose
//! row i marks the literals of clause i, split into a positive block and a
//! negative block. Rows are stored as per-clause variable lists by polarity,
//! with per-variable clause lists as the column-oriented mirror, so both the
//! forward product (clause sums) and the transposed difference product run in
//! O(nnz). Duplicate literals collapse; the matrix is binary.

use crate::cnf::CnfInstance;
use crate::par;

/// The continuous search state: one real value per variable. Kernels accept
/// plain `&[f64]` slices of length n.
pub type RelaxedAssignment = Vec<f64>;

/// CSR-style list-of-lists: `items[offsets[i]..offsets[i+1]]` is row `i`.
#[derive(Debug, Clone)]
struct Incidence {
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl Incidence {
    fn from_rows(rows: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut total = 0;
        for row in rows {
            total += row.len();
            offsets.push(total);
        }
        let mut items = Vec::with_capacity(total);
        for row in rows {
            items.extend_from_slice(row);
        }
        Incidence { offsets, items }
    }

    /// Transpose of a row list: for every value v occurring in some row r,
    /// the result's row v collects the r's, in ascending order.
    fn transposed(&self, num_cols: usize) -> Self {
        let mut counts = vec![0usize; num_cols + 1];
        for &v in &self.items {
            counts[v as usize + 1] += 1;
        }
        for i in 1..=num_cols {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut items = vec![0u32; self.items.len()];
        for row in 0..self.num_rows() {
            for &v in self.row(row) {
                items[cursor[v as usize]] = row as u32;
                cursor[v as usize] += 1;
            }
        }
        Incidence { offsets, items }
    }

    fn num_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    fn row(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Sparse encoding of a CNF instance with row- and column-oriented access.
#[derive(Debug, Clone)]
pub struct InstanceMatrix {
    num_clauses: usize,
    num_vars: usize,
    row_pos: Incidence,
    row_neg: Incidence,
    col_pos: Incidence,
    col_neg: Incidence,
    /// Cached count of negative literals per clause (the constant part of
    /// every clause sum).
    neg_count: Vec<u32>,
}

impl InstanceMatrix {
    /// Encodes a validated instance. Panics on structural violations such as
    /// empty clauses; parse or validate first.
    pub fn build(cnf: &CnfInstance) -> Self {
        cnf.validate().expect("instance must be structurally valid");
        let m = cnf.num_clauses();
        let n = cnf.num_vars;

        let mut pos_rows: Vec<Vec<u32>> = Vec::with_capacity(m);
        let mut neg_rows: Vec<Vec<u32>> = Vec::with_capacity(m);
        for clause in &cnf.clauses {
            let mut pos: Vec<u32> = Vec::new();
            let mut neg: Vec<u32> = Vec::new();
            for lit in clause {
                let j = (lit.var() - 1) as u32;
                if lit.is_positive() {
                    pos.push(j);
                } else {
                    neg.push(j);
                }
            }
            pos.sort_unstable();
            pos.dedup();
            neg.sort_unstable();
            neg.dedup();
            pos_rows.push(pos);
            neg_rows.push(neg);
        }

        let row_pos = Incidence::from_rows(&pos_rows);
        let row_neg = Incidence::from_rows(&neg_rows);
        let col_pos = row_pos.transposed(n);
        let col_neg = row_neg.transposed(n);
        let neg_count = neg_rows.iter().map(|r| r.len() as u32).collect();

        InstanceMatrix {
            num_clauses: m,
            num_vars: n,
            row_pos,
            row_neg,
            col_pos,
            col_neg,
            neg_count,
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.num_clauses
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of stored (clause, variable, polarity) incidences.
    pub fn nnz(&self) -> usize {
        self.row_pos.items.len() + self.row_neg.items.len()
    }

    /// Zero-based variables occurring positively in clause `i`, ascending.
    pub fn clause_pos_vars(&self, i: usize) -> &[u32] {
        self.row_pos.row(i)
    }

    /// Zero-based variables occurring negatively in clause `i`, ascending.
    pub fn clause_neg_vars(&self, i: usize) -> &[u32] {
        self.row_neg.row(i)
    }

    /// Clauses in which variable `j` (zero-based) occurs positively.
    pub fn var_pos_clauses(&self, j: usize) -> &[u32] {
        self.col_pos.row(j)
    }

    /// Clauses in which variable `j` (zero-based) occurs negatively.
    pub fn var_neg_clauses(&self, j: usize) -> &[u32] {
        self.col_neg.row(j)
    }

    pub fn neg_count(&self, i: usize) -> u32 {
        self.neg_count[i]
    }

    fn clause_sum_at(&self, i: usize, u: &[f64]) -> f64 {
        let mut acc = f64::from(self.neg_count[i]);
        for &j in self.row_pos.row(i) {
            acc += u[j as usize];
        }
        for &j in self.row_neg.row(i) {
            acc -= u[j as usize];
        }
        acc
    }

    /// Per-clause sums of literal truth values under the relaxed state `u`:
    /// `c[i] = sum_{j pos in i} u[j] + sum_{j neg in i} (1 - u[j])`,
    /// computed as the cached negative-literal count plus the signed linear
    /// part, so the dualized state never materializes.
    pub fn clause_sums(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_clauses];
        self.clause_sums_into(u, &mut out);
        out
    }

    pub fn clause_sums_into(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.num_vars, "state length does not match variable count");
        assert_eq!(out.len(), self.num_clauses, "output length does not match clause count");
        par::fill_indexed(out, |i| self.clause_sum_at(i, u));
    }

    #[doc(hidden)]
    pub fn clause_sums_seq_into(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.num_vars);
        assert_eq!(out.len(), self.num_clauses);
        par::fill_indexed_seq(out, |i| self.clause_sum_at(i, u));
    }

    fn transpose_diff_at(&self, j: usize, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &i in self.col_neg.row(j) {
            acc += v[i as usize];
        }
        for &i in self.col_pos.row(j) {
            acc -= v[i as usize];
        }
        acc
    }

    /// Applies the transposed signed incidence to a per-clause vector:
    /// `out[j] = sum_{i: j neg in i} v[i] - sum_{i: j pos in i} v[i]`.
    pub fn transpose_diff_product(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars];
        self.transpose_diff_product_into(v, &mut out);
        out
    }

    pub fn transpose_diff_product_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.num_clauses, "input length does not match clause count");
        assert_eq!(out.len(), self.num_vars, "output length does not match variable count");
        par::fill_indexed(out, |j| self.transpose_diff_at(j, v));
    }

    #[doc(hidden)]
    pub fn transpose_diff_product_seq_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.num_clauses);
        assert_eq!(out.len(), self.num_vars);
        par::fill_indexed_seq(out, |j| self.transpose_diff_at(j, v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{CnfInstance, Literal};

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
    fn build_s0_rows_and_columns() {
        let q = InstanceMatrix::build(&s0());
        assert_eq!(q.num_clauses(), 2);
        assert_eq!(q.num_vars(), 3);
        assert_eq!(q.clause_pos_vars(0), &[0, 1]);
        assert_eq!(q.clause_neg_vars(0), &[2]);
        assert_eq!(q.clause_pos_vars(1), &[] as &[u32]);
        assert_eq!(q.clause_neg_vars(1), &[0, 1]);
        assert_eq!(q.neg_count(0), 1);
        assert_eq!(q.neg_count(1), 2);

        assert_eq!(q.var_pos_clauses(0), &[0]);
        assert_eq!(q.var_neg_clauses(0), &[1]);
        assert_eq!(q.var_pos_clauses(1), &[0]);
        assert_eq!(q.var_neg_clauses(1), &[1]);
        assert_eq!(q.var_pos_clauses(2), &[] as &[u32]);
        assert_eq!(q.var_neg_clauses(2), &[0]);
    }

    #[test]
    fn duplicates_collapse_and_tautology_kept() {
        // (a or a or not a): binary matrix keeps one incidence per polarity
        let cnf = CnfInstance {
            num_vars: 1,
            clauses: vec![vec![Literal::positive(1), Literal::positive(1), Literal::negative(1)]],
        };
        let q = InstanceMatrix::build(&cnf);
        assert_eq!(q.clause_pos_vars(0), &[0]);
        assert_eq!(q.clause_neg_vars(0), &[0]);
        assert_eq!(q.nnz(), 2);
    }

    #[test]
    fn clause_sums_examples() {
        let q = InstanceMatrix::build(&s0());
        assert_eq!(q.clause_sums(&[1.0, 0.0, 0.0]), vec![2.0, 1.0]);
        assert_eq!(q.clause_sums(&[0.5, 0.5, 0.5]), vec![1.5, 1.0]);
        // at the zero state only the cached negative counts remain
        assert_eq!(q.clause_sums(&[0.0, 0.0, 0.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn transpose_diff_examples() {
        let q = InstanceMatrix::build(&s0());
        assert_eq!(q.transpose_diff_product(&[0.0, 1.0]), vec![1.0, 1.0, 0.0]);
        assert_eq!(q.transpose_diff_product(&[1.0, 0.0]), vec![-1.0, -1.0, 1.0]);
        assert_eq!(q.transpose_diff_product(&[0.0, 0.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn row_and_column_views_describe_same_incidence() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let clauses: Vec<Vec<Literal>> = (0..120)
            .map(|_| {
                (0..3)
                    .map(|_| Literal::new(rng.gen_range(1..=n), rng.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        let cnf = CnfInstance { num_vars: n, clauses };
        let q = InstanceMatrix::build(&cnf);

        for i in 0..q.num_clauses() {
            for &j in q.clause_pos_vars(i) {
                assert!(q.var_pos_clauses(j as usize).contains(&(i as u32)));
            }
            for &j in q.clause_neg_vars(i) {
                assert!(q.var_neg_clauses(j as usize).contains(&(i as u32)));
            }
        }
        let col_total: usize = (0..q.num_vars())
            .map(|j| q.var_pos_clauses(j).len() + q.var_neg_clauses(j).len())
            .sum();
        assert_eq!(col_total, q.nnz());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_kernels_match_sequential_bitwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 3000;
        let clauses: Vec<Vec<Literal>> = (0..9000)
            .map(|_| {
                (0..3)
                    .map(|_| Literal::new(rng.gen_range(1..=n), rng.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        let q = InstanceMatrix::build(&CnfInstance { num_vars: n, clauses });
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 0.5).collect();
        let v: Vec<f64> = (0..q.num_clauses()).map(|_| rng.gen::<f64>()).collect();

        let mut c_par = vec![0.0; q.num_clauses()];
        let mut c_seq = vec![0.0; q.num_clauses()];
        q.clause_sums_into(&u, &mut c_par);
        q.clause_sums_seq_into(&u, &mut c_seq);
        assert!(c_par.iter().zip(&c_seq).all(|(a, b)| a.to_bits() == b.to_bits()));

        let mut t_par = vec![0.0; n];
        let mut t_seq = vec![0.0; n];
        q.transpose_diff_product_into(&v, &mut t_par);
        q.transpose_diff_product_seq_into(&v, &mut t_seq);
        assert!(t_par.iter().zip(&t_seq).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
