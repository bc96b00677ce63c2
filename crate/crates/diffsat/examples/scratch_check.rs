use diffsat::cnf::{CnfInstance, Literal};
use diffsat::matrix::InstanceMatrix;
use diffsat::oracle::finite_diff_gradient;
use diffsat::solver::{eval_cost, eval_jacobian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Dense reference: materialize Q in {0,1}^{m x 2n}, dualize u, apply the
// textbook formulas directly.
fn dense_cost(cnf: &CnfInstance, u: &[f64], ell: f64) -> f64 {
    let n = cnf.num_vars;
    let mut total = 0.0;
    for clause in &cnf.clauses {
        let mut row = vec![0.0; 2 * n];
        for lit in clause {
            if lit.is_positive() {
                row[lit.var() - 1] = 1.0;
            } else {
                row[n + lit.var() - 1] = 1.0;
            }
        }
        let mut c = 0.0;
        for j in 0..n {
            c += row[j] * u[j] + row[n + j] * (1.0 - u[j]);
        }
        total += 1.0 - c.min(1.0);
    }
    let pen: f64 = u.iter().map(|&x| (x * (1.0 - x)).powi(2)).sum();
    total + 0.5 * ell * pen
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 30;
    let mut worst_rel: f64 = 0.0;
    let mut worst_cost: f64 = 0.0;
    for trial in 0..200 {
        let m = rng.gen_range(40..=150);
        let clauses: Vec<Vec<Literal>> = (0..m)
            .map(|_| {
                let k = rng.gen_range(2..=3);
                let mut vars: Vec<usize> = Vec::new();
                while vars.len() < k {
                    let v = rng.gen_range(1..=n);
                    if !vars.contains(&v) {
                        vars.push(v);
                    }
                }
                vars.into_iter()
                    .map(|v| Literal::new(v, rng.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        let cnf = CnfInstance { num_vars: n, clauses };
        let q = InstanceMatrix::build(&cnf);

        // kink-avoiding random state
        let u: Vec<f64> = loop {
            let cand: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let sums = q.clause_sums(&cand);
            if sums.iter().all(|&c| (c - 1.0).abs() > 1e-3) {
                break cand;
            }
        };

        let cost = eval_cost(&q, &u, 1.0);
        let dcost = dense_cost(&cnf, &u, 1.0);
        worst_cost = worst_cost.max((cost - dcost).abs() / dcost.max(1e-30));

        let jac = eval_jacobian(&q, &u, 1.0);
        let fd = finite_diff_gradient(|x| eval_cost(&q, x, 1.0), &u, 1e-6);
        for (a, b) in jac.iter().zip(&fd) {
            let err = (a - b).abs() / a.abs().max(1e-8);
            worst_rel = worst_rel.max(err);
        }
        if trial % 50 == 0 {
            println!("trial {trial}: worst fd rel so far {worst_rel:.3e}, cost rel {worst_cost:.3e}");
        }
    }
    println!("FINAL worst finite-diff rel err {worst_rel:.3e}, worst dense-cost rel err {worst_cost:.3e}");
}
