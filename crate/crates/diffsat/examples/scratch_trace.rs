use diffsat::generator::{generate_forced_ksat, GenSpec};
use diffsat::matrix::InstanceMatrix;
use diffsat::solver::{
    count_unsat, eval_cost, eval_jacobian, newton_step, perturb, threshold_search, NewtonStep,
    SolverRng,
};
use rand::{Rng, SeedableRng};

fn main() {
    let inst_seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(22);
    let solver_seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let ell: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let n = 500;
    let gi = generate_forced_ksat(&GenSpec { num_vars: n, num_clauses: 2130, clause_len: 3, seed: inst_seed }).unwrap();
    let q = InstanceMatrix::build(&gi.cnf);

    let mut rng = SolverRng::seed_from_u64(solver_seed);
    let mut u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();

    for try_idx in 1..=6 {
        let mut last_cost = f64::NAN;
        let mut err_hist = Vec::new();
        for it in 1..=500 {
            let cost = eval_cost(&q, &u, ell);
            let jac = eval_jacobian(&q, &u, ell);
            let norm_sq: f64 = jac.iter().map(|g| g * g).sum();
            match newton_step(&u, cost, &jac, 1e-12) {
                NewtonStep::Stepped(next) => u = next,
                NewtonStep::Degenerate => {
                    println!("  it={it} DEGENERATE cost={cost:.4e} norm2={norm_sq:.4e}");
                    u = perturb(&u, 0.5, &mut rng);
                }
            }
            let (_, _, err) = threshold_search(&q, &u, 200);
            err_hist.push(err);
            last_cost = cost;
            if err == 0 {
                println!("try {try_idx}: SOLVED at it={it}");
                return;
            }
            if it % 100 == 0 {
                let lo = u.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let frac_mid = u.iter().filter(|&&x| (0.1..=0.9).contains(&x)).count() as f64 / n as f64;
                println!(
                    "try {try_idx} it={it}: cost={cost:.4} norm2={norm_sq:.3} err={err} u_range=[{lo:.2},{hi:.2}] frac_mid={frac_mid:.3}"
                );
            }
        }
        let tail: Vec<usize> = err_hist[err_hist.len() - 12..].to_vec();
        let min_err = err_hist.iter().min().unwrap();
        let bits: Vec<bool> = u.iter().map(|&x| x >= 0.5).collect();
        println!(
            "try {try_idx} end: cost={last_cost:.4} min_err={min_err} tail_err={tail:?} round_err={}",
            count_unsat(&q, &bits)
        );
        u = perturb(&u, 0.5, &mut rng);
    }
}
