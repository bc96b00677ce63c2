use std::time::Instant;

use diffsat::generator::{generate_forced_ksat, GenSpec};
use diffsat::matrix::InstanceMatrix;
use diffsat::solver::{solve, SolveStatus, SolverConfig};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let count: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(25);
    let max_itr: usize = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(500);
    let m = (n as f64 * 4.26).round() as usize;
    let mut solved = 0;
    let t0 = Instant::now();
    for seed in 0..count as u64 {
        let gi = generate_forced_ksat(&GenSpec { num_vars: n, num_clauses: m, clause_len: 3, seed }).unwrap();
        let q = InstanceMatrix::build(&gi.cnf);
        let cfg = SolverConfig { seed: seed ^ 0xabcd, max_itr, ..SolverConfig::default() };
        let out = solve(&q, &cfg);
        let ok = out.status == SolveStatus::Satisfied;
        solved += ok as usize;
        println!(
            "seed={seed} status={:?} err={} tries={} iters={} t={:.3}s",
            out.status, out.error, out.tries_used, out.iterations_total,
            out.wall_time.as_secs_f64()
        );
    }
    println!("n={n} m={m} solved {solved}/{count} total {:.2}s", t0.elapsed().as_secs_f64());
}
