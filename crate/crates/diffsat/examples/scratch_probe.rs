use diffsat::generator::{generate_forced_ksat, GenSpec};
use diffsat::matrix::InstanceMatrix;
use diffsat::solver::{solve, SolveStatus, SolverConfig};

fn main() {
    let inst_seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(22);
    let n = 500;
    let m = 2130;
    let gi = generate_forced_ksat(&GenSpec { num_vars: n, num_clauses: m, clause_len: 3, seed: inst_seed }).unwrap();
    let q = InstanceMatrix::build(&gi.cnf);

    println!("== solver seed sweep (defaults) ==");
    for s in 0..8u64 {
        let cfg = SolverConfig { seed: s, max_try: 20, ..SolverConfig::default() };
        let out = solve(&q, &cfg);
        println!("seed={s} {:?} err={} tries={} iters={}", out.status, out.error, out.tries_used, out.iterations_total);
    }

    println!("== beta sweep (solver seed 0, 20 tries) ==");
    for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let cfg = SolverConfig { seed: 0, beta, max_try: 20, ..SolverConfig::default() };
        let out = solve(&q, &cfg);
        println!("beta={beta} {:?} err={} tries={} iters={}", out.status, out.error, out.tries_used, out.iterations_total);
    }

    println!("== max_itr sweep (solver seed 0, 20 tries) ==");
    for itr in [250, 500, 1000, 2000] {
        let cfg = SolverConfig { seed: 0, max_itr: itr, max_try: 20, ..SolverConfig::default() };
        let out = solve(&q, &cfg);
        println!("max_itr={itr} {:?} err={} tries={} iters={}", out.status, out.error, out.tries_used, out.iterations_total);
    }
}
