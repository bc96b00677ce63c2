use diffsat::generator::{generate_forced_ksat, GenSpec};
use diffsat::matrix::InstanceMatrix;
use diffsat::solver::{solve, SolveStatus, SolverConfig};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let count: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(25);
    let m = (n as f64 * 4.26).round() as usize;
    let instances: Vec<InstanceMatrix> = (0..count)
        .map(|seed| {
            let gi = generate_forced_ksat(&GenSpec {
                num_vars: n,
                num_clauses: m,
                clause_len: 3,
                seed,
            })
            .unwrap();
            InstanceMatrix::build(&gi.cnf)
        })
        .collect();

    for ell in [0.1, 0.25, 0.5, 1.0, 2.0, 5.0] {
        let mut solved = 0;
        let mut iters_sum = 0u64;
        let mut max_iters = 0u64;
        for (idx, q) in instances.iter().enumerate() {
            let cfg = SolverConfig {
                ell,
                seed: idx as u64 ^ 0xabcd,
                max_try: 30,
                ..SolverConfig::default()
            };
            let out = solve(q, &cfg);
            if out.status == SolveStatus::Satisfied {
                solved += 1;
                iters_sum += out.iterations_total;
                max_iters = max_iters.max(out.iterations_total);
            }
        }
        let mean = if solved > 0 { iters_sum / solved as u64 } else { 0 };
        println!(
            "ell={ell:<5} solved {solved}/{count} mean_iters(solved)={mean} max_iters={max_iters}"
        );
    }
}
