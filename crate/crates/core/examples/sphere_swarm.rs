//! The bare optimizer on the 5-D sphere, one line per seed.
//!
//! cargo run --release --example sphere_swarm -- 20

use splitswarm::pso::{run, PsoConfig};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mut below = 0;
    for seed in 0..seeds {
        let cfg = PsoConfig::with_bounds(vec![-5.0; 5], vec![5.0; 5], seed);
        let out = run(&cfg, &sphere);
        if out.best_value < 1e-3 {
            below += 1;
        }
        println!(
            "seed {seed:>3}  best {:.3e}  first {:.3e}  evals {}",
            out.best_value, out.history[0], out.evaluations_used
        );
    }
    println!("{below}/{seeds} seeds below 1e-3");
}
