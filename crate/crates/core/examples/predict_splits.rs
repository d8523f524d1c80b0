//! One prediction for a sub-5-hour target, with the search trace.
//!
//! cargo run --release --example predict_splits -- 290

use splitswarm::archive::{synthesize_archive, SynthSpec};
use splitswarm::model::{predict, Discipline, ModelConfig};

fn main() {
    let k_max: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300.0);
    let archive = synthesize_archive(&SynthSpec::high_correlation(7)).unwrap();
    let cfg = ModelConfig::explicit(k_max).unwrap();
    let p = predict(&archive, &cfg, &cfg.pso_config(1)).unwrap();

    for d in Discipline::ALL {
        println!("{:<6} {}", d.name(), p.splits.get(d));
    }
    println!("total  {}  (ceiling {})", p.total, cfg.k_max.unwrap());
    println!("r1 {:.4} -> r2 {:.4}", p.r1, p.r2);
    println!("{} evaluations", p.evaluations);
    for (g, v) in p.history.iter().enumerate().step_by(40) {
        println!("  gen {g:>3}  gap {v:.6}");
    }
}
