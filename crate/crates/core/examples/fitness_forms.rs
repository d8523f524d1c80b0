//! The same candidates scored by the three fitness forms.

use splitswarm::archive::{synthesize_archive, SynthSpec};
use splitswarm::model::{fitness_literal, improvement_time, preference_fitness, ModelConfig, SplitVector};
use splitswarm::stats::archive_correlation;

fn main() {
    let archive = synthesize_archive(&SynthSpec::high_correlation(3)).unwrap();
    let r1 = archive_correlation(&archive).unwrap();
    let cfg = ModelConfig::explicit(300.0).unwrap();
    println!("r1 = {:.4}", r1.sum);
    println!(
        "{:<34} {:>10} {:>10} {:>10}",
        "candidate", "gated", "literal", "improve"
    );
    for m in [
        [33.0, 3.0, 160.0, 3.0, 100.9],
        [29.0, 3.0, 150.0, 3.0, 100.0],
        [45.0, 3.0, 145.0, 3.0, 100.0],
        [34.0, 3.0, 165.0, 3.0, 100.0],
    ] {
        let x = SplitVector::from_minutes(m).unwrap();
        println!(
            "{:<34} {:>10.3} {:>10.3} {:>10.3}",
            format!("{m:?}"),
            preference_fitness(&x, &archive, &cfg, &r1),
            fitness_literal(&x, &archive, &cfg, &r1),
            improvement_time(&x, &cfg),
        );
    }
}
