//! Spread of predictions on a strongly vs weakly correlated archive.
//!
//! cargo run --release --example correlation_dispersion

use splitswarm::archive::SynthSpec;
use splitswarm::experiment::{run_experiment, ArchiveSource, ExperimentConfig};

fn main() {
    let names = ["swim", "t1", "bike", "t2", "run", "total"];
    for spec in [SynthSpec::high_correlation(4), SynthSpec::low_correlation(4)] {
        let label = spec.label.clone();
        let cfg = ExperimentConfig {
            runs: 20,
            ..ExperimentConfig::new(ArchiveSource::Synthetic(spec))
        };
        let report = run_experiment(&cfg).unwrap();
        let sd = report.stdev.unwrap();
        print!("{label:<15} r1 {:.3} ", report.correlation.unwrap().sum);
        for (n, s) in names.iter().zip(&sd.formatted) {
            print!(" {n} {s}");
        }
        println!();
    }
}
