//! Five runs against a results file, rendered as text, CSV or JSON.
//!
//! cargo run --release --example experiment_report -- json

use splitswarm::archive::{synthesize_archive, write_csv, SynthSpec};
use splitswarm::experiment::{emit_report, run_experiment, ArchiveSource, ExperimentConfig, OutputFormat};

fn main() {
    let format = match std::env::args().nth(1).as_deref() {
        Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        _ => OutputFormat::Text,
    };
    let dir = std::env::temp_dir().join("splitswarm-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("age-group.csv");
    let archive = synthesize_archive(&SynthSpec::high_correlation(21)).unwrap();
    write_csv(archive.records(), std::fs::File::create(&path).unwrap()).unwrap();

    let cfg = ExperimentConfig {
        base_seed: 100,
        ..ExperimentConfig::new(ArchiveSource::file(&path))
    };
    let report = run_experiment(&cfg).unwrap();
    print!("{}", String::from_utf8(emit_report(&report, format)).unwrap());
}
