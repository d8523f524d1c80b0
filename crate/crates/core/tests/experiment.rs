use splitswarm::archive::{synthesize_archive, write_csv, ArchiveError, SynthSpec};
use splitswarm::experiment::{
    correlate_command, emit_report, render_correlation, run_experiment, ArchiveSource, ExperimentConfig,
    ExperimentError, ExperimentReport, OutputFormat, PsoParams,
};

fn synthetic(seed: u64) -> ArchiveSource {
    ArchiveSource::Synthetic(SynthSpec::high_correlation(seed))
}

#[test]
fn rows_follow_run_order_and_seed_scheme() {
    let cfg = ExperimentConfig {
        runs: 4,
        base_seed: 50,
        ..ExperimentConfig::new(synthetic(1))
    };
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.per_run.iter().map(|x| x.run).collect::<Vec<_>>(), [1, 2, 3, 4]);
    assert_eq!(r.per_run.iter().map(|x| x.seed).collect::<Vec<_>>(), [51, 52, 53, 54]);
    assert_eq!(r.archive_size, 30);
    assert_eq!(r.k_max, 300.0);
}

#[test]
fn a_single_run_reproduces_its_row() {
    let five = run_experiment(&ExperimentConfig {
        base_seed: 8,
        ..ExperimentConfig::new(synthetic(2))
    })
    .unwrap();
    let one = run_experiment(&ExperimentConfig {
        runs: 1,
        base_seed: 10,
        ..ExperimentConfig::new(synthetic(2))
    })
    .unwrap();
    assert_eq!(one.per_run[0].times, five.per_run[2].times);
    assert_eq!(one.stdev.unwrap().minutes, [0.0; 6]);
}

#[test]
fn mean_total_matches_mean_of_totals() {
    let r = run_experiment(&ExperimentConfig::new(synthetic(3))).unwrap();
    let totals: f64 = r.per_run.iter().map(|x| x.times.minutes[5]).sum::<f64>() / r.per_run.len() as f64;
    assert!((r.mean.unwrap().minutes[5] - totals).abs() <= 1e-9);
}

#[test]
fn json_report_round_trips() {
    let r = run_experiment(&ExperimentConfig::new(synthetic(4))).unwrap();
    let back: ExperimentReport = serde_json::from_slice(&emit_report(&r, OutputFormat::Json)).unwrap();
    assert_eq!(back, r);
}

#[test]
fn saturated_correlation_reports_all_infeasible() {
    // both correlations already equal 1, so no candidate can raise the sum
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/collinear.csv");
    let cfg = ExperimentConfig {
        runs: 2,
        top_n: 10,
        pso: PsoParams {
            max_evaluations: 500,
            ..PsoParams::default()
        },
        ..ExperimentConfig::new(ArchiveSource::file(path))
    };
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, ExperimentError::AllInfeasible { runs: 2 }), "{err}");
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn file_source_and_unknown_group() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("race.csv");
    let archive = synthesize_archive(&SynthSpec::low_correlation(6)).unwrap();
    write_csv(archive.records(), std::fs::File::create(&path).unwrap()).unwrap();

    let r = run_experiment(&ExperimentConfig {
        runs: 2,
        ..ExperimentConfig::new(ArchiveSource::file(&path))
    })
    .unwrap();
    assert_eq!(r.label, "race");
    assert!((r.correlation.unwrap().sum - 0.21).abs() < 0.01);

    let err = run_experiment(&ExperimentConfig {
        group: "F40-44".into(),
        ..ExperimentConfig::new(ArchiveSource::file(&path))
    })
    .unwrap_err();
    assert!(matches!(
        err,
        ExperimentError::Archive(ArchiveError::GroupTooSmall { .. })
    ));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn correlate_prints_four_decimals() {
    let pair = correlate_command(&synthetic(7), "M25-29", 30).unwrap();
    let text = render_correlation(&pair);
    assert_eq!(text, "r_swim_bike = 0.7300\nr_bike_run = 0.0000\nsum = 0.7300\n");
}

#[test]
fn correlate_names_constant_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    std::fs::write(
        &path,
        "name,nation,category,place,swim,t1,bike,t2,run,overall
A,X,G,1,30.0,2.0,150.0,2.0,90.0,274.0
B,X,G,2,31.0,2.0,150.0,2.0,92.0,277.0
C,X,G,3,33.0,2.0,150.0,2.0,91.0,278.0
",
    )
    .unwrap();
    let err = correlate_command(&ArchiveSource::file(&path), "G", 3).unwrap_err();
    assert!(err.to_string().contains("bike"), "{err}");
    assert_eq!(err.exit_code(), 3);
}
