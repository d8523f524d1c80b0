//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if any fails.
//!
//! cargo test --release -p splitswarm --test acceptance

use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};

use splitswarm::archive::{extend_archive, read_csv, synthesize_archive, write_csv, Archive, ResultRecord, SynthSpec};
use splitswarm::experiment::{emit_report, run_experiment, ArchiveSource, ExperimentConfig, OutputFormat};
use splitswarm::model::{ModelConfig, SplitBounds, SplitVector};
use splitswarm::pso::{self, Particle, PsoConfig, SwarmRng};
use splitswarm::stats::{archive_correlation, pearson};
use splitswarm::timekit::{format_duration, parse_duration, Duration, FormatHint, TimeStyle};

const PRO_TOP5: &str = include_str!("../fixtures/pro_top5.csv");
const PROPERTY_CASES: u32 = 1000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn pro_top5() -> Archive {
    Archive::new("pro-top5", "PRO-M", read_csv(PRO_TOP5.as_bytes()).unwrap().records).unwrap()
}

fn correlation_reproduction() -> Verdict {
    let pair = archive_correlation(&pro_top5()).unwrap();
    let sb_ok = (pair.r_swim_bike - 0.9938).abs() <= 0.0005;
    let br_ok = (pair.r_bike_run - 0.1804).abs() <= 0.0005;
    verdict(
        sb_ok && br_ok,
        format!(
            "r_swim_bike {:.5} (want 0.9938±0.0005), r_bike_run {:.5} (want 0.1804±0.0005)",
            pair.r_swim_bike, pair.r_bike_run
        ),
    )
}

/// Direct transcription of the velocity rule and the clamp-and-stop repair,
/// written over whole vectors.
fn transcribed_step(p: &Particle, g: &[f64], cfg: &PsoConfig, u1: f64, u2: f64) -> (Vec<f64>, Vec<f64>) {
    let d = p.position.len();
    let v_new: Vec<f64> = (0..d)
        .map(|j| {
            p.velocity[j]
                + cfg.c1 * u1 * (p.personal_best_position[j] - p.position[j])
                + cfg.c2 * u2 * (g[j] - p.position[j])
        })
        .collect();
    let x_raw: Vec<f64> = (0..d).map(|j| p.position[j] + v_new[j]).collect();
    let x: Vec<f64> = (0..d).map(|j| x_raw[j].clamp(cfg.lower[j], cfg.upper[j])).collect();
    let v: Vec<f64> = (0..d).map(|j| if x[j] == x_raw[j] { v_new[j] } else { 0.0 }).collect();
    (x, v)
}

fn oracle_equivalence() -> Verdict {
    let mut gen = SwarmRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for dim in [1usize, 5] {
        for _ in 0..1000 {
            let lower: Vec<f64> = (0..dim).map(|_| gen.gen_range(-10.0..0.0)).collect();
            let upper: Vec<f64> = lower.iter().map(|l| l + gen.gen_range(0.5..20.0)).collect();
            let inside =
                |gen: &mut SwarmRng| -> Vec<f64> { (0..dim).map(|j| gen.gen_range(lower[j]..=upper[j])).collect() };
            let particle = Particle {
                position: inside(&mut gen),
                velocity: (0..dim).map(|_| gen.gen_range(-8.0..8.0)).collect(),
                personal_best_position: inside(&mut gen),
                personal_best_value: 0.0,
            };
            let global = inside(&mut gen);
            let mut cfg = PsoConfig::with_bounds(lower.clone(), upper.clone(), 0);
            cfg.c1 = gen.gen_range(0.0..3.0);
            cfg.c2 = gen.gen_range(0.0..3.0);

            let mut rng = SwarmRng::seed_from_u64(gen.gen());
            let mut draws = rng.clone();
            let (u1, u2): (f64, f64) = (draws.gen(), draws.gen());
            let got = pso::step_particle(&particle, &global, &cfg, &mut rng);
            let (x, v) = transcribed_step(&particle, &global, &cfg, u1, u2);
            for j in 0..dim {
                worst = worst
                    .max((got.position[j] - x[j]).abs())
                    .max((got.velocity[j] - v[j]).abs());
            }
            instances += 1;
        }
    }

    let mut monotone = true;
    let funcs: [fn(&[f64]) -> f64; 2] = [
        |x| x.iter().map(|v| v * v).sum(),
        |x| x.iter().map(|v| v.abs()).sum::<f64>() + (x[0] * 3.0).sin(),
    ];
    for seed in 0..20 {
        for f in &funcs {
            let cfg = PsoConfig::with_bounds(vec![-5.0; 5], vec![5.0; 5], seed);
            let out = pso::run(&cfg, f);
            monotone &= out.history.windows(2).all(|w| w[1] <= w[0]);
        }
    }
    verdict(
        worst <= 1e-12 && monotone,
        format!("{instances} instances, max deviation {worst:.1e}; history non-increasing on 40 runs: {monotone}"),
    )
}

fn engine_sanity() -> Verdict {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let bests: Vec<f64> = (0..20)
        .map(|seed| pso::run(&PsoConfig::with_bounds(vec![-5.0; 5], vec![5.0; 5], seed), &sphere).best_value)
        .collect();
    let hits = bests.iter().filter(|b| **b < 1e-3).count();
    let mut sorted = bests.clone();
    sorted.sort_by(f64::total_cmp);
    verdict(
        hits >= 18,
        format!(
            "{hits}/20 seeds below 1e-3 (want >= 18); median best {:.2e}, min {:.2e}",
            sorted[10], sorted[0]
        ),
    )
}

fn end_to_end() -> Verdict {
    let spec = SynthSpec {
        label: "age-group".into(),
        ..SynthSpec::new(5, 30, 0.7256, 0.0)
    };
    let achieved = archive_correlation(&synthesize_archive(&spec).unwrap()).unwrap().sum;
    let cfg = ExperimentConfig {
        model: ModelConfig::explicit(300.0).unwrap(),
        base_seed: 1000,
        ..ExperimentConfig::new(ArchiveSource::Synthetic(spec))
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("experiment failed: {e}")),
    };
    let bounds = SplitBounds::default();
    let mut problems = Vec::new();
    if (achieved - 0.7256).abs() > 0.05 {
        problems.push(format!("archive sum {achieved:.4}"));
    }
    if report.per_run.len() != 5 {
        problems.push(format!("{} feasible runs of 5", report.per_run.len()));
    }
    for row in &report.per_run {
        let m = row.times.minutes;
        let splits = SplitVector::from_minutes([m[0], m[1], m[2], m[3], m[4]]).unwrap();
        if !(m[5] > 299.5 && m[5] <= 300.0) {
            problems.push(format!("run {} total {}", row.run, m[5]));
        }
        if !bounds.contains(&splits) {
            problems.push(format!("run {} outside bounds", row.run));
        }
        if row.r2 <= row.r1 {
            problems.push(format!("run {} r2 {} <= r1 {}", row.run, row.r2, row.r1));
        }
    }
    let totals: Vec<String> = report.per_run.iter().map(|r| r.times.formatted[5].clone()).collect();
    verdict(
        problems.is_empty(),
        format!(
            "archive sum {achieved:.4}; totals {}; {}",
            totals.join(" "),
            if problems.is_empty() {
                "all in bounds, r2 > r1".to_string()
            } else {
                problems.join(", ")
            }
        ),
    )
}

fn dispersion_ordering() -> Verdict {
    const TRIALS: u64 = 10;
    let mut wins = [0usize; 3];
    for trial in 0..TRIALS {
        let stdevs = |spec: SynthSpec| {
            let cfg = ExperimentConfig {
                runs: 20,
                base_seed: 10_000 * (trial + 1),
                ..ExperimentConfig::new(ArchiveSource::Synthetic(spec))
            };
            let sd = run_experiment(&cfg).unwrap().stdev.unwrap().minutes;
            [sd[0], sd[2], sd[4]]
        };
        let high = stdevs(SynthSpec::high_correlation(trial));
        let low = stdevs(SynthSpec::low_correlation(trial));
        for k in 0..3 {
            if high[k] < low[k] {
                wins[k] += 1;
            }
        }
    }
    let majority = TRIALS as usize / 2 + 1;
    verdict(
        wins.iter().all(|w| *w >= majority),
        format!(
            "high-correlation stdev smaller in swim {}/{TRIALS}, bike {}/{TRIALS}, run {}/{TRIALS} trials (want >= {majority} each)",
            wins[0], wins[1], wins[2]
        ),
    )
}

fn determinism() -> Verdict {
    let cfg = ExperimentConfig {
        base_seed: 77,
        ..ExperimentConfig::new(ArchiveSource::Synthetic(SynthSpec::high_correlation(9)))
    };
    let formats = [OutputFormat::Text, OutputFormat::Csv, OutputFormat::Json];
    let render = || {
        let r = run_experiment(&cfg).unwrap();
        formats.map(|f| emit_report(&r, f))
    };
    let (a, b) = (render(), render());
    let same = a == b;
    verdict(
        same,
        format!("text/csv/json byte-identical across two invocations: {same}"),
    )
}

fn record_strategy() -> impl Strategy<Value = Vec<ResultRecord>> {
    let cs = |lo: u32, hi: u32| (lo * 6000..hi * 6000).prop_map(|c| f64::from(c) / 6000.0);
    let row = (
        "[A-Z][a-z]{1,8}( [A-Z][a-z]{1,8})?",
        "[A-Z]{3}",
        prop_oneof![Just("M25-29"), Just("F30-34"), Just("PRO-M")],
        [cs(20, 60), cs(1, 8), cs(120, 200), cs(1, 8), cs(70, 140)],
    );
    prop::collection::vec(row, 1..40).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (name, nation, category, s))| {
                let d = |m: f64| Duration::from_minutes(m).unwrap();
                let overall = d(s.iter().sum());
                ResultRecord {
                    athlete_name: name,
                    nation,
                    category: category.to_string(),
                    finish_place: i as u32 + 1,
                    swim: d(s[0]),
                    t1: d(s[1]),
                    bike: d(s[2]),
                    t2: d(s[3]),
                    run: d(s[4]),
                    overall,
                }
            })
            .collect()
    })
}

fn same_record(a: &ResultRecord, b: &ResultRecord) -> bool {
    let close = |x: Duration, y: Duration| (x.minutes() - y.minutes()).abs() <= TimeStyle::Hms.half_resolution();
    a.athlete_name == b.athlete_name
        && a.nation == b.nation
        && a.category == b.category
        && a.finish_place == b.finish_place
        && close(a.swim, b.swim)
        && close(a.t1, b.t1)
        && close(a.bike, b.bike)
        && close(a.t2, b.t2)
        && close(a.run, b.run)
        && close(a.overall, b.overall)
}

fn round_trips() -> Verdict {
    let mut outcomes = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| outcomes.push((name.to_string(), result));
    let runner = || {
        TestRunner::new(Config {
            failure_persistence: None,
            ..Config::with_cases(PROPERTY_CASES)
        })
    };

    check(
        "time round-trip",
        runner()
            .run(&(0.0f64..1500.0), |m| {
                let d = Duration::from_minutes(m).unwrap();
                for style in [TimeStyle::Hms, TimeStyle::Ms, TimeStyle::DecimalMinutes] {
                    let text = format_duration(d, style);
                    let back = parse_duration(&text, FormatHint::Auto).unwrap().minutes();
                    prop_assert!(
                        (back - m).abs() <= style.half_resolution() + 1e-9,
                        "{m} -> {text} -> {back}"
                    );
                    prop_assert_eq!(format_duration(Duration::from_minutes(back).unwrap(), style), text);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "archive write/load identity",
        runner()
            .run(&record_strategy(), |records| {
                let mut first = Vec::new();
                write_csv(&records, &mut first).unwrap();
                let loaded = read_csv(first.as_slice()).unwrap();
                prop_assert!(loaded.skipped.is_empty(), "{:?}", loaded.skipped);
                prop_assert_eq!(loaded.records.len(), records.len());
                for (a, b) in records.iter().zip(&loaded.records) {
                    prop_assert!(same_record(a, b), "{:?} vs {:?}", a, b);
                }
                let mut second = Vec::new();
                write_csv(&loaded.records, &mut second).unwrap();
                prop_assert_eq!(first, second);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "extend_archive size and immutability",
        runner()
            .run(
                &(
                    record_strategy(),
                    [25.0f64..50.0, 2.0..5.0, 140.0..180.0, 2.0..5.0, 85.0..120.0],
                ),
                |(records, m)| {
                    let base = Archive::new("p", "G", records).unwrap();
                    let before = base.clone();
                    let x = SplitVector::from_minutes(m).unwrap();
                    let ext = extend_archive(&base, &x);
                    prop_assert_eq!(&base, &before);
                    prop_assert_eq!(ext.len(), base.len() + 1);
                    prop_assert_eq!(&ext.records()[..base.len()], base.records());
                    let last = ext.records().last().unwrap();
                    prop_assert!(last.finish_place > base.records().last().unwrap().finish_place);
                    prop_assert_eq!(last.splits(), [x.swim, x.t1, x.bike, x.t2, x.run]);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );

    let paired = (3usize..80).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(-100.0f64..100.0, n),
        )
    });
    check(
        "pearson symmetry",
        runner()
            .run(&paired, |(x, y)| {
                let (a, b) = (pearson(&x, &y).unwrap(), pearson(&y, &x).unwrap());
                prop_assert!((a - b).abs() <= 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    check(
        "pearson affine invariance",
        runner()
            .run(
                &(paired, prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], -1000.0f64..1000.0),
                |((x, y), a, b)| {
                    let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                    let lhs = pearson(&scaled, &y).unwrap();
                    let rhs = a.signum() * pearson(&x, &y).unwrap();
                    prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );

    let failed: Vec<String> = outcomes
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    verdict(
        failed.is_empty(),
        if failed.is_empty() {
            format!(
                "{} suites x {PROPERTY_CASES} cases: {}",
                outcomes.len(),
                outcomes.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
            )
        } else {
            failed.join("; ")
        },
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 correlation reproduction", correlation_reproduction),
        ("2 velocity-rule oracle equivalence", oracle_equivalence),
        ("3 engine sanity on the sphere", engine_sanity),
        ("4 end-to-end prediction shape", end_to_end),
        ("5 dispersion ordering", dispersion_ordering),
        ("6 determinism", determinism),
        ("7 round-trip and invariant suites", round_trips),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!(
            "{} criterion {name} [{:.2}s]: {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("{} of {} criteria passed", 7 - failures, 7);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
