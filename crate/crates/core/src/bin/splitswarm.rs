use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use splitswarm::archive::{synthesize_archive, write_csv, InputFormat, SynthSpec};
use splitswarm::experiment::{
    correlate_command, emit_report, render_correlation, run_experiment, ArchiveSource, ExperimentConfig,
    ExperimentError, OutputFormat, PsoParams, DEFAULT_GROUP, DEFAULT_RUNS, DEFAULT_TOP_N,
};
use splitswarm::model::{ModelConfig, SplitBounds, DEFAULT_K_MAX};

#[derive(Parser)]
#[command(
    name = "splitswarm",
    version,
    about = "Triathlon split-time prediction by particle swarm search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict split times over several independent runs and print the table.
    Predict(PredictArgs),
    /// Print the swim-bike and bike-run correlations of an archive.
    Correlate(CorrelateArgs),
    /// Write a synthetic archive as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Results archive (CSV or JSON).
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "synth_spec",
        required_unless_present = "synth_spec"
    )]
    archive: Option<PathBuf>,
    /// Synthetic archive parameters, inline JSON or a path to a JSON file.
    #[arg(long, value_name = "JSON")]
    synth_spec: Option<String>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value = DEFAULT_GROUP)]
    group: String,
    #[arg(long, default_value_t = DEFAULT_TOP_N)]
    top_n: usize,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target ceiling in minutes.
    #[arg(long, value_name = "MINUTES", conflicts_with = "personal_best")]
    kmax: Option<f64>,
    /// Personal best in minutes; the ceiling becomes 95% of it.
    #[arg(long, value_name = "MINUTES")]
    personal_best: Option<f64>,
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    max_fes: Option<usize>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Split bounds, inline JSON or a path, e.g. {"swim":[25,50],...}.
    #[arg(long, value_name = "JSON")]
    bounds: Option<String>,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Inline JSON or a path; defaults to the high-correlation preset.
    #[arg(long, value_name = "JSON")]
    synth_spec: Option<String>,
    /// Overrides the seed in the spec.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Csv,
    Json,
}

impl From<Output> for OutputFormat {
    fn from(o: Output) -> Self {
        match o {
            Output::Text => OutputFormat::Text,
            Output::Csv => OutputFormat::Csv,
            Output::Json => OutputFormat::Json,
        }
    }
}

/// Error reported to the user together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn json_arg<T: DeserializeOwned>(flag: &str, text: &str) -> Result<T, Failure> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| usage(format!("--{flag}: cannot read {text}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn source(args: &SourceArgs) -> Result<ArchiveSource, Failure> {
    match (&args.archive, &args.synth_spec) {
        (Some(path), _) => Ok(ArchiveSource::File {
            path: path.clone(),
            format: match args.format {
                Some(Format::Csv) => InputFormat::Csv,
                Some(Format::Json) => InputFormat::Json,
                None => InputFormat::from_path(path),
            },
        }),
        (None, Some(spec)) => Ok(ArchiveSource::Synthetic(json_arg("synth-spec", spec)?)),
        (None, None) => Err(usage("one of --archive or --synth-spec is required")),
    }
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let result = match out {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush())
        }
    };
    result.map_err(|e| Failure {
        code: 1,
        message: format!("writing output: {e}"),
    })
}

fn predict(args: PredictArgs) -> Result<(), Failure> {
    let mut model = match (args.kmax, args.personal_best) {
        (_, Some(pb)) => ModelConfig::from_personal_best(pb),
        (k, None) => ModelConfig::explicit(k.unwrap_or(DEFAULT_K_MAX)),
    }
    .map_err(|e| usage(e.to_string()))?;
    if let Some(b) = &args.bounds {
        let bounds: SplitBounds = json_arg("bounds", b)?;
        model = model.with_bounds(bounds).map_err(|e| usage(e.to_string()))?;
    }

    let defaults = PsoParams::default();
    let cfg = ExperimentConfig {
        group: args.source.group.clone(),
        top_n: args.source.top_n,
        runs: args.runs,
        base_seed: args.seed,
        pso: PsoParams {
            swarm_size: args.np.unwrap_or(defaults.swarm_size),
            max_evaluations: args.max_fes.unwrap_or(defaults.max_evaluations),
            c1: args.c1.unwrap_or(defaults.c1),
            c2: args.c2.unwrap_or(defaults.c2),
        },
        model,
        output: args.output.into(),
        ..ExperimentConfig::new(source(&args.source)?)
    };

    let report = run_experiment(&cfg)?;
    if report.skipped_rows > 0 {
        eprintln!("warning: {} invalid archive rows skipped", report.skipped_rows);
    }
    for f in &report.failed {
        eprintln!("warning: run {} (seed {}): {}", f.run, f.seed, f.reason);
    }
    write_out(args.out.as_deref(), &emit_report(&report, cfg.output))
}

fn correlate(args: CorrelateArgs) -> Result<(), Failure> {
    let pair = correlate_command(&source(&args.source)?, &args.source.group, args.source.top_n)?;
    write_out(args.out.as_deref(), render_correlation(&pair).as_bytes())
}

fn synth(args: SynthArgs) -> Result<(), Failure> {
    let mut spec = match &args.synth_spec {
        Some(s) => json_arg::<SynthSpec>("synth-spec", s)?,
        None => SynthSpec::high_correlation(0),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let archive = synthesize_archive(&spec).map_err(|e| Failure::from(ExperimentError::from(e)))?;
    let mut bytes = Vec::new();
    write_csv(archive.records(), &mut bytes).map_err(|e| Failure::from(ExperimentError::from(e)))?;
    write_out(args.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Predict(a) => predict(a),
        Command::Correlate(a) => correlate(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
