//! Predicts per-discipline split times (swim, T1, bike, T2, run) for a
//! middle-distance triathlete aiming at a target finish time.
//!
//! A particle swarm searches the box of plausible splits for a vector whose
//! total sits just under the target ceiling and which, appended to an archive
//! of real results from the athlete's group, *raises* the archive's
//! swim-bike plus bike-run Pearson correlation. The prediction therefore
//! keeps the athlete's relative standing consistent across disciplines, the
//! way the field in that race actually behaved.
//!
//! Modules, bottom up:
//!
//! - [`timekit`]: race-time strings to and from minutes.
//! - [`stats`]: Pearson correlation and archive correlation sums.
//! - [`archive`]: loading, group selection, extension and synthesis of archives.
//! - [`pso`]: generic bound-constrained particle swarm optimizer.
//! - [`model`]: split vectors, bounds, target ceiling, fitness and `predict`.
//! - [`experiment`]: repeated independent runs and tabular reports.
//!
//! Runnable examples (`cargo run --release --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `parse_times` | time strings to minutes and back |
//! | `correlate_pro_field` | correlations of a five-athlete professional field |
//! | `sphere_swarm` | the bare optimizer on a test function |
//! | `synth_archive` | archives with chosen correlations |
//! | `fitness_forms` | how the fitness forms score the same candidates |
//! | `predict_splits` | one prediction and its search trace |
//! | `personal_best` | a ceiling derived from a personal best |
//! | `experiment_report` | five runs rendered as text, CSV or JSON |
//! | `correlation_dispersion` | prediction spread on strong vs weak correlation |
//!
//! ```
//! use splitswarm::archive::{synthesize_archive, SynthSpec};
//! use splitswarm::model::{predict, ModelConfig};
//!
//! let archive = synthesize_archive(&SynthSpec::high_correlation(1)).unwrap();
//! let cfg = ModelConfig::explicit(300.0).unwrap();
//! let p = predict(&archive, &cfg, &cfg.pso_config(42)).unwrap();
//! assert!(p.total.minutes() <= 300.0);
//! assert!(p.r2 > p.r1);
//! ```

pub mod archive;
pub mod experiment;
pub mod model;
pub mod pso;
pub mod stats;
pub mod timekit;

pub use archive::{Archive, ResultRecord};
pub use model::{predict, ModelConfig, Prediction, SplitVector};
pub use pso::PsoConfig;
pub use stats::CorrelationPair;
pub use timekit::Duration;
