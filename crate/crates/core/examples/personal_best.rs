//! Ceiling from a personal best instead of a fixed target.

use splitswarm::archive::{synthesize_archive, SynthSpec};
use splitswarm::model::{predict, resolve_k_max, ModelConfig};
use splitswarm::timekit::{parse_duration, FormatHint};

fn main() {
    let pb = std::env::args().nth(1).unwrap_or_else(|| "5:10:00".into());
    let pb = parse_duration(&pb, FormatHint::Auto).expect("a time such as 5:10:00");
    let cfg = ModelConfig::from_personal_best(pb.minutes()).expect("ceiling within the split bounds");
    let archive = synthesize_archive(&SynthSpec::high_correlation(2)).unwrap();
    let p = predict(&archive, &cfg, &cfg.pso_config(5)).unwrap();
    println!("personal best {pb}  ceiling {}", resolve_k_max(&cfg).unwrap());
    println!("predicted     {}", p.total);
}
