//! Generate archives with chosen correlations and check what came out.

use splitswarm::archive::{synthesize_archive, SynthSpec};
use splitswarm::stats::archive_correlation;

fn main() {
    for (sb, br) in [(0.73, 0.0), (0.21, 0.0), (0.6, 0.3), (0.9, -0.2)] {
        let spec = SynthSpec::new(11, 30, sb, br);
        let archive = synthesize_archive(&spec).unwrap();
        let pair = archive_correlation(&archive).unwrap();
        let best = archive.records()[0].overall;
        let last = archive.records().last().unwrap().overall;
        println!(
            "target ({sb:+.2}, {br:+.2})  got ({:+.4}, {:+.4})  sum {:.4}  overall {best} .. {last}",
            pair.r_swim_bike, pair.r_bike_run, pair.sum
        );
    }
}
