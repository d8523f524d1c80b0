//! Race-time strings in, minutes out, and back again.
//!
//! cargo run --example parse_times -- 4:59:59.82 33:51.15 91.9613

use splitswarm::timekit::{format_duration, parse_duration, FormatHint, TimeStyle};

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        args = ["4:59:59.82", "33:51.15", "91.9613", "1:61:00", "-3:00"]
            .map(String::from)
            .to_vec();
    }
    for text in &args {
        match parse_duration(text, FormatHint::Auto) {
            Ok(d) => println!(
                "{text:>12} -> {:>10.4} min  hms {:<12} ms {:<12} dec {}",
                d.minutes(),
                format_duration(d, TimeStyle::Hms),
                format_duration(d, TimeStyle::Ms),
                format_duration(d, TimeStyle::DecimalMinutes),
            ),
            Err(e) => println!("{text:>12} -> error: {e}"),
        }
    }
}
