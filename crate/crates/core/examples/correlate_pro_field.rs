//! Swim-bike and bike-run correlation of the top five of a professional field.

use splitswarm::archive::read_csv;
use splitswarm::stats::{archive_correlation, pearson};
use splitswarm::Archive;

const PRO_TOP5: &str = include_str!("../fixtures/pro_top5.csv");

fn main() {
    let loaded = read_csv(PRO_TOP5.as_bytes()).expect("fixture parses");
    let archive = Archive::new("pro-top5", "PRO-M", loaded.records).expect("fixture is ordered");
    let cols = archive.columns();

    println!("{:<20} {:>8} {:>8} {:>8}", "athlete", "swim", "bike", "run");
    for r in archive.records() {
        let [s, _, b, _, run] = r.splits().map(|d| d.minutes());
        println!("{:<20} {s:>8.2} {b:>8.2} {run:>8.2}", r.athlete_name);
    }

    let pair = archive_correlation(&archive).unwrap();
    println!();
    println!("r swim-bike  {:.4}", pair.r_swim_bike);
    println!("r bike-run   {:.4}", pair.r_bike_run);
    println!("sum          {:.4}", pair.sum);
    println!("r swim-run   {:.4}", pearson(&cols.swim, &cols.run).unwrap());
}
