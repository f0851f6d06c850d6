//! Runs the full property suite and prints one line per property.

use kgcur::verify::run_suite;

fn main() {
    let seed = std::env::args().nth(1).map_or(Ok(kgcur::config::DEFAULT_SEED), |s| s.parse()).expect("seed must be an integer");
    let report = run_suite(seed);
    for p in &report.properties {
        let verdict = if p.passed { "ok  " } else { "FAIL" };
        println!("{verdict} {:<28} {:>12.4e}  {:?} {:.1e}", p.name, p.measured, p.bound, p.threshold);
    }
    println!("{}", if report.passed { "all properties hold" } else { "some properties failed" });
    if !report.passed {
        std::process::exit(4);
    }
}
