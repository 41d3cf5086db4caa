//! Randomized soundness check of the integral inequalities.
//!
//! Draws seeded random smooth test functions and positive-definite weights,
//! evaluates both sides of every integral estimate the criterion rests on by
//! adaptive quadrature, and reports the worst signed slack per inequality.
//! Any slack below `−10⁻⁸` would falsify the implementation.
//!
//! ```text
//! cargo run --example verify_inequalities -- [seed] [count]
//! ```
//!
//! Defaults: `7 1000` (a thousand trials per inequality, a few seconds).

use std::time::Instant;

use delaycert::inequality::verify::run_suite;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().map_or(7, |s| s.parse().expect("seed"));
    let count: usize = args.get(1).map_or(1000, |s| s.parse().expect("count"));

    let t0 = Instant::now();
    let report = run_suite(seed, count).expect("suite");
    for lemma in &report.lemmas {
        println!(
            "{:28} {} trials   {} violations   worst slack {:+.3e}",
            lemma.name, lemma.trials, lemma.violations, lemma.worst_slack
        );
    }
    println!(
        "seed {seed}: {} violations total in {:.2}s (tolerance {:.0e})",
        report.total_violations(),
        t0.elapsed().as_secs_f64(),
        report.slack_tolerance
    );
    std::process::exit(if report.passed() { 0 } else { 1 });
}
