//! Bisect for the maximal admissible exponential rate `k*`.
//!
//! Fixes `(h, μ)` for one of the bundled benchmark networks and searches the
//! largest decay rate the criterion certifies, then scans a band above the
//! bound to confirm nothing there is feasible.  With the defaults this
//! reproduces the first row of the published rate table (`k* ≈ 1.2477` at
//! `h = 1`, `μ = 0` — the bisection lands within solver practice of it).
//!
//! ```text
//! cargo run --example rate_search -- [model] [h] [mu] [tolerance]
//! ```
//!
//! Defaults: `example1 1.0 0.0 1e-4`.

use std::time::Instant;

use delaycert::presets::{model_by_name, SearchKind};
use delaycert::search::{max_rate, post_scan, ProbeStatus, SearchSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("example1");
    let h: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("h"));
    let mu: f64 = args.get(2).map_or(0.0, |s| s.parse().expect("mu"));
    let tol: f64 = args.get(3).map_or(1e-4, |s| s.parse().expect("tolerance"));

    let model = model_by_name(name).expect("model: example1 | example2 | example3");
    let mut spec = SearchSpec::for_rate(&model);
    spec.tolerance = tol;

    let t0 = Instant::now();
    let result = max_rate(&model, h, mu, &spec).expect("rate search");
    println!(
        "{name} at (h={h}, mu={mu}): k* = {:.6}   ({} probes, {} indeterminate, {:.1}s)",
        result.optimum,
        result.probes.len(),
        result.indeterminate_count,
        t0.elapsed().as_secs_f64()
    );
    if result.low_confidence {
        println!("low confidence: several probes sat inside the solver trust band");
    }
    if result.saturated {
        println!("bracket saturated at the rate ceiling 0.999·min_i c_i");
    }

    let scan = post_scan(
        &model,
        SearchKind::MaxRate,
        h,
        mu,
        result.optimum,
        10,
        0.5,
        &spec,
    )
    .expect("post-scan");
    let feasible_above = scan
        .iter()
        .filter(|p| p.status == ProbeStatus::Feasible)
        .count();
    println!(
        "post-scan above k*: {feasible_above} feasible of {} probes (expect 0)",
        scan.len()
    );
    std::process::exit(if feasible_above == 0 { 0 } else { 1 });
}
