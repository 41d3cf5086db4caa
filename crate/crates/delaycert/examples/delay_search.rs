//! Bisect for the maximal admissible delay bound `h*`.
//!
//! Fixes the exponential rate (the published delay tables use `k = 10⁻⁶`,
//! i.e. plain asymptotic stability up to solver resolution) and a
//! delay-derivative bound `μ`, then bisects the largest `h` the criterion
//! certifies, widening the initial bracket if its upper end is still
//! feasible.  A post-scan above the bound confirms the boundary.
//!
//! ```text
//! cargo run --example delay_search -- [model] [mu] [k] [tolerance]
//! ```
//!
//! Defaults: `example3 0.9 1e-6 1e-4` (published bound: 2.2092).

use std::time::Instant;

use delaycert::presets::{model_by_name, SearchKind, TABLE_RATE};
use delaycert::search::{max_delay, post_scan, ProbeStatus, SearchSpec};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("example3");
    let mu: f64 = args.get(1).map_or(0.9, |s| s.parse().expect("mu"));
    let k: f64 = args.get(2).map_or(TABLE_RATE, |s| s.parse().expect("k"));
    let tol: f64 = args.get(3).map_or(1e-4, |s| s.parse().expect("tolerance"));

    let model = model_by_name(name).expect("model: example1 | example2 | example3");
    let mut spec = SearchSpec::for_delay();
    spec.tolerance = tol;

    let t0 = Instant::now();
    let result = max_delay(&model, mu, k, &spec).expect("delay search");
    println!(
        "{name} at (mu={mu}, k={k:.0e}): h* = {:.6}   ({} probes, {} indeterminate, {:.1}s)",
        result.optimum,
        result.probes.len(),
        result.indeterminate_count,
        t0.elapsed().as_secs_f64()
    );
    if result.widened {
        println!("initial bracket was widened: its upper end was still feasible");
    }
    if result.low_confidence {
        println!("low confidence: several probes sat inside the solver trust band");
    }

    let scan = post_scan(
        &model,
        SearchKind::MaxDelay,
        k,
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
        "post-scan above h*: {feasible_above} feasible of {} probes (expect 0)",
        scan.len()
    );
    std::process::exit(if feasible_above == 0 { 0 } else { 1 });
}
