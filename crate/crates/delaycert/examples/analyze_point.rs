//! Decide exponential stability at a single analysis point.
//!
//! Assembles the criterion for one of the bundled benchmark networks at
//! `(h, μ, k)`, solves the margin problem, and — when feasible — re-checks
//! the witness with a dense eigensolver and prints the decay envelope
//! `‖z(t)‖ ≤ H‖φ‖e^{−kt}`.
//!
//! ```text
//! cargo run --example analyze_point -- [model] [h] [mu] [k]
//! ```
//!
//! Defaults: `example1 1.0 0.0 1.0`.

use std::time::Instant;

use delaycert::inequality::{compute_coefficients, default_root_tol, Interval, DEFAULT_QUAD_TOL};
use delaycert::lmi::{build_theorem_lmis, compute_overshoot, AnalysisParams, ValuedRegistry};
use delaycert::presets::model_by_name;
use delaycert::sdp::{certify, solve_feasibility, FeasibilityOptions, Verdict};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("example1");
    let h: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("h"));
    let mu: f64 = args.get(2).map_or(0.0, |s| s.parse().expect("mu"));
    let k: f64 = args.get(3).map_or(1.0, |s| s.parse().expect("k"));

    let model = model_by_name(name).expect("model: example1 | example2 | example3");
    let params = AnalysisParams::new(h, mu, k).expect("valid analysis point");
    let t0 = Instant::now();
    let coeffs = compute_coefficients(
        Interval::new(0.0, h, k).expect("valid window"),
        DEFAULT_QUAD_TOL,
        default_root_tol(h),
    )
    .expect("basis coefficients");
    let system = build_theorem_lmis(&model, &params, &coeffs).expect("assembly");
    let assembled = t0.elapsed();

    let report = solve_feasibility(&system, &FeasibilityOptions::default()).expect("solve");
    println!(
        "{name} at (h={h}, mu={mu}, k={k}): {:?}   margin {:+.3e}",
        report.verdict, report.margin
    );
    println!(
        "assembly {:.1} ms   solve {:.1} ms   {} iterations   status {}",
        assembled.as_secs_f64() * 1e3,
        report.solve_time * 1e3,
        report.iterations,
        report.solver_status
    );

    if report.verdict == Verdict::Feasible {
        let cert = certify(&system, &report.values).expect("certification");
        println!(
            "independent eigensolver slack: {:+.3e} (normalization {:.6})",
            cert.min_slack, cert.normalization
        );
        let witness = ValuedRegistry::new(system.registry.clone(), report.values.clone())
            .expect("witness registry");
        let envelope = compute_overshoot(&witness, &model, &params).expect("envelope");
        println!(
            "decay envelope: ||z(t)|| <= {:.4}·||phi||·e^(-{k}·t)",
            envelope.h_factor
        );
        std::process::exit(0);
    }
    std::process::exit(1);
}
