//! End-to-end certification: solve the criterion at one point, recheck the
//! witness with a dense eigensolver, compute the decay envelope, and then
//! simulate the network to confirm the trajectory honors the certificate.
//!
//! ```text
//! cargo run --example certify_witness -- [model] [h] [mu] [k] [t_end]
//! ```
//!
//! Defaults: `example1 1.0 0.0 1.0 30`.  The simulated delay is constant at
//! `h` when μ = 0, otherwise `h(t) = (h−μ) + μ·sin(t)` (stays ≤ h with
//! `|ḣ| ≤ μ`).

use delaycert::inequality::{compute_coefficients, default_root_tol, Interval, DEFAULT_QUAD_TOL};
use delaycert::lmi::{build_theorem_lmis, compute_overshoot, AnalysisParams, ValuedRegistry};
use delaycert::presets::model_by_name;
use delaycert::sdp::{certify, solve_feasibility, FeasibilityOptions, Verdict};
use delaycert::sim::{check_envelope, estimate_decay_rate, simulate, DelayFunction, DEFAULT_DT};
use nalgebra::DVector;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("example1");
    let h: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("h"));
    let mu: f64 = args.get(2).map_or(0.0, |s| s.parse().expect("mu"));
    let k: f64 = args.get(3).map_or(1.0, |s| s.parse().expect("k"));
    let t_end: f64 = args.get(4).map_or(30.0, |s| s.parse().expect("t_end"));

    let model = model_by_name(name).expect("model: example1 | example2 | example3");
    let params = AnalysisParams::new(h, mu, k).expect("valid analysis point");
    let coeffs = compute_coefficients(
        Interval::new(0.0, h, k).expect("valid window"),
        DEFAULT_QUAD_TOL,
        default_root_tol(h),
    )
    .expect("basis coefficients");
    let system = build_theorem_lmis(&model, &params, &coeffs).expect("assembly");
    let report = solve_feasibility(&system, &FeasibilityOptions::default()).expect("solve");
    println!(
        "{name} at (h={h}, mu={mu}, k={k}): {:?}   margin {:+.3e}",
        report.verdict, report.margin
    );
    if report.verdict != Verdict::Feasible {
        println!("no certificate at this point; nothing to simulate against");
        std::process::exit(1);
    }

    let cert = certify(&system, &report.values).expect("certification");
    println!(
        "witness eigenvalue slack {:+.3e} (margin {:+.3e}); normalization {:.6}",
        cert.min_slack, report.margin, cert.normalization
    );
    let witness = ValuedRegistry::new(system.registry.clone(), report.values.clone())
        .expect("witness registry");
    let envelope = compute_overshoot(&witness, &model, &params).expect("envelope");
    println!(
        "certified envelope: ||z(t)|| <= {:.4}·||phi||·e^(-{k}·t)",
        envelope.h_factor
    );

    let delay = if mu == 0.0 {
        DelayFunction::constant(h).expect("valid delay")
    } else {
        DelayFunction::new(h - mu, mu, 1.0).expect("valid delay")
    };
    let z0 = DVector::from_fn(model.n(), |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
    let traj = simulate(&model, delay, &z0, t_end, DEFAULT_DT).expect("simulation");
    let check = check_envelope(&traj, envelope.h_factor, k);
    println!(
        "envelope check over [0, {t_end}]: {} (worst ratio {:.4})",
        if check.passed() { "pass" } else { "VIOLATED" },
        check.worst_ratio
    );
    match estimate_decay_rate(&traj, (5.0, t_end)) {
        Ok(k_est) => println!("empirical decay rate {k_est:.4} vs certified {k}"),
        Err(e) => println!("decay rate not estimable: {e}"),
    }
    std::process::exit(if check.passed() { 0 } else { 2 });
}
