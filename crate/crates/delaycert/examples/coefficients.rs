//! Inspect the weighted orthogonal-basis constants on an interval.
//!
//! Prints every closed-form constant the criterion consumes — the basis
//! shifts `c₁..c₄`, the squared norms `q₀..q₃`, the deliberate
//! non-orthogonality `q₁₃`, and the split point `ξ` — and compares them with
//! their flat-weight limits `c₁ → −d/2`, `c₄ → −2`, `ξ → midpoint`,
//! `q₀ → d`, `q₁ → d³/12`, which the unweighted bound uses directly.  As
//! `k → 0` the two columns agree; at table rates (`k = 10⁻⁶`) they match to
//! several digits, which is the consistency the toolkit's limit test pins.
//!
//! ```text
//! cargo run --example coefficients -- [h] [k]
//! ```
//!
//! Defaults: `1.0 0.5`.

use delaycert::inequality::{compute_coefficients, default_root_tol, Interval, DEFAULT_QUAD_TOL};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let h: f64 = args.first().map_or(1.0, |s| s.parse().expect("h"));
    let k: f64 = args.get(1).map_or(0.5, |s| s.parse().expect("k"));

    let interval = Interval::new(0.0, h, k).expect("valid interval");
    let c = compute_coefficients(interval, DEFAULT_QUAD_TOL, default_root_tol(h))
        .expect("basis coefficients");
    let d = interval.length();

    println!("weighted basis on [0, {h}] at rate k = {k}   (w(u) = e^(-2k(u-{h})))");
    println!("{:<8} {:>18} {:>18}", "constant", "value", "limit (k -> 0)");
    let rows: [(&str, f64, f64); 8] = [
        ("c1", c.c1, -d / 2.0),
        ("c2", c.c2, -d),
        ("c3", c.c3, d * d / 6.0),
        ("c4", c.c4, -2.0),
        ("xi", c.split, d / 2.0),
        ("q0", c.q0, d),
        ("q1", c.q1, d * d * d / 12.0),
        ("q13", c.q13, d * d / 4.0),
    ];
    for (name, value, limit) in rows {
        println!("{name:<8} {value:>18.12} {limit:>18.12}");
    }
    println!("q2 = {:.12e}, q3 = {:.12e}", c.q2, c.q3);
    println!("weight scale w = e^(2kd) = {:.12}", c.w);
}
