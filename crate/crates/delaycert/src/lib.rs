//! Exponential-stability certification for delayed neural networks.
//!
//! This crate decides, for a Hopfield-type network
//!
//! ```text
//!     ẋ(t) = −C x(t) + A g(x(t)) + B g(x(t − h(t))) + u,
//!     0 ≤ h(t) ≤ h,   |ḣ(t)| ≤ μ,
//! ```
//!
//! whether the equilibrium is exponentially stable with a prescribed decay
//! rate `k`, by assembling a linear-matrix-inequality criterion built on
//! weighted integral inequalities and solving it as a semidefinite program.
//! On top of the pointwise decision it provides bisection searches for the
//! largest admissible rate or delay, reproduction of the published benchmark
//! tables, and a delay-differential-equation simulator for cross-checking
//! certificates against trajectories.
//!
//! Module map:
//! * [`inequality`] — closed-form constants and oracles for the weighted
//!   integral inequalities (the analytical core),
//! * [`lmi`] — decision variables and the symmetric matrix expressions of the
//!   stability criterion,
//! * [`sdp`] — feasibility via margin maximization and independent
//!   certification of witnesses,
//! * [`search`] — bisection searches and table reproduction,
//! * [`sim`] — Runge–Kutta simulation of the delayed dynamics,
//! * [`presets`] — the three published benchmark models and reference values,
//! * [`cli`] — the `delaycert` binary's subcommands over all of the above.

pub mod cli;
pub mod inequality;
pub mod lmi;
pub mod presets;
pub mod sdp;
pub mod search;
pub mod sim;

/// Entry point used by the `delaycert` binary; returns the process exit code.
pub fn run() -> i32 {
    cli::run()
}
