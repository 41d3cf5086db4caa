//! Delay-differential simulation of the shifted network, decay-rate
//! estimation, and exponential-envelope checking.
//!
//! # Background
//!
//! The shifted equilibrium dynamics are
//!
//! ```text
//! ż(t) = −C z(t) + A f(z(t)) + B f(z(t − h(t))),    f_j(s) = L_j tanh(s),
//! ```
//!
//! with a time-varying delay `h(t) = h₀ + a·sin(ωt)` and a constant initial
//! history `z(θ) = z(0)` on `[−h_max, 0]`.  The activation choice realizes
//! the sector conditions exactly: `0 ≤ f_j(s)/s ≤ L_j` for all `s ≠ 0` and
//! `f_j(0) = 0`.  Trajectories are used two ways: to reproduce the published
//! trajectory figures and to check, per certified point, the exponential
//! envelope `‖z(t)‖ ≤ H‖φ‖e^{−kt}` of the stability definition against the
//! certificate's own `(H, k)`.
//!
//! # Implementation
//!
//! * Classic 4-stage explicit integration on a uniform grid.  The delayed
//!   state is read from an append-only history of `(z, ż)` samples via
//!   cubic Hermite interpolation (`ż` is the stored right-hand side, so the
//!   interpolant's local error stays below the integrator's).
//! * The step must satisfy `dt ≤ h_min/4`; then every delayed lookup during
//!   the stages of step `i` lands at least `3dt` left of `t_i`, so both
//!   bracketing samples already exist.
//! * The constant initial history is returned exactly (with zero slope) for
//!   lookups at `θ ≤ 0`.
//! * Order caveat: delay systems with constant history have derivative
//!   breaking points (at `t = 0` and wherever `t − h(t)` crosses one);
//!   formal 4th order holds only on windows free of them, which is how the
//!   order test measures it.
//!
//! # Assumptions
//!
//! * The delay never exceeds the stored window: `h₀ ≥ a ≥ 0` is required so
//!   `h(t) ∈ [h₀−a, h₀+a]` stays nonnegative.
//! * No stiff/implicit integration and no state-dependent delay; the
//!   published figures show smooth decay over tens of seconds, well inside
//!   the explicit method's stability region at the default step `10⁻³`.

use nalgebra::DVector;
use serde::Serialize;
use std::path::Path;

use crate::lmi::NetworkModel;

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default horizon, matching the published trajectory figures.
pub const DEFAULT_T_END: f64 = 30.0;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("step {dt} too large for minimal delay {h_min} (need dt ≤ h_min/4)")]
    StepTooLarge { dt: f64, h_min: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("degenerate estimation window: {detail}")]
    DegenerateWindow { detail: String },
    #[error("invalid input: {detail}")]
    BadInput { detail: String },
}

/// Sinusoidal delay `h(t) = h₀ + a·sin(ωt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct DelayFunction {
    pub h0: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl DelayFunction {
    /// Validates `h₀ ≥ a ≥ 0` (so `h(t) ≥ 0`) and finiteness.
    pub fn new(h0: f64, amplitude: f64, frequency: f64) -> Result<Self, SimError> {
        if !(h0.is_finite() && amplitude.is_finite() && frequency.is_finite()) {
            return Err(SimError::BadInput {
                detail: "delay parameters must be finite".into(),
            });
        }
        if !(0.0 <= amplitude && amplitude <= h0) {
            return Err(SimError::BadInput {
                detail: format!("need h0 ≥ amplitude ≥ 0, got h0 = {h0}, amplitude = {amplitude}"),
            });
        }
        if frequency < 0.0 {
            return Err(SimError::BadInput {
                detail: format!("frequency {frequency} must be nonnegative"),
            });
        }
        Ok(Self {
            h0,
            amplitude,
            frequency,
        })
    }

    /// Constant delay `h(t) = h₀`.
    pub fn constant(h0: f64) -> Result<Self, SimError> {
        Self::new(h0, 0.0, 0.0)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.h0 + self.amplitude * (self.frequency * t).sin()
    }

    /// Smallest delay value, `h₀ − a`.
    pub fn min(&self) -> f64 {
        self.h0 - self.amplitude
    }

    /// Largest delay value, `h₀ + a` (the history depth).
    pub fn max(&self) -> f64 {
        self.h0 + self.amplitude
    }

    /// Bound on `|ḣ(t)| = |aω·cos(ωt)|`.
    pub fn mu_bound(&self) -> f64 {
        self.amplitude * self.frequency
    }
}

/// A simulated trajectory on a uniform grid, plus the data that produced it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub delay: DelayFunction,
    /// The constant initial history value `z(θ) = z(0)`, `θ ∈ [−h_max, 0]`.
    pub initial_history: DVector<f64>,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.initial_history.len()
    }

    /// Supremum norm of the initial history (`‖φ‖`, constant history).
    pub fn history_norm(&self) -> f64 {
        self.initial_history.norm()
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("a trajectory has samples")
    }
}

/// Result of checking `‖z(tᵢ)‖ ≤ H‖φ‖e^{−k·tᵢ}` on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeCheck {
    pub h_factor: f64,
    pub k: f64,
    /// Times where the bound fails; the check passes iff this is empty.
    pub violation_times: Vec<f64>,
    /// Worst ratio `‖z(t)‖ / (H‖φ‖e^{−kt})` seen (≤ 1 when passing).
    pub worst_ratio: f64,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.violation_times.is_empty()
    }
}

fn activations(model: &NetworkModel, z: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(z.len(), |j, _| model.l()[j] * z[j].tanh())
}

fn rhs(model: &NetworkModel, z: &DVector<f64>, z_delayed: &DVector<f64>) -> DVector<f64> {
    -(model.c() * z) + model.a() * activations(model, z) + model.b() * activations(model, z_delayed)
}

/// Cubic-Hermite read of the stored history at time `tau ≤ current`.
fn history_at(
    tau: f64,
    dt: f64,
    z0: &DVector<f64>,
    states: &[DVector<f64>],
    derivs: &[DVector<f64>],
) -> DVector<f64> {
    if tau <= 0.0 {
        return z0.clone();
    }
    let fidx = tau / dt;
    let j = (fidx.floor() as usize).min(states.len().saturating_sub(2));
    let s = fidx - j as f64;
    let (z_a, z_b) = (&states[j], &states[j + 1]);
    let (d_a, d_b) = (&derivs[j], &derivs[j + 1]);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    z_a * h00 + d_a * (h10 * dt) + z_b * h01 + d_b * (h11 * dt)
}

/// Integrates the delayed network from the constant history `z(θ) = z0`.
pub fn simulate(
    model: &NetworkModel,
    delay: DelayFunction,
    z0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, SimError> {
    if z0.len() != model.n() {
        return Err(SimError::BadInput {
            detail: format!(
                "initial state has {} entries for an {}-neuron model",
                z0.len(),
                model.n()
            ),
        });
    }
    if !(dt > 0.0 && dt.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(SimError::BadInput {
            detail: format!("need positive finite dt and t_end, got dt = {dt}, t_end = {t_end}"),
        });
    }
    if !z0.iter().all(|v| v.is_finite()) {
        return Err(SimError::BadInput {
            detail: "initial state must be finite".into(),
        });
    }
    if dt > delay.min() / 4.0 {
        return Err(SimError::StepTooLarge {
            dt,
            h_min: delay.min(),
        });
    }

    let steps = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states: Vec<DVector<f64>> = Vec::with_capacity(steps + 1);
    let mut derivs: Vec<DVector<f64>> = Vec::with_capacity(steps + 1);

    let lookup = |t: f64, states: &[DVector<f64>], derivs: &[DVector<f64>]| {
        history_at(t - delay.at(t), dt, z0, states, derivs)
    };

    times.push(0.0);
    states.push(z0.clone());
    derivs.push(rhs(model, z0, &lookup(0.0, &states, &derivs)));

    for i in 0..steps {
        let t = i as f64 * dt;
        let z = states[i].clone();
        // The slope at the left node is the stored derivative (the RHS there).
        let k1 = derivs[i].clone();
        let zd_mid = lookup(t + 0.5 * dt, &states, &derivs);
        let k2 = rhs(model, &(&z + &k1 * (0.5 * dt)), &zd_mid);
        let k3 = rhs(model, &(&z + &k2 * (0.5 * dt)), &zd_mid);
        let zd_end = lookup(t + dt, &states, &derivs);
        let k4 = rhs(model, &(&z + &k3 * dt), &zd_end);
        let next = &z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let t_next = (i + 1) as f64 * dt;
        if !next.iter().all(|v| v.is_finite()) {
            return Err(SimError::NonFinite { t: t_next });
        }
        times.push(t_next);
        derivs.push(rhs(model, &next, &zd_end));
        states.push(next);
    }

    Ok(Trajectory {
        dt,
        times,
        states,
        delay,
        initial_history: z0.clone(),
    })
}

/// Least-squares slope of `−log‖z(t)‖` over the window (the empirical decay
/// rate).
pub fn estimate_decay_rate(traj: &Trajectory, window: (f64, f64)) -> Result<f64, SimError> {
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (t, z) in traj.times.iter().zip(&traj.states) {
        if *t < window.0 || *t > window.1 {
            continue;
        }
        let norm = z.norm();
        if norm <= 0.0 {
            return Err(SimError::DegenerateWindow {
                detail: format!("zero-norm sample at t = {t}"),
            });
        }
        ts.push(*t);
        logs.push(norm.ln());
    }
    if ts.len() < 10 {
        return Err(SimError::DegenerateWindow {
            detail: format!("only {} samples in [{}, {}]", ts.len(), window.0, window.1),
        });
    }
    let m = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / m;
    let l_mean = logs.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, l) in ts.iter().zip(&logs) {
        cov += (t - t_mean) * (l - l_mean);
        var += (t - t_mean) * (t - t_mean);
    }
    Ok(-cov / var)
}

/// Checks the exponential envelope `‖z(tᵢ)‖ ≤ H‖φ‖e^{−k·tᵢ}` sample-wise.
///
/// # Panics
///
/// When `h_factor < 1` or `k ≤ 0` (the envelope of the stability definition
/// always has `H ≥ 1`, `k > 0`).
pub fn check_envelope(traj: &Trajectory, h_factor: f64, k: f64) -> EnvelopeCheck {
    assert!(
        h_factor >= 1.0 && k > 0.0,
        "envelope needs H ≥ 1 and k > 0 (got H = {h_factor}, k = {k})"
    );
    let phi = traj.history_norm();
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for (t, z) in traj.times.iter().zip(&traj.states) {
        let bound = h_factor * phi * (-k * t).exp();
        let norm = z.norm();
        if bound > 0.0 {
            worst = worst.max(norm / bound);
        }
        if norm > bound {
            violations.push(*t);
        }
    }
    EnvelopeCheck {
        h_factor,
        k,
        violation_times: violations,
        worst_ratio: worst,
    }
}

/// Maxima of `‖z(t)‖` over consecutive windows of length `window_len`
/// starting at `t_start`.
pub fn window_maxima(traj: &Trajectory, t_start: f64, window_len: f64) -> Vec<f64> {
    let mut maxima = Vec::new();
    for (t, z) in traj.times.iter().zip(&traj.states) {
        if *t < t_start {
            continue;
        }
        let w = ((*t - t_start) / window_len) as usize;
        if w >= maxima.len() {
            maxima.resize(w + 1, 0.0f64);
        }
        maxima[w] = maxima[w].max(z.norm());
    }
    maxima
}

/// Monotone decay in the qualitative sense of an oscillating delayed
/// trajectory: with a sinusoidal delay the norm ripples on the delay period,
/// so "decaying monotonically" is read as strict decrease of the norm's
/// maxima over consecutive windows of one period (`2π/ω`; one second for a
/// constant delay).
pub fn decays_monotonically(traj: &Trajectory, t_start: f64) -> bool {
    let window = if traj.delay.frequency > 0.0 {
        std::f64::consts::TAU / traj.delay.frequency
    } else {
        1.0
    };
    let maxima = window_maxima(traj, t_start, window);
    maxima.len() >= 2 && maxima.windows(2).all(|w| w[1] < w[0])
}

/// Writes the trajectory as CSV: `t, z_1..z_n, norm, h` (one row per grid
/// point).
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<(), SimError> {
    let io_err = |e: std::io::Error| SimError::BadInput {
        detail: format!("write {}: {e}", path.display()),
    };
    let mut out = String::with_capacity(traj.times.len() * 16 * (traj.n() + 3));
    out.push('t');
    for j in 1..=traj.n() {
        out.push_str(&format!(",z_{j}"));
    }
    out.push_str(",norm,h\n");
    for (t, z) in traj.times.iter().zip(&traj.states) {
        out.push_str(&format!("{t:.6}"));
        for v in z.iter() {
            out.push_str(&format!(",{v:.9}"));
        }
        out.push_str(&format!(",{:.9},{:.6}\n", z.norm(), traj.delay.at(*t)));
    }
    std::fs::write(path, out).map_err(io_err)
}

#[derive(Serialize)]
struct TrajectoryMeta<'a> {
    n: usize,
    dt: f64,
    t_end: f64,
    samples: usize,
    delay: &'a DelayFunction,
    initial_state: Vec<f64>,
    final_norm: f64,
}

/// Writes the JSON metadata sidecar for a trajectory CSV.
pub fn write_trajectory_meta(traj: &Trajectory, path: &Path) -> Result<(), SimError> {
    let meta = TrajectoryMeta {
        n: traj.n(),
        dt: traj.dt,
        t_end: *traj.times.last().expect("a trajectory has samples"),
        samples: traj.times.len(),
        delay: &traj.delay,
        initial_state: traj.initial_history.iter().copied().collect(),
        final_norm: traj.final_state().norm(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| SimError::BadInput {
        detail: format!("serialize metadata: {e}"),
    })?;
    std::fs::write(path, json + "\n").map_err(|e| SimError::BadInput {
        detail: format!("write {}: {e}", path.display()),
    })
}
