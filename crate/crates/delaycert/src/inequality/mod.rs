//! Weighted integral inequalities for exponentially weighted quadratic forms.
//!
//! # Background
//!
//! Exponential stability analysis of delayed neural networks leads to integral
//! terms of the form
//!
//! ```text
//!     ∫ₐᵇ e^{2k(u−b)} zᵀ(u) R z(u) du ,      R ≻ 0,  k > 0,
//! ```
//!
//! which must be bounded **from below** by quadratic forms in a small number of
//! moments of `z` (the only quantities available to a Lyapunov–Krasovskii
//! argument). The sharpest published bound of this family projects the weighted
//! function onto a basis that is orthogonal with respect to the weight
//! `w(u) = e^{−2k(u−b)}`:
//!
//! * `p₀(u) = 1`
//! * `p₁(u) = (u−a) + c₁`                      (degree 1, ⟂ p₀)
//! * `p₂(u) = (u−a)² + c₂(u−a) + c₃`           (degree 2, ⟂ p₀, p₁)
//! * `p₃(u) = 1 + c₄·χ_{[a,ξ]}(u)`             (discontinuous, ⟂ p₀, p₂)
//!
//! where `χ` is the indicator of the leading subinterval and the split point
//! `ξ ∈ (a,b)` is chosen so that `∫ₐ^ξ p₂ w du = 0`, which makes `p₃ ⟂ p₂`.
//! `p₃` is *not* orthogonal to `p₁`; the residual cross moment
//! `q₁₃ = ⟨p₁,p₃⟩` is carried explicitly and shows up as the correction
//! `F₃ − (q₁₃/q₁)F₁` in the bound. With `Fᵢ = ∫ pᵢ φ w du`,
//! `qᵢ = ∫ pᵢ² w du`, and `φ = e^{2k(u−b)} z`, the master estimate reads
//!
//! ```text
//!     ∫ φᵀRφ w du ≥ (1/q₀)F₀ᵀRF₀ + (1/q₁)F₁ᵀRF₁ + (1/q₂)F₂ᵀRF₂
//!                   + (1/q₃)[F₃ − (q₁₃/q₁)F₁]ᵀ R [F₃ − (q₁₃/q₁)F₁] .
//! ```
//!
//! Specialised to `φ = e^{2k(u−b)} z`, the weighted projections `Fᵢ` collapse to
//! *unweighted* iterated integrals of `z` (the `Ω` combinations of
//! [`lemma4_bound`]), which is what makes the bound usable inside an LMI: the
//! moments are exactly the augmented-state entries of the stability criterion.
//!
//! The unweighted limit `k → 0` of the same construction is a Legendre-type
//! bound ([`lemma5_bound`], weights `1/d, 3/d, 5/d, 1/d`), and the companion
//! free-weighting-matrix-free bounds for double integrals of `ẋ` are provided
//! by [`lemma6_bounds`].
//!
//! # Implementation
//!
//! All coefficients reduce to the exponential moments
//!
//! ```text
//!     Mⱼ = ∫ₐᵇ (u−a)ʲ w(u) du = W · Iⱼ(d),     Iⱼ(x) = ∫₀ˣ sʲ e^{−2ks} ds,
//! ```
//!
//! with `d = b−a` and `W = e^{2kd}`. `Iⱼ` is evaluated by an alternating
//! series when `2kx < 1/2` (every published closed form is `0/0` at `k = 0`;
//! the series is their uniformly accurate Taylor evaluation, used in
//! particular for all `k < 1e−4`) and by the stable upward recurrence
//! `Iⱼ = (j·Iⱼ₋₁ − xʲe^{−2kx})/(2k)` otherwise. The coefficient identities
//!
//! ```text
//!     c₁ = −M₁/M₀                     (equals the published (b−a)/(W−1) − 1/(2k))
//!     q₁ = M₂ − M₁²/M₀
//!     c₂ = −(M₃ + c₁M₂)/q₁,   c₃ = −(M₂ + c₂M₁)/M₀
//!     q₂ = M₄ + 2c₂M₃ + (c₂²+2c₃)M₂ + 2c₂c₃M₁ + c₃²M₀
//!     c₄ = −M₀/P₀,   q₃ = q₀(q₀−P₀)/P₀,   q₁₃ = c₄(P₁ + c₁P₀)
//! ```
//!
//! (`Pⱼ` the partial moments over `[a,ξ]`) are used instead of the raw closed
//! forms because they keep the subtraction structure explicit: the worst
//! cancellation is ≈2 decimal digits in `q₂`, well inside double precision.
//! Every orthogonality relation is re-checked after the fact and
//! [`InequalityError::ToleranceNotMet`] is raised if a residual exceeds the
//! requested tolerance, guarding against transcription slips in the closed
//! forms.
//!
//! The split point is found by bisection of `F(ξ) = ∫ₐ^ξ p₂ w du` between the
//! two real roots of `p₂`: since `F(a) = F(b) = 0` and `p₂` is negative exactly
//! between its roots, `F` is strictly decreasing there and has exactly one
//! interior zero.
//!
//! # Assumptions
//!
//! * `b > a` and `k > K_FLOOR = 1e−9`. Below the floor the closed forms are
//!   numerically meaningless; callers wanting the unweighted bound should use
//!   [`lemma5_bound`] directly (the two agree to ~1e−5 relative at `k = 1e−8`,
//!   which is asserted by the limit-consistency tests).
//! * `R` is symmetric positive definite. Only dimensions are checked here;
//!   definiteness is the caller's contract (the bounds remain *valid* for
//!   `R ⪰ 0` but the equality analysis does not).
//! * Iterated integrals follow the convention `∫∫ = ∫ₐᵇ∫ₛᵇ z(u) du ds` and
//!   `∫∫∫ = ∫ₐᵇ∫ₛᵇ∫ᵤᵇ z(v) dv du ds` (inner integrals run *up to* `b`).
//! * Quadrature (adaptive Gauss–Kronrod, [`quadrature`]) appears only in
//!   oracles and sampled-function entry points, never in coefficient
//!   computation.

pub mod quadrature;
pub mod verify;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Rates at or below this floor are rejected: the weighted closed forms lose
/// all significant digits. Use the unweighted bound instead.
pub const K_FLOOR: f64 = 1e-9;

/// Default tolerance for the post-hoc orthogonality residual checks.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

/// Default split-point bisection tolerance for an interval of length `d`.
pub fn default_root_tol(d: f64) -> f64 {
    1e-12 * d
}

/// Everything that can go wrong in the inequality layer.
#[derive(Debug, Error)]
pub enum InequalityError {
    #[error("invalid interval: need finite b > a and k ≥ 0, got a={a}, b={b}, k={k}")]
    InvalidInterval { a: f64, b: f64, k: f64 },
    #[error("rate k={k:.3e} at or below evaluation floor {floor:.1e}; use the unweighted bound for k ≈ 0")]
    KBelowFloor { k: f64, floor: f64 },
    #[error("split bracketing failed on ({a}, {b}): {detail}")]
    NonBracketedRoot { a: f64, b: f64, detail: String },
    #[error("residual {residual:.3e} for {pair} exceeds tolerance {tol:.3e}")]
    ToleranceNotMet {
        pair: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("basis is not orthogonal: |⟨p{i},p{j}⟩| = {value:.3e} exceeds {tol:.3e}")]
    OrthogonalityViolation {
        i: usize,
        j: usize,
        value: f64,
        tol: f64,
    },
}

/// A time interval `[a, b]` together with the exponential rate `k` that
/// defines the weight `w(u) = e^{−2k(u−b)}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl Interval {
    /// Validates `b > a`, `k ≥ 0`, and finiteness.
    pub fn new(a: f64, b: f64, k: f64) -> Result<Self, InequalityError> {
        if !(a.is_finite() && b.is_finite() && k.is_finite()) || b <= a || k < 0.0 {
            return Err(InequalityError::InvalidInterval { a, b, k });
        }
        Ok(Self { a, b, k })
    }

    /// Interval length `d = b − a`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// The constants of the weighted orthogonal basis on one interval.
///
/// Field meanings (`d = b−a`, `w(u) = e^{−2k(u−b)}`):
/// * `w`  — the scalar `e^{2kd}` (value of the weight at `u = a`),
/// * `c1` — shift of `p₁(u) = (u−a) + c₁`,
/// * `c2`, `c3` — coefficients of `p₂(u) = (u−a)² + c₂(u−a) + c₃`,
/// * `c4` — scale of the indicator part of `p₃ = 1 + c₄·χ_{[a,ξ]}`,
/// * `q0..q3` — squared weighted norms `⟨pᵢ,pᵢ⟩`, all strictly positive,
/// * `q13` — the deliberate non-orthogonality `⟨p₁,p₃⟩`,
/// * `split` — the interior point `ξ` with `∫ₐ^ξ p₂ w du = 0`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct WeightedBasisCoefficients {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q13: f64,
    pub split: f64,
}

/// The moment data of a function `z : [a,b] → ℝⁿ` consumed by the bounds:
/// `m0 = ∫z`, `m1 = ∫∫z`, `m2 = ∫∫∫z` (iterated, inner limits at `b`) and
/// `m_split = ∫ₐ^ξ z`.
#[derive(Debug, Clone)]
pub struct MomentVector {
    pub m0: DVector<f64>,
    pub m1: DVector<f64>,
    pub m2: DVector<f64>,
    pub m_split: DVector<f64>,
}

impl MomentVector {
    pub fn new(
        m0: DVector<f64>,
        m1: DVector<f64>,
        m2: DVector<f64>,
        m_split: DVector<f64>,
    ) -> Result<Self, InequalityError> {
        let n = m0.len();
        if m1.len() != n || m2.len() != n || m_split.len() != n {
            return Err(InequalityError::DimensionMismatch {
                context: format!(
                    "moment dimensions {} / {} / {} / {} differ",
                    n,
                    m1.len(),
                    m2.len(),
                    m_split.len()
                ),
            });
        }
        Ok(Self {
            m0,
            m1,
            m2,
            m_split,
        })
    }

    /// State dimension `n`.
    pub fn dim(&self) -> usize {
        self.m0.len()
    }

    /// Computes all four moments of a sampled function by adaptive quadrature.
    ///
    /// The iterated integrals are collapsed by swapping the order of
    /// integration: `∫ₐᵇ∫ₛᵇ z(u) du ds = ∫ₐᵇ (u−a)·z(u) du` and
    /// `∫ₐᵇ∫ₛᵇ∫ᵤᵇ z = ∫ₐᵇ ((u−a)²/2)·z(u) du`, so only single integrals are
    /// evaluated.
    pub fn from_function<F>(z: F, a: f64, b: f64, split: f64, tol: f64) -> Self
    where
        F: Fn(f64) -> DVector<f64>,
    {
        let m0 = quadrature::integrate_vec(&z, a, b, tol);
        let m1 = quadrature::integrate_vec(|u| z(u) * (u - a), a, b, tol);
        let m2 = quadrature::integrate_vec(|u| z(u) * (0.5 * (u - a) * (u - a)), a, b, tol);
        let m_split = quadrature::integrate_vec(&z, a, split, tol);
        Self {
            m0,
            m1,
            m2,
            m_split,
        }
    }
}

/// `Iⱼ(x) = ∫₀ˣ sʲ e^{−c·s} ds` for `j = 0..=jmax` (`jmax ≤ 4`), with
/// `c = 2k > 0`. Series branch for `c·x < 1/2`, upward recurrence otherwise.
fn exp_moments(c: f64, x: f64, jmax: usize) -> [f64; 5] {
    debug_assert!(jmax <= 4);
    let mut out = [0.0; 5];
    if x == 0.0 {
        return out;
    }
    if c * x < 0.5 {
        // Iⱼ(x) = x^{j+1} Σ_{m≥0} (−cx)^m / (m!·(j+m+1)); |term| halves at
        // least geometrically once m ≥ 1, so 30 terms reach ε even at cx=1/2.
        let t = -c * x;
        for (j, slot) in out.iter_mut().enumerate().take(jmax + 1) {
            let mut term = 1.0;
            let mut sum = 1.0 / (j as f64 + 1.0);
            for m in 1..60 {
                term *= t / m as f64;
                let add = term / (j + m + 1) as f64;
                sum += add;
                if add.abs() <= f64::EPSILON * sum.abs() {
                    break;
                }
            }
            *slot = x.powi(j as i32 + 1) * sum;
        }
    } else {
        let e = (-c * x).exp();
        out[0] = -(-c * x).exp_m1() / c;
        for j in 1..=jmax {
            out[j] = (j as f64 * out[j - 1] - x.powi(j as i32) * e) / c;
        }
    }
    out
}

/// Computes the weighted-basis constants for one interval.
///
/// `quad_tol` bounds the post-hoc orthogonality residuals (measured relative
/// to the norms of the factors, `|⟨pᵢ,pⱼ⟩| ≤ quad_tol·√(qᵢqⱼ)`), and
/// `root_tol` is the absolute bisection tolerance on the split point.
///
/// Errors: [`InequalityError::KBelowFloor`] for `k ≤ K_FLOOR`,
/// [`InequalityError::NonBracketedRoot`] if `p₂` fails to bracket an interior
/// zero of the partial integral (would signal a coefficient bug), and
/// [`InequalityError::ToleranceNotMet`] if any residual survives above
/// `quad_tol`.
pub fn compute_coefficients(
    iv: Interval,
    quad_tol: f64,
    root_tol: f64,
) -> Result<WeightedBasisCoefficients, InequalityError> {
    if iv.k <= K_FLOOR {
        return Err(InequalityError::KBelowFloor {
            k: iv.k,
            floor: K_FLOOR,
        });
    }
    let d = iv.length();
    let c = 2.0 * iv.k;
    let w = (c * d).exp();

    // Full moments Mⱼ = W·Iⱼ(d), j = 0..4.
    let i_full = exp_moments(c, d, 4);
    let m: [f64; 5] = core::array::from_fn(|j| w * i_full[j]);

    let c1 = -m[1] / m[0];
    let q0 = m[0];
    let q1 = m[2] - m[1] * m[1] / m[0];
    let c2 = -(m[3] + c1 * m[2]) / q1;
    let c3 = -(m[2] + c2 * m[1]) / m[0];
    let q2 = m[4] + 2.0 * c2 * m[3] + (c2 * c2 + 2.0 * c3) * m[2] + 2.0 * c2 * c3 * m[1]
        + c3 * c3 * m[0];

    // Split point: bisection of F(s) = ∫₀ˢ p₂((·)+a) w du between the roots of
    // p₂(s) = s² + c₂s + c₃. F(0) = F(d) = 0 and F' = p₂w < 0 strictly between
    // the roots, so F is positive at the lower root, negative at the upper.
    let disc = c2 * c2 - 4.0 * c3;
    if disc <= 0.0 {
        return Err(InequalityError::NonBracketedRoot {
            a: iv.a,
            b: iv.b,
            detail: format!("p2 discriminant {disc:.3e} not positive"),
        });
    }
    let sq = disc.sqrt();
    let (r_lo, r_hi) = ((-c2 - sq) / 2.0, (-c2 + sq) / 2.0);
    if !(0.0 < r_lo && r_hi < d) {
        return Err(InequalityError::NonBracketedRoot {
            a: iv.a,
            b: iv.b,
            detail: format!("p2 roots {r_lo:.6e}, {r_hi:.6e} not interior to (0, {d:.6e})"),
        });
    }
    // Partial integral of p₂·w up to s (in shifted coordinates), divided by W.
    let partial_p2 = |s: f64| -> f64 {
        let i = exp_moments(c, s, 2);
        i[2] + c2 * i[1] + c3 * i[0]
    };
    let (f_lo, f_hi) = (partial_p2(r_lo), partial_p2(r_hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(InequalityError::NonBracketedRoot {
            a: iv.a,
            b: iv.b,
            detail: format!("partial integral not sign-changing: F(r_lo)={f_lo:.3e}, F(r_hi)={f_hi:.3e}"),
        });
    }
    let (mut lo, mut hi) = (r_lo, r_hi);
    while hi - lo > root_tol {
        let mid = 0.5 * (lo + hi);
        if partial_p2(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_split = 0.5 * (lo + hi);
    let split = iv.a + s_split;

    // Partial moments P₀, P₁ over [a, split] and the tail q₀ − P₀ over
    // [split, b]; the tail has its own cancellation-free form
    // ∫_ξ^b w du = expm1(2k(b−ξ))/(2k).
    let i_part = exp_moments(c, s_split, 1);
    let p0 = w * i_part[0];
    let p1 = w * i_part[1];
    let tail = (c * (d - s_split)).exp_m1() / c;

    let c4 = -m[0] / p0;
    let q3 = q0 * tail / p0;
    let q13 = c4 * (p1 + c1 * p0);

    // Post-hoc residual verification: every required orthogonality relation,
    // evaluated algebraically from the same moments (machine-accurate stand-in
    // for the quadrature definitions, which the tests check independently).
    let checks: [(&'static str, f64, f64); 5] = [
        ("⟨p1,p0⟩", m[1] + c1 * m[0], (q1 * q0).sqrt()),
        ("⟨p2,p0⟩", m[2] + c2 * m[1] + c3 * m[0], (q2 * q0).sqrt()),
        (
            "⟨p2,p1⟩",
            m[3] + (c1 + c2) * m[2] + (c1 * c2 + c3) * m[1] + c1 * c3 * m[0],
            (q2 * q1).sqrt(),
        ),
        ("⟨p3,p0⟩", m[0] + c4 * p0, (q3 * q0).sqrt()),
        (
            "⟨p3,p2⟩",
            (m[2] + c2 * m[1] + c3 * m[0]) + c4 * w * partial_p2(s_split),
            (q3 * q2).sqrt(),
        ),
    ];
    for (pair, residual, scale) in checks {
        if !(residual.abs() <= quad_tol * scale) {
            return Err(InequalityError::ToleranceNotMet {
                pair,
                residual: residual.abs(),
                tol: quad_tol * scale,
            });
        }
    }
    for (name, q) in [("q0", q0), ("q1", q1), ("q2", q2), ("q3", q3)] {
        if !(q > 0.0) {
            return Err(InequalityError::ToleranceNotMet {
                pair: name,
                residual: q,
                tol: 0.0,
            });
        }
    }

    Ok(WeightedBasisCoefficients {
        w,
        c1,
        c2,
        c3,
        c4,
        q0,
        q1,
        q2,
        q3,
        q13,
        split,
    })
}

fn quad_form(r: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (r * v).dot(v)
}

fn check_square_matching(
    r: &DMatrix<f64>,
    n: usize,
    context: &str,
) -> Result<(), InequalityError> {
    if r.nrows() != r.ncols() || r.nrows() != n {
        return Err(InequalityError::DimensionMismatch {
            context: format!(
                "{context}: R is {}×{}, moments have dimension {n}",
                r.nrows(),
                r.ncols()
            ),
        });
    }
    Ok(())
}

/// The weighted lower bound
/// `∫ e^{2k(u−b)} zᵀRz du ≥ Σᵢ (1/qᵢ)ΩᵢᵀRΩᵢ + (1/q₃)[Ω₃−(q₁₃/q₁)Ω₁]ᵀR[…]`
/// with the moment combinations
///
/// ```text
///     Ω₀ = ∫z,  Ω₁ = c₁∫z + ∫∫z,  Ω₂ = c₃∫z + c₂∫∫z + 2∫∫∫z,
///     Ω₃ = ∫z + c₄∫ₐ^ξ z .
/// ```
///
/// The moments must have been computed with `split = coeffs.split`.
pub fn lemma4_bound(
    moments: &MomentVector,
    r: &DMatrix<f64>,
    coeffs: &WeightedBasisCoefficients,
) -> Result<f64, InequalityError> {
    check_square_matching(r, moments.dim(), "lemma4_bound")?;
    let omega0 = moments.m0.clone();
    let omega1 = &moments.m0 * coeffs.c1 + &moments.m1;
    let omega2 = &moments.m0 * coeffs.c3 + &moments.m1 * coeffs.c2 + &moments.m2 * 2.0;
    let omega3 = &moments.m0 + &moments.m_split * coeffs.c4;
    let corrected = omega3 - &omega1 * (coeffs.q13 / coeffs.q1);
    Ok(quad_form(r, &omega0) / coeffs.q0
        + quad_form(r, &omega1) / coeffs.q1
        + quad_form(r, &omega2) / coeffs.q2
        + quad_form(r, &corrected) / coeffs.q3)
}

/// The unweighted (`k → 0`) counterpart with Legendre-type combinations and
/// weights `1/d, 3/d, 5/d, 1/d`:
///
/// ```text
///     ω₀ = ∫z,  ω₁ = ∫z − (2/d)∫∫z,  ω₂ = ∫z − (6/d)∫∫z + (12/d²)∫∫∫z,
///     ω₃ = ∫ₐ^m z − ∫_m^b z = 2∫ₐ^m z − ∫z ,
///     bound = (1/d)ω₀ᵀRω₀ + (3/d)ω₁ᵀRω₁ + (5/d)ω₂ᵀRω₂
///             + (1/d)[ω₃ − (3/2)ω₁]ᵀR[ω₃ − (3/2)ω₁] .
/// ```
///
/// Precondition: `moments.m_split` integrates up to the **midpoint**
/// `m = (a+b)/2` (this routine cannot verify that from the moments alone).
pub fn lemma5_bound(
    moments: &MomentVector,
    r: &DMatrix<f64>,
    len: f64,
) -> Result<f64, InequalityError> {
    check_square_matching(r, moments.dim(), "lemma5_bound")?;
    if !(len > 0.0) {
        return Err(InequalityError::DimensionMismatch {
            context: format!("lemma5_bound: interval length {len} not positive"),
        });
    }
    let d = len;
    let omega0 = moments.m0.clone();
    let omega1 = &moments.m0 - &moments.m1 * (2.0 / d);
    let omega2 = &moments.m0 - &moments.m1 * (6.0 / d) + &moments.m2 * (12.0 / (d * d));
    let omega3 = &moments.m_split * 2.0 - &moments.m0;
    let corrected = omega3 - &omega1 * 1.5;
    Ok(quad_form(r, &omega0) / d
        + quad_form(r, &omega1) * (3.0 / d)
        + quad_form(r, &omega2) * (5.0 / d)
        + quad_form(r, &corrected) / d)
}

/// Numerically evaluates both sides of the master estimate for an arbitrary
/// sampled basis and weight, returning `gap = LHS − RHS ≥ 0`.
///
/// `basis = [p₀, p₁, p₂, p₃]` must satisfy the orthogonality relations
/// `⟨p₀,p₁⟩ = ⟨p₀,p₂⟩ = ⟨p₀,p₃⟩ = ⟨p₁,p₂⟩ = ⟨p₂,p₃⟩ = 0` (the pair `(p₁,p₃)`
/// is free); violations beyond `ortho_tol·√(qᵢqⱼ)` raise
/// [`InequalityError::OrthogonalityViolation`]. All integrals are adaptive
/// quadrature at absolute tolerance `quad_tol`, so this is an oracle for
/// tests, not a production path.
#[allow(clippy::too_many_arguments)]
pub fn lemma2_gap<P, W>(
    phi: P,
    basis: &[&dyn Fn(f64) -> f64; 4],
    weight: W,
    r: &DMatrix<f64>,
    a: f64,
    b: f64,
    quad_tol: f64,
    ortho_tol: f64,
) -> Result<f64, InequalityError>
where
    P: Fn(f64) -> DVector<f64>,
    W: Fn(f64) -> f64,
{
    let n = phi(a).len();
    check_square_matching(r, n, "lemma2_gap")?;

    let q: Vec<f64> = (0..4)
        .map(|i| quadrature::integrate(|u| basis[i](u) * basis[i](u) * weight(u), a, b, quad_tol))
        .collect();
    let inner = |i: usize, j: usize| {
        quadrature::integrate(|u| basis[i](u) * basis[j](u) * weight(u), a, b, quad_tol)
    };
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)] {
        let v = inner(i, j);
        let tol = ortho_tol * (q[i] * q[j]).sqrt();
        if v.abs() > tol {
            return Err(InequalityError::OrthogonalityViolation {
                i,
                j,
                value: v.abs(),
                tol,
            });
        }
    }
    let q13 = inner(1, 3);

    let f: Vec<DVector<f64>> = (0..4)
        .map(|i| quadrature::integrate_vec(|u| phi(u) * (basis[i](u) * weight(u)), a, b, quad_tol))
        .collect();
    let lhs = quadrature::integrate(|u| quad_form(r, &phi(u)) * weight(u), a, b, quad_tol);
    let corrected = &f[3] - &f[1] * (q13 / q[1]);
    let rhs = quad_form(r, &f[0]) / q[0]
        + quad_form(r, &f[1]) / q[1]
        + quad_form(r, &f[2]) / q[2]
        + quad_form(r, &corrected) / q[3];
    Ok(lhs - rhs)
}

/// Upper bounds for the two orderings of the double integral of `ẋᵀRẋ`:
///
/// ```text
///     −∫ₐᵇ∫ₛᵇ ẋᵀRẋ du ds ≤ −2Ω₅ᵀRΩ₅ − 4Ω₆ᵀRΩ₆
///     −∫ₐᵇ∫ₐˢ ẋᵀRẋ du ds ≤ −2Ω₇ᵀRΩ₇ − 4Ω₈ᵀRΩ₈
/// ```
///
/// with
///
/// ```text
///     Ω₅ = x(b) − (1/d)∫x                    Ω₇ = x(a) − (1/d)∫x
///     Ω₆ = x(b) + (2/d)∫x − (6/d²)∫∫x        Ω₈ = x(a) − (4/d)∫x + (6/d²)∫∫x
/// ```
///
/// Returns `(bound_upper_ordering, bound_lower_ordering)`. Only `x` itself is
/// needed; its integrals are evaluated by adaptive quadrature at `quad_tol`
/// (the derivative enters only the left-hand sides, which live in the tests).
pub fn lemma6_bounds<F>(
    x: F,
    r: &DMatrix<f64>,
    a: f64,
    b: f64,
    quad_tol: f64,
) -> Result<(f64, f64), InequalityError>
where
    F: Fn(f64) -> DVector<f64>,
{
    let xa = x(a);
    let xb = x(b);
    let n = xa.len();
    check_square_matching(r, n, "lemma6_bounds")?;
    if xb.len() != n {
        return Err(InequalityError::DimensionMismatch {
            context: format!("lemma6_bounds: x(a) has length {n}, x(b) has {}", xb.len()),
        });
    }
    let d = b - a;
    let m0 = quadrature::integrate_vec(&x, a, b, quad_tol);
    let m1 = quadrature::integrate_vec(|u| x(u) * (u - a), a, b, quad_tol);

    let omega5 = &xb - &m0 / d;
    let omega6 = &xb + &m0 * (2.0 / d) - &m1 * (6.0 / (d * d));
    let omega7 = &xa - &m0 / d;
    let omega8 = &xa - &m0 * (4.0 / d) + &m1 * (6.0 / (d * d));

    Ok((
        -2.0 * quad_form(r, &omega5) - 4.0 * quad_form(r, &omega6),
        -2.0 * quad_form(r, &omega7) - 4.0 * quad_form(r, &omega8),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coeffs(a: f64, b: f64, k: f64) -> WeightedBasisCoefficients {
        let iv = Interval::new(a, b, k).unwrap();
        compute_coefficients(iv, DEFAULT_QUAD_TOL, default_root_tol(b - a)).unwrap()
    }

    /// Evaluates the basis polynomials at `u` for direct quadrature checks.
    fn basis_fns(
        a: f64,
        c: &WeightedBasisCoefficients,
    ) -> [Box<dyn Fn(f64) -> f64>; 4] {
        let (c1, c2, c3, c4, split) = (c.c1, c.c2, c.c3, c.c4, c.split);
        [
            Box::new(|_u: f64| 1.0),
            Box::new(move |u: f64| (u - a) + c1),
            Box::new(move |u: f64| (u - a) * (u - a) + c2 * (u - a) + c3),
            Box::new(move |u: f64| if u <= split { 1.0 + c4 } else { 1.0 }),
        ]
    }

    #[test]
    fn q0_matches_published_value_and_quadrature() {
        // On [0,1] with k = 1/2 the weight is e^{1−u}·e^{u−1}… concretely
        // q0 = (e^{2k·1} − 1)/(2k) = e − 1.
        let c = coeffs(0.0, 1.0, 0.5);
        assert_relative_eq!(c.q0, std::f64::consts::E - 1.0, max_relative = 1e-14);
        let quad = quadrature::integrate(|u| (-2.0 * 0.5 * (u - 1.0)).exp(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(c.q0, quad, max_relative = 1e-11);
    }

    #[test]
    fn c1_matches_published_closed_form() {
        for (a, b, k) in [(0.0, 1.0, 0.5), (-2.0, 1.5, 1.3), (0.0, 7.0, 0.01)] {
            let c = coeffs(a, b, k);
            let published = (b - a) / (c.w - 1.0) - 1.0 / (2.0 * k);
            assert_relative_eq!(c.c1, published, max_relative = 1e-10);
        }
    }

    #[test]
    fn norms_match_quadrature_definitions() {
        for (a, b, k) in [(0.0, 1.0, 0.5), (0.0, 3.0, 1.0), (1.0, 1.5, 2.0)] {
            let c = coeffs(a, b, k);
            let w = move |u: f64| (-2.0 * k * (u - b)).exp();
            let p = basis_fns(a, &c);
            let qs = [c.q0, c.q1, c.q2, c.q3];
            for i in 0..4 {
                // p₃ is discontinuous at the split; integrate the pieces.
                let direct = quadrature::integrate(|u| p[i](u) * p[i](u) * w(u), a, c.split, 1e-12)
                    + quadrature::integrate(|u| p[i](u) * p[i](u) * w(u), c.split, b, 1e-12);
                assert_relative_eq!(qs[i], direct, max_relative = 1e-9);
            }
            let q13 = quadrature::integrate(|u| p[1](u) * p[3](u) * w(u), a, c.split, 1e-12)
                + quadrature::integrate(|u| p[1](u) * p[3](u) * w(u), c.split, b, 1e-12);
            assert_relative_eq!(c.q13, q13, max_relative = 1e-8, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonality_residuals_below_1e10() {
        let c = coeffs(0.0, 1.0, 0.5);
        let w = |u: f64| (-2.0 * 0.5 * (u - 1.0)).exp();
        let p = basis_fns(0.0, &c);
        let r1 = quadrature::integrate(|u| p[1](u) * w(u), 0.0, 1.0, 1e-13);
        let r2 = quadrature::integrate(|u| p[2](u) * w(u), 0.0, 1.0, 1e-13);
        let r3 = quadrature::integrate(|u| p[1](u) * p[2](u) * w(u), 0.0, 1.0, 1e-13);
        let r4 = quadrature::integrate(|u| p[2](u) * w(u), 0.0, c.split, 1e-13);
        for r in [r1, r2, r3, r4] {
            assert!(r.abs() < 1e-10, "residual {r:.3e} above 1e-10");
        }
    }

    #[test]
    fn small_k_limits() {
        // As k ↓ 0: c₁ → −d/2, c₂ → −d, c₃ → d²/6, q₀ → d, q₁ → d³/12,
        // q₂ → d⁵/180, split → midpoint, c₄ → −2, q₃ → d, q₁₃ → d²/4.
        for (a, b) in [(0.0, 1.0), (0.25, 3.95)] {
            let d = b - a;
            let c = coeffs(a, b, 1e-8);
            assert_relative_eq!(c.c1, -d / 2.0, max_relative = 1e-5);
            assert_relative_eq!(c.c2, -d, max_relative = 1e-5);
            assert_relative_eq!(c.c3, d * d / 6.0, max_relative = 1e-5);
            assert_relative_eq!(c.q0, d, max_relative = 1e-5);
            assert_relative_eq!(c.q1, d * d * d / 12.0, max_relative = 1e-5);
            assert_relative_eq!(c.q2, d.powi(5) / 180.0, max_relative = 1e-5);
            assert_relative_eq!(c.split, 0.5 * (a + b), max_relative = 1e-5);
            assert_relative_eq!(c.c4, -2.0, max_relative = 1e-5);
            assert_relative_eq!(c.q3, d, max_relative = 1e-5);
            assert_relative_eq!(c.q13, d * d / 4.0, max_relative = 1e-5);
        }
    }

    #[test]
    fn residuals_and_positivity_across_admissible_grid() {
        for k in [1e-6, 1e-4, 1e-2, 0.3, 1.0, 5.0] {
            for d in [0.1, 0.5, 1.0, 3.0, 10.0] {
                let c = coeffs(0.0, d, k);
                assert!(c.q0 > 0.0 && c.q1 > 0.0 && c.q2 > 0.0 && c.q3 > 0.0);
                assert!(0.0 < c.split && c.split < d);
                // compute_coefficients itself enforces residuals ≤ 1e-9
                // relative; re-assert the pair that is most cancellation-prone
                // via quadrature at one point of the grid.
                if (k - 0.3).abs() < 1e-12 && (d - 3.0).abs() < 1e-12 {
                    let p = basis_fns(0.0, &c);
                    let w = move |u: f64| (-2.0 * k * (u - d)).exp();
                    let r = quadrature::integrate(|u| p[2](u) * p[1](u) * w(u), 0.0, d, 1e-12);
                    assert!(r.abs() < 1e-9 * (c.q1 * c.q2).sqrt());
                }
            }
        }
    }

    #[test]
    fn k_below_floor_is_rejected() {
        let iv = Interval::new(0.0, 1.0, 0.0).unwrap();
        let err = compute_coefficients(iv, 1e-9, 1e-12).unwrap_err();
        assert!(matches!(err, InequalityError::KBelowFloor { .. }));
    }

    #[test]
    fn invalid_interval_is_rejected() {
        assert!(Interval::new(1.0, 1.0, 0.5).is_err());
        assert!(Interval::new(2.0, 1.0, 0.5).is_err());
        assert!(Interval::new(0.0, 1.0, -0.1).is_err());
        assert!(Interval::new(0.0, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn weighted_bound_equality_for_constant_phi() {
        // z(u) = e^{−2k(u−b)}·v makes φ = e^{2k(u−b)}z constant, the residual
        // of the projection identity vanishes, and the bound must equal the
        // left side q₀·vᵀRv exactly.
        let (a, b, k) = (0.0, 2.0, 0.7);
        let c = coeffs(a, b, k);
        let v = DVector::from_vec(vec![1.0, -2.0]);
        let r = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let z = |u: f64| &v * (-2.0 * k * (u - b)).exp();
        let m = MomentVector::from_function(z, a, b, c.split, 1e-12);
        let bound = lemma4_bound(&m, &r, &c).unwrap();
        let lhs = c.q0 * quad_form(&r, &v);
        assert_relative_eq!(bound, lhs, max_relative = 1e-9);

        let zero = MomentVector::from_function(|_| DVector::zeros(2), a, b, c.split, 1e-12);
        assert_eq!(lemma4_bound(&zero, &r, &c).unwrap(), 0.0);
    }

    #[test]
    fn weighted_bound_is_sound_for_polynomials() {
        let (a, b, k) = (0.0, 1.0, 0.3);
        let c = coeffs(a, b, k);
        let r = DMatrix::identity(2, 2);
        let z = |u: f64| DVector::from_vec(vec![1.0 + u - 0.3 * u * u, u * u * u - 0.5]);
        let m = MomentVector::from_function(z, a, b, c.split, 1e-12);
        let bound = lemma4_bound(&m, &r, &c).unwrap();
        let lhs = quadrature::integrate(
            |u| (2.0 * k * (u - b)).exp() * z(u).norm_squared(),
            a,
            b,
            1e-12,
        );
        assert!(
            lhs - bound >= -1e-8,
            "soundness violated: lhs={lhs}, bound={bound}"
        );
    }

    #[test]
    fn fourth_projection_term_only_tightens() {
        let (a, b, k) = (0.0, 1.5, 0.8);
        let c = coeffs(a, b, k);
        let r = DMatrix::identity(1, 1);
        let z = |u: f64| DVector::from_vec(vec![(3.0 * u).sin() + 0.2 * u]);
        let m = MomentVector::from_function(z, a, b, c.split, 1e-12);
        let full = lemma4_bound(&m, &r, &c).unwrap();
        let omega1 = &m.m0 * c.c1 + &m.m1;
        let omega3 = &m.m0 + &m.m_split * c.c4;
        let corrected = omega3 - omega1 * (c.q13 / c.q1);
        let fourth = quad_form(&r, &corrected) / c.q3;
        assert!(fourth >= 0.0);
        let truncated = full - fourth;
        assert!(full >= truncated);
    }

    #[test]
    fn unweighted_bound_equality_cases() {
        // Constant z: ω₁ = ω₂ = 0 and ω₃ − 1.5ω₁ = 0, bound = d·vᵀRv = LHS.
        let r = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let v = DVector::from_vec(vec![0.5, -1.0]);
        let (a, b) = (1.0, 3.5);
        let m = MomentVector::from_function(|_| v.clone(), a, b, 0.5 * (a + b), 1e-12);
        let bound = lemma5_bound(&m, &r, b - a).unwrap();
        assert_relative_eq!(bound, (b - a) * quad_form(&r, &v), max_relative = 1e-10);

        // z(u) = u on [0,1]: z is in the basis span, LHS = 1/3 is attained.
        let r1 = DMatrix::identity(1, 1);
        let m = MomentVector::from_function(
            |u| DVector::from_vec(vec![u]),
            0.0,
            1.0,
            0.5,
            1e-13,
        );
        let bound = lemma5_bound(&m, &r1, 1.0).unwrap();
        assert_relative_eq!(bound, 1.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn weighted_and_unweighted_bounds_agree_in_the_limit() {
        // Limit consistency: at k = 1e−8 the weighted bound and the unweighted
        // bound evaluated on the same z differ by < 1e−4 relative (split points
        // differ by O(k), so each uses its own moments).
        let (a, b) = (0.0, 2.0);
        let k = 1e-8;
        let c = coeffs(a, b, k);
        let r = DMatrix::identity(2, 2);
        let z = |u: f64| DVector::from_vec(vec![u * u - 1.0, (2.0 * u).cos()]);
        let m4 = MomentVector::from_function(z, a, b, c.split, 1e-12);
        let m5 = MomentVector::from_function(z, a, b, 0.5 * (a + b), 1e-12);
        let b4 = lemma4_bound(&m4, &r, &c).unwrap();
        let b5 = lemma5_bound(&m5, &r, b - a).unwrap();
        assert_relative_eq!(b4, b5, max_relative = 1e-4);
    }

    #[test]
    fn gap_oracle_vanishes_on_basis_span_and_flags_bad_basis() {
        let (a, b, k) = (0.0, 1.0, 0.5);
        let c = coeffs(a, b, k);
        let w = move |u: f64| (-2.0 * k * (u - b)).exp();
        let split = c.split;
        let (c1, c2, c3, c4) = (c.c1, c.c2, c.c3, c.c4);
        let p0 = |_: f64| 1.0;
        let p1 = move |u: f64| (u - a) + c1;
        let p2 = move |u: f64| (u - a) * (u - a) + c2 * (u - a) + c3;
        let p3 = move |u: f64| if u <= split { 1.0 + c4 } else { 1.0 };
        let basis: [&dyn Fn(f64) -> f64; 4] = [&p0, &p1, &p2, &p3];
        let r = DMatrix::identity(1, 1);

        // The estimate is an exact identity on span{p₀,p₁,p₂}: the projection
        // residual vanishes there. (It does NOT vanish on p₃ whenever
        // q₁₃ ≠ 0, because the fourth term only captures the corrected
        // direction p₃ − (q₁₃/q₁)p₁ — see the explicit check below.)
        let phi = move |u: f64| DVector::from_vec(vec![0.3 * p1(u) - 1.2 * p2(u) + 2.0]);
        let gap = lemma2_gap(phi, &basis, w, &r, a, b, 1e-12, 1e-8).unwrap();
        assert!(gap.abs() < 1e-8, "gap {gap:.3e} not ~0 on basis span");

        // φ = p₃ has the closed-form gap (q₃ − q₁₃²/q₁)·q₁₃²/(q₁q₃).
        let phi3 = move |u: f64| DVector::from_vec(vec![p3(u)]);
        let gap3 = lemma2_gap(phi3, &basis, w, &r, a, b, 1e-12, 1e-8).unwrap();
        let expected = (c.q3 - c.q13 * c.q13 / c.q1) * c.q13 * c.q13 / (c.q1 * c.q3);
        assert_relative_eq!(gap3, expected, max_relative = 1e-8);

        // A generic φ has strictly positive gap.
        let phi2 = |u: f64| DVector::from_vec(vec![(5.0 * u).sin()]);
        let gap2 = lemma2_gap(phi2, &basis, w, &r, a, b, 1e-12, 1e-8).unwrap();
        assert!(gap2 > 0.0);

        // Breaking orthogonality must be detected.
        let bad = move |u: f64| (u - a) + c1 + 0.3;
        let bad_basis: [&dyn Fn(f64) -> f64; 4] = [&p0, &bad, &p2, &p3];
        let err = lemma2_gap(phi2, &bad_basis, w, &r, a, b, 1e-12, 1e-8).unwrap_err();
        assert!(matches!(err, InequalityError::OrthogonalityViolation { .. }));
    }

    #[test]
    fn gap_matches_unweighted_bound_under_flat_weight() {
        // With w ≡ 1 and the Legendre-style basis (c₁ = −d/2 etc., split at
        // the midpoint), the gap oracle and the unweighted bound describe the
        // same estimate: LHS − gap = lemma5_bound.
        let (a, b) = (0.0, 1.0);
        let d = b - a;
        let mid = 0.5 * (a + b);
        let p0 = |_: f64| 1.0;
        let p1 = move |u: f64| (u - a) - d / 2.0;
        let p2 = move |u: f64| (u - a) * (u - a) - d * (u - a) + d * d / 6.0;
        let p3 = move |u: f64| if u <= mid { -1.0 } else { 1.0 };
        let basis: [&dyn Fn(f64) -> f64; 4] = [&p0, &p1, &p2, &p3];
        let r = DMatrix::identity(2, 2);
        let z = |u: f64| DVector::from_vec(vec![u * u * u, (3.0 * u).sin()]);
        let gap = lemma2_gap(z, &basis, |_| 1.0, &r, a, b, 1e-12, 1e-8).unwrap();
        let lhs = quadrature::integrate(|u| z(u).norm_squared(), a, b, 1e-12);
        let m = MomentVector::from_function(z, a, b, mid, 1e-12);
        let bound = lemma5_bound(&m, &r, d).unwrap();
        assert_relative_eq!(lhs - gap, bound, max_relative = 1e-8);
    }

    #[test]
    fn double_integral_bounds_attain_equality_on_quadratics() {
        // x(u) = u² on [0,1]: both orderings hit equality (x ∈ span of the
        // extremal family). Upper ordering: −∫₀¹∫ₛ¹(2u)² du ds = −1;
        // lower ordering: −∫₀¹∫₀ˢ(2u)² du ds = −1/3.
        let r = DMatrix::identity(1, 1);
        let x = |u: f64| DVector::from_vec(vec![u * u]);
        let (upper, lower) = lemma6_bounds(x, &r, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(upper, -1.0, max_relative = 1e-9);
        assert_relative_eq!(lower, -1.0 / 3.0, max_relative = 1e-9);

        // Constant x: both sides zero.
        let (u0, l0) =
            lemma6_bounds(|_| DVector::from_vec(vec![2.5]), &r, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(u0, 0.0, epsilon = 1e-12);
        assert_relative_eq!(l0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn double_integral_bounds_are_upper_bounds() {
        // −∫∫ẋᵀRẋ (computed from the derivative by quadrature) never exceeds
        // the moment-based bounds.
        let r = DMatrix::from_row_slice(2, 2, &[1.5, -0.2, -0.2, 0.8]);
        let x = |u: f64| DVector::from_vec(vec![(2.0 * u).sin(), u * u - 0.3 * u]);
        let xdot = |u: f64| DVector::from_vec(vec![2.0 * (2.0 * u).cos(), 2.0 * u - 0.3]);
        let (a, b) = (0.0, 1.7);
        let (upper, lower) = lemma6_bounds(x, &r, a, b, 1e-12).unwrap();
        // Swap order: ∫ₐᵇ∫ₛᵇ f(u) du ds = ∫ₐᵇ (u−a) f(u) du, and
        // ∫ₐᵇ∫ₐˢ f(u) du ds = ∫ₐᵇ (b−u) f(u) du.
        let lhs_upper =
            -quadrature::integrate(|u| (u - a) * quad_form(&r, &xdot(u)), a, b, 1e-12);
        let lhs_lower =
            -quadrature::integrate(|u| (b - u) * quad_form(&r, &xdot(u)), a, b, 1e-12);
        assert!(upper - lhs_upper >= -1e-9, "upper={upper}, lhs={lhs_upper}");
        assert!(lower - lhs_lower >= -1e-9, "lower={lower}, lhs={lhs_lower}");
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let c = coeffs(0.0, 1.0, 0.5);
        let m = MomentVector::from_function(
            |u| DVector::from_vec(vec![u, 1.0]),
            0.0,
            1.0,
            c.split,
            1e-10,
        );
        let r3 = DMatrix::identity(3, 3);
        assert!(matches!(
            lemma4_bound(&m, &r3, &c),
            Err(InequalityError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            lemma5_bound(&m, &r3, 1.0),
            Err(InequalityError::DimensionMismatch { .. })
        ));
        assert!(MomentVector::new(
            DVector::zeros(2),
            DVector::zeros(3),
            DVector::zeros(2),
            DVector::zeros(2)
        )
        .is_err());
    }
}
