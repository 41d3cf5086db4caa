//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7-point Gauss / 15-point Kronrod pair drives an adaptive interval
//! subdivision: on each interval the embedded Gauss rule provides the error
//! estimate `|K15 − G7|`, and intervals are bisected until the local estimate
//! falls below a tolerance prorated by interval length.
//!
//! This module is the *oracle* side of the inequality machinery: it is used
//! to verify the closed-form basis coefficients and the integral-inequality
//! bounds on arbitrary test functions. The production LMI path never
//! integrates numerically — it consumes closed forms only — so accuracy here
//! is allowed to cost time (the default tolerance is 1e−11 absolute).

use nalgebra::DVector;

/// Positive abscissae of the 15-point Kronrod rule on [−1, 1] (symmetric).
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];

/// Kronrod weights matching `XK`.
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss weights for the embedded 7-point rule (every other Kronrod node).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod evaluation on [lo, hi]: returns (K15 value, |K15 − G7|).
fn gk15(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let hw = 0.5 * (hi - lo);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let (fa, fb) = if XK[i] == 0.0 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - hw * XK[i]), f(c + hw * XK[i]))
        };
        let s = fa + fb;
        kron += WK[i] * s;
        // Odd-indexed Kronrod nodes (including the center, i = 7, which
        // enters once since fb = 0 there) are the embedded Gauss nodes.
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * hw, (kron - gauss).abs() * hw)
}

/// Adaptive integral of a scalar function to absolute tolerance `tol`.
///
/// Bisects intervals whose local Gauss–Kronrod error estimate exceeds the
/// tolerance prorated by length; gives up subdividing below width
/// `1e−14·(b−a)` (roundoff floor) and accepts the local value there.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(b >= a, "integrate: reversed interval");
    if a == b {
        return 0.0;
    }
    let min_width = 1e-14 * (b - a);
    let mut total = 0.0;
    // Explicit worklist instead of recursion: (lo, hi, prorated tolerance).
    let mut stack = vec![(a, b, tol)];
    while let Some((lo, hi, t)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        if e <= t || (hi - lo) < min_width {
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
    }
    total
}

/// Componentwise adaptive integral of a vector-valued function. The dimension
/// is taken from an evaluation at the left endpoint.
pub fn integrate_vec(
    f: impl Fn(f64) -> DVector<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> DVector<f64> {
    let dim = f(a).len();
    DVector::from_fn(dim, |i, _| integrate(|u| f(u)[i], a, b, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        // K15 is exact for polynomials of degree ≤ 22; no subdivision needed.
        let v = integrate(|u| u * u * u - 2.0 * u + 1.0, 0.0, 2.0, 1e-12);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn exponential_weight() {
        // ∫₀¹ e^{−2k(u−1)} du with k = 0.5 equals e − 1.
        let v = integrate(|u| (-1.0 * (u - 1.0)).exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn oscillatory_needs_subdivision() {
        // ∫₀^{10} sin(25u) du = (1 − cos 250)/25.
        let v = integrate(|u| (25.0 * u).sin(), 0.0, 10.0, 1e-12);
        let exact = (1.0 - (250.0_f64).cos()) / 25.0;
        assert!((v - exact).abs() < 1e-10, "got {v}, want {exact}");
    }

    #[test]
    fn vector_valued() {
        let v = integrate_vec(
            |u| DVector::from_vec(vec![u, u * u]),
            0.0,
            1.0,
            1e-12,
        );
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!((v[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}
