//! Block-by-block construction of the stability criterion's LMIs.
//!
//! # Background
//!
//! With the augmented vector `η` (see the module root for its twelve blocks)
//! and block selectors `eᵢ` (`eᵢᵀη` = block `i`), the criterion reads
//!
//! ```text
//!     Φ + Θ₁ ≺ 0,    Φ + Θ₂ ≺ 0,    Γ ≻ 0,    all functional matrices ≻ 0,
//!     Φ = Ξ₁ + Ξ₂ + Ξ₃ + Ξ₄ + Ξ₅ + Ψ + Π .
//! ```
//!
//! Each `Ξ` bounds one contribution of the functional's derivative:
//!
//! * `Ξ₁` — derivative of the quadratic/sector part (`P`, `D₁`, `D₂`) along
//!   `ż = e_sᵀη`, with `e_s = −e₁Cᵀ + e₄Aᵀ + e₅Bᵀ`;
//! * `Ξ₂` — the delayed quadratic states (`Q`, `U₁`, `U₂`, `U₃`) with the
//!   weight scalars `e^{2kh}` and `e^{2k(h−ξ)}`;
//! * `Ξ₃` — the `ż`-level weighted integral bounds (`Z₁`, `Z₂`, `Z₃`),
//!   including the four-projection bound with constants `h³/q₀`, `h⁵/(4q₁)`,
//!   the diagonal `Z₁₄` weights `h/q₀, h/q₁, h/q₂`, and the `h/q₃` corrected
//!   projection;
//! * `Ξ₄` — the double-integral bounds (`N₁`, `N₂`) with scalar `e^{−2kh}`
//!   and the eight moment combinations of the auxiliary inequality;
//! * `Ξ₅ = (μ/h)e₁(M₁−M₂)e₁ᵀ` — the delay-derivative correction;
//! * `Ψ  = −e^{−2kh}·γ[Z₁₃, S; Sᵀ, Z₁₃]γᵀ` — the reciprocally convex
//!   combination of the two Wirtinger-type bounds `γ⁽¹⁾`, `γ⁽²⁾`;
//! * `Π` — the activation sector condition at `z(t)` and `z(t−h(t))`.
//!
//! `Θ₁`/`Θ₂` carry the delay-dependent parts of `V̇₁` (through `ζ⁽¹⁾Pζ⁽³⁾ᵀ` /
//! `ζ⁽²⁾Pζ⁽³⁾ᵀ`) and the `M₁`/`M₂` rate terms; `Γ` is the positivity side of
//! the reciprocally convex coupling.
//!
//! # Known statement/derivation discrepancies (implemented readings)
//!
//! * The fourth projection vector of `Ξ₃` is implemented as printed in the
//!   criterion statement, `(1−(h+c₁)q₁₃/q₁)e₁ − (1+c₄−c₁q₁₃/q₁)e₃ +
//!   (q₁₃/q₁)e₆ + c₄e₁₂`; the underlying derivation would put an extra factor
//!   `h` on the `e₆` term (the two coincide at `h = 1`). The alternate
//!   reading is available through [`AssemblyOptions`] for comparison runs.
//! * The split `ξ` of the weighted basis is an absolute point of the
//!   normalized window `[0, h]`; the delayed state `z(t−ξ_delay)` in block 12
//!   uses the offset `ξ_delay = h − split`, which is the reading consistent
//!   with the derivation's `∫_{t−ξ}` windows. The alternate offset is again
//!   available via [`AssemblyOptions`].
//! * The variable list of the published statement reads `U_i, Z_i (i=1,2)`
//!   but the blocks use `U₃, Z₃`, and the published variable count
//!   `20.5n²+11.5n` only matches with them; both are declared.
//!
//! # Assumptions
//!
//! * Basis coefficients were computed on `[0, h]` at rate `k` (checked via
//!   `w = e^{2kh}` and `0 < split < h`).
//! * `0 < k < min_i c_i`, `0 ≤ μ < 1`, `h > 0`.

use nalgebra::DMatrix;

use super::expression::AffineSymmetricExpression;
use super::registry::{declare_decision_variables, DecisionRegistry, ValuedRegistry, VarKind};
use super::{AnalysisParams, LmiError, NetworkModel};
use crate::inequality::WeightedBasisCoefficients;

/// Constraint sense: `≺ 0` or `≻ 0` (strictness is realized by the margin
/// formulation of the feasibility layer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    NegativeDefinite,
    PositiveDefinite,
}

/// One named constraint of the system.
#[derive(Debug, Clone)]
pub struct LmiConstraint {
    pub name: String,
    pub expr: AffineSymmetricExpression,
    pub sense: Sense,
}

/// Scalar context a system was assembled at (used by reports and the
/// interchange dump).
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SystemMeta {
    pub n: usize,
    pub h: f64,
    pub mu: f64,
    pub k: f64,
    pub xi_delay: f64,
}

/// The assembled homogeneous LMI system.
#[derive(Debug, Clone)]
pub struct LmiSystem {
    pub registry: DecisionRegistry,
    pub constraints: Vec<LmiConstraint>,
    pub meta: SystemMeta,
}

impl LmiSystem {
    /// Largest symmetry defect / constant term over all constraints; both are
    /// zero (to rounding) by construction.
    pub fn structural_defect(&self) -> (f64, f64) {
        let sym = self
            .constraints
            .iter()
            .map(|c| c.expr.max_symmetry_defect())
            .fold(0.0, f64::max);
        let cst = self
            .constraints
            .iter()
            .map(|c| c.expr.max_constant_abs())
            .fold(0.0, f64::max);
        (sym, cst)
    }
}

/// Alternate readings of ambiguities in the published statement; the defaults
/// are the shipped (validated) readings.
#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    /// `true` (default): block 12 is `z(t−(h−split))` and the `Ξ₂` scalar is
    /// `e^{2k·split}`; `false`: offset `split` itself.
    pub xi_delay_from_right: bool,
    /// `false` (default): fourth projection vector uses `(q₁₃/q₁)e₆` as
    /// printed; `true`: the derivation's `(q₁₃/q₁)h·e₆`.
    pub fourth_vector_e6_times_h: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            xi_delay_from_right: true,
            fourth_vector_e6_times_h: false,
        }
    }
}

/// The named blocks of the criterion, kept separate so tests can compare each
/// against an independent dense evaluation.
#[derive(Debug, Clone)]
pub struct TheoremBlocks {
    pub registry: DecisionRegistry,
    pub meta: SystemMeta,
    pub xi1: AffineSymmetricExpression,
    pub xi2: AffineSymmetricExpression,
    pub xi3: AffineSymmetricExpression,
    pub xi4: AffineSymmetricExpression,
    pub xi5: AffineSymmetricExpression,
    pub psi: AffineSymmetricExpression,
    pub pi: AffineSymmetricExpression,
    pub phi: AffineSymmetricExpression,
    pub theta1: AffineSymmetricExpression,
    pub theta2: AffineSymmetricExpression,
    pub gamma: AffineSymmetricExpression,
}

/// Block-column selector: `12n×n` matrix with `Iₙ` in block `i` (1-based), so
/// that `selector(i,n)ᵀ·η` extracts the `i`-th block of `η`.
pub fn selector(i: usize, n: usize) -> Result<DMatrix<f64>, LmiError> {
    if !(1..=12).contains(&i) {
        return Err(LmiError::IndexOutOfRange { index: i });
    }
    let mut m = DMatrix::zeros(12 * n, n);
    m.view_mut(((i - 1) * n, 0), (n, n))
        .copy_from(&DMatrix::identity(n, n));
    Ok(m)
}

/// The derivative selector `e_s = −e₁Cᵀ + e₄Aᵀ + e₅Bᵀ`, so that `e_sᵀη = ż(t)`
/// under the network dynamics.
pub fn build_es(model: &NetworkModel) -> DMatrix<f64> {
    let n = model.n();
    let e1 = selector(1, n).expect("index in range");
    let e4 = selector(4, n).expect("index in range");
    let e5 = selector(5, n).expect("index in range");
    -&e1 * model.c().transpose() + e4 * model.a().transpose() + e5 * model.b().transpose()
}

fn hstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = parts[0].nrows();
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows);
        out.view_mut((0, at), (rows, p.ncols())).copy_from(p);
        at += p.ncols();
    }
    out
}

fn validate_inputs(
    model: &NetworkModel,
    params: &AnalysisParams,
    coeffs: &WeightedBasisCoefficients,
) -> Result<(), LmiError> {
    if params.k >= model.c_min() {
        return Err(LmiError::InvalidParams {
            context: format!(
                "rate k = {} must be below min_i c_i = {}",
                params.k,
                model.c_min()
            ),
        });
    }
    let w_expected = (2.0 * params.k * params.h).exp();
    if ((coeffs.w - w_expected) / w_expected).abs() > 1e-9 {
        return Err(LmiError::InvalidParams {
            context: format!(
                "basis coefficients were not computed on [0, h]={} at rate k={}: \
                 w = {} vs expected {}",
                params.h, params.k, coeffs.w, w_expected
            ),
        });
    }
    if !(0.0 < coeffs.split && coeffs.split < params.h) {
        return Err(LmiError::InvalidParams {
            context: format!(
                "split {} outside the normalized window (0, {})",
                coeffs.split, params.h
            ),
        });
    }
    Ok(())
}

/// Assembles all named blocks at one analysis point.
pub fn build_theorem_blocks(
    model: &NetworkModel,
    params: &AnalysisParams,
    coeffs: &WeightedBasisCoefficients,
    opts: AssemblyOptions,
) -> Result<TheoremBlocks, LmiError> {
    validate_inputs(model, params, coeffs)?;
    let n = model.n();
    let dim = 12 * n;
    let (h, mu, k) = (params.h, params.mu, params.k);
    let (c1, c2, c3, c4) = (coeffs.c1, coeffs.c2, coeffs.c3, coeffs.c4);
    let (q0, q1, q2, q3, q13) = (coeffs.q0, coeffs.q1, coeffs.q2, coeffs.q3, coeffs.q13);
    let xi_delay = if opts.xi_delay_from_right {
        h - coeffs.split
    } else {
        coeffs.split
    };

    let reg = declare_decision_variables(n);
    let e = |i: usize| selector(i, n).expect("index in range");
    let (e1, e2, e3, e4, e5, e6) = (e(1), e(2), e(3), e(4), e(5), e(6));
    let (e7, e8, e9, e10, e11, e12) = (e(7), e(8), e(9), e(10), e(11), e(12));
    let es = build_es(model);
    let l = model.l_diag();

    let (p, q) = (reg.var("P"), reg.var("Q"));
    let (u1, u2, u3) = (reg.var("U1"), reg.var("U2"), reg.var("U3"));
    let (z1, z2, z3) = (reg.var("Z1"), reg.var("Z2"), reg.var("Z3"));
    let (n1, n2) = (reg.var("N1"), reg.var("N2"));
    let (m1, m2) = (reg.var("M1"), reg.var("M2"));
    let (d1, d2) = (reg.var("D1"), reg.var("D2"));
    let (r1, r2) = (reg.var("R1"), reg.var("R2"));
    let s = reg.var("S");

    // Stacked moment bases.
    let he6 = &e6 * h;
    let he7 = &e7 * h;
    let he8 = &e8 * h;
    let he9 = &e9 * h;
    let z4c = hstack(&[&e1, &he6, &he9]);
    let z1c = hstack(&[&e1, &he7, &he9]);
    let z2c = hstack(&[&e1, &he8, &he9]);
    let z3rhs = {
        let mid = &e1 - &e3;
        let lst = (&e1 - &e6) * 2.0;
        hstack(&[&es, &mid, &lst])
    };
    let g1 = {
        let a0 = &e1 - &e2;
        let a1 = &e1 + &e2 - &e7 * 2.0;
        let a2 = &e1 - &e2 + &e7 * 6.0 - &e10 * 6.0;
        hstack(&[&a0, &a1, &a2])
    };
    let g2 = {
        let a0 = &e2 - &e3;
        let a1 = &e2 + &e3 - &e8 * 2.0;
        let a2 = &e2 - &e3 + &e8 * 6.0 - &e11 * 6.0;
        hstack(&[&a0, &a1, &a2])
    };
    let g3 = {
        let a0 = &e1 - &e3;
        let a1 = &e1 * (h + c1) - &e3 * c1 - &e6 * h;
        let a2 = &e1 * (h * h + c2 * h + c3) - &e3 * c3 - &e6 * (c2 * h) - &e9 * (h * h);
        hstack(&[&a0, &a1, &a2])
    };
    let e14 = hstack(&[&e1, &e4]);
    let e25 = hstack(&[&e2, &e5]);
    let e1l = &e1 * &l;
    let e2l = &e2 * &l;
    let e1l_m_e4 = &e1l - &e4;

    let ekh = (2.0 * k * h).exp();
    let ekhx = (2.0 * k * (h - xi_delay)).exp();
    let emkh = (-2.0 * k * h).exp();

    // Ξ₁ = sym( k·ζ⁽⁴⁾Pζ⁽⁴⁾ᵀ + 2k(e₄D₁e₁ᵀ + (e₁L−e₄)D₂e₁ᵀ)
    //           + e₄D₁e_sᵀ + (e₁L−e₄)D₂e_sᵀ )
    let xi1 = {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(k, &z4c, p, &z4c);
        x.add_quadratic(2.0 * k, &e4, d1, &e1);
        x.add_quadratic(2.0 * k, &e1l_m_e4, d2, &e1);
        x.add_quadratic(1.0, &e4, d1, &es);
        x.add_quadratic(1.0, &e1l_m_e4, d2, &es);
        x.symmetrized()
    };

    // Ξ₂: delayed quadratic states.
    let xi2 = {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(ekh, &e14, q, &e14);
        x.add_quadratic(ekh, &e1, u1, &e1);
        x.add_quadratic(ekh, &e1, u2, &e1);
        x.add_quadratic(-(1.0 - mu), &e25, q, &e25);
        x.add_quadratic(-ekhx, &e12, u2, &e12);
        x.add_quadratic(ekhx, &e12, u3, &e12);
        x.add_quadratic(-1.0, &e3, u1, &e3);
        x.add_quadratic(-1.0, &e3, u3, &e3);
        x
    };

    // Ξ₃: ż-level weighted integral bounds.
    let xi3 = {
        let v96 = &e6 * (2.0 * c1 / h) + &e9;
        let e6fac = if opts.fourth_vector_e6_times_h { h } else { 1.0 };
        let v4 = &e1 * (1.0 - (h + c1) * q13 / q1) - &e3 * (1.0 + c4 - c1 * q13 / q1)
            + &e6 * (q13 / q1 * e6fac)
            + &e12 * c4;
        let g3c0 = g3.columns(0, n).into_owned();
        let g3c1 = g3.columns(n, n).into_owned();
        let g3c2 = g3.columns(2 * n, n).into_owned();
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(h * h, &es, z1, &es);
        x.add_quadratic(h * h, &e1, z2, &e1);
        x.add_quadratic(h * h, &es, z3, &es);
        x.add_quadratic(-(h.powi(3) / q0), &e6, z2, &e6);
        x.add_quadratic(-(h.powi(5) / (4.0 * q1)), &v96, z2, &v96);
        x.add_quadratic(-(h / q0), &g3c0, z3, &g3c0);
        x.add_quadratic(-(h / q1), &g3c1, z3, &g3c1);
        x.add_quadratic(-(h / q2), &g3c2, z3, &g3c2);
        x.add_quadratic(-(h / q3), &v4, z3, &v4);
        x
    };

    // Ξ₄: double-integral bounds with scalar e^{−2kh}.
    let xi4 = {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(h * h / 2.0, &es, n1, &es);
        x.add_quadratic(h * h / 2.0, &es, n2, &es);
        let n1_vectors = [
            (2.0, &e1 - &e7),
            (4.0, &e1 + &e7 * 2.0 - &e10 * 3.0),
            (2.0, &e2 - &e8),
            (4.0, &e2 + &e8 * 2.0 - &e11 * 3.0),
        ];
        for (wt, v) in n1_vectors {
            x.add_quadratic(-emkh * wt, &v, n1, &v);
        }
        let n2_vectors = [
            (2.0, &e2 - &e7),
            (4.0, &e2 - &e7 * 4.0 + &e10 * 3.0),
            (2.0, &e3 - &e8),
            (4.0, &e3 - &e8 * 4.0 + &e11 * 3.0),
        ];
        for (wt, v) in n2_vectors {
            x.add_quadratic(-emkh * wt, &v, n2, &v);
        }
        x
    };

    // Ξ₅ = (μ/h)·e₁(M₁−M₂)e₁ᵀ.
    let xi5 = {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(mu / h, &e1, m1, &e1);
        x.add_quadratic(-(mu / h), &e1, m2, &e1);
        x
    };

    // Ψ = −e^{−2kh}·( γ⁽¹⁾Z₁₃γ⁽¹⁾ᵀ + γ⁽²⁾Z₁₃γ⁽²⁾ᵀ + sym(γ⁽¹⁾Sγ⁽²⁾ᵀ) ),
    // Z₁₃ = diag{Z₁, 3Z₁, 5Z₁}.
    let psi = {
        let mut x = AffineSymmetricExpression::zero(dim);
        for g in [&g1, &g2] {
            for (blk, wt) in [(0usize, 1.0), (1, 3.0), (2, 5.0)] {
                let cols = g.columns(blk * n, n).into_owned();
                x.add_quadratic(-emkh * wt, &cols, z1, &cols);
            }
        }
        let mut cross = AffineSymmetricExpression::zero(dim);
        cross.add_quadratic(1.0, &g1, s, &g2);
        x.add_scaled(&cross.symmetrized(), -emkh);
        x
    };

    // Π = sym( e₁LR₁e₄ᵀ − e₄R₁e₄ᵀ + e₂LR₂e₅ᵀ − e₅R₂e₅ᵀ ).
    let pi = {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(1.0, &e1l, r1, &e4);
        x.add_quadratic(-1.0, &e4, r1, &e4);
        x.add_quadratic(1.0, &e2l, r2, &e5);
        x.add_quadratic(-1.0, &e5, r2, &e5);
        x.symmetrized()
    };

    // Θⱼ = sym(ζ⁽ʲ⁾Pζ⁽³⁾ᵀ) + sym(k·e₁Mⱼe₁ᵀ + e₁Mⱼe_sᵀ).
    let theta = |zc: &DMatrix<f64>, mvar| {
        let mut x = AffineSymmetricExpression::zero(dim);
        x.add_quadratic(1.0, zc, p, &z3rhs);
        let mut x = x.symmetrized();
        let mut rate = AffineSymmetricExpression::zero(dim);
        rate.add_quadratic(k, &e1, mvar, &e1);
        rate.add_quadratic(1.0, &e1, mvar, &es);
        x.add_assign(&rate.symmetrized());
        x
    };
    let theta1 = theta(&z1c, m1);
    let theta2 = theta(&z2c, m2);

    // Γ = [Z₁₁, S; Sᵀ, Z₁₂] on the 6n-dimensional Wirtinger coordinates,
    // Z₁₁ = diag{Z₁+N₁, 3(Z₁+N₁), 5(Z₁+N₁)}, Z₁₂ the same with N₂.
    let gamma = {
        let gdim = 6 * n;
        let t = |i: usize| {
            let mut m = DMatrix::zeros(gdim, n);
            m.view_mut((i * n, 0), (n, n))
                .copy_from(&DMatrix::identity(n, n));
            m
        };
        let blocks: Vec<DMatrix<f64>> = (0..6).map(t).collect();
        let mut x = AffineSymmetricExpression::zero(gdim);
        for (bi, wt) in [(0usize, 1.0), (1, 3.0), (2, 5.0)] {
            x.add_quadratic(wt, &blocks[bi], z1, &blocks[bi]);
            x.add_quadratic(wt, &blocks[bi], n1, &blocks[bi]);
            x.add_quadratic(wt, &blocks[bi + 3], z1, &blocks[bi + 3]);
            x.add_quadratic(wt, &blocks[bi + 3], n2, &blocks[bi + 3]);
        }
        let ttop = hstack(&[&blocks[0], &blocks[1], &blocks[2]]);
        let tbot = hstack(&[&blocks[3], &blocks[4], &blocks[5]]);
        let mut cross = AffineSymmetricExpression::zero(gdim);
        cross.add_quadratic(1.0, &ttop, s, &tbot);
        x.add_assign(&cross.symmetrized());
        x
    };

    let mut phi = AffineSymmetricExpression::zero(dim);
    for part in [&xi1, &xi2, &xi3, &xi4, &xi5, &psi, &pi] {
        phi.add_assign(part);
    }

    Ok(TheoremBlocks {
        registry: reg,
        meta: SystemMeta {
            n,
            h,
            mu,
            k,
            xi_delay,
        },
        xi1,
        xi2,
        xi3,
        xi4,
        xi5,
        psi,
        pi,
        phi,
        theta1,
        theta2,
        gamma,
    })
}

/// Assembles the full constraint system at one analysis point (the shipped
/// readings; see [`build_theorem_blocks`] for alternates).
pub fn build_theorem_lmis(
    model: &NetworkModel,
    params: &AnalysisParams,
    coeffs: &WeightedBasisCoefficients,
) -> Result<LmiSystem, LmiError> {
    build_theorem_lmis_with(model, params, coeffs, AssemblyOptions::default())
}

/// As [`build_theorem_lmis`] with explicit alternate-reading options.
pub fn build_theorem_lmis_with(
    model: &NetworkModel,
    params: &AnalysisParams,
    coeffs: &WeightedBasisCoefficients,
    opts: AssemblyOptions,
) -> Result<LmiSystem, LmiError> {
    let blocks = build_theorem_blocks(model, params, coeffs, opts)?;
    let reg = blocks.registry.clone();

    let mut constraints = Vec::new();
    let mut vertex1 = blocks.phi.clone();
    vertex1.add_assign(&blocks.theta1);
    constraints.push(LmiConstraint {
        name: "Phi+Theta1".into(),
        expr: vertex1,
        sense: Sense::NegativeDefinite,
    });
    let mut vertex2 = blocks.phi.clone();
    vertex2.add_assign(&blocks.theta2);
    constraints.push(LmiConstraint {
        name: "Phi+Theta2".into(),
        expr: vertex2,
        sense: Sense::NegativeDefinite,
    });
    constraints.push(LmiConstraint {
        name: "Gamma".into(),
        expr: blocks.gamma.clone(),
        sense: Sense::PositiveDefinite,
    });
    for var in reg.vars() {
        if var.name == "S" {
            continue; // the coupling block is sign-free
        }
        let ident = DMatrix::identity(var.dim, var.dim);
        let mut expr = AffineSymmetricExpression::zero(var.dim);
        expr.add_quadratic(1.0, &ident, var, &ident);
        constraints.push(LmiConstraint {
            name: var.name.to_string(),
            expr,
            sense: Sense::PositiveDefinite,
        });
    }

    Ok(LmiSystem {
        registry: reg,
        constraints,
        meta: blocks.meta,
    })
}

/// The decay-envelope constant of a certified point: `‖z(t)‖ ≤ H·‖φ‖·e^{−kt}`
/// with `H = √(Λ/λ_min(P))`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OvershootReport {
    pub lambda: f64,
    pub lambda_min_p: f64,
    pub h_factor: f64,
    pub breakdown: Vec<(String, f64)>,
}

fn eig_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues.min(), eig.eigenvalues.max())
}

/// Evaluates the functional's initial-condition bound `Λ` term by term on a
/// feasibility witness and forms the envelope factor `H`.
///
/// The published expression divides by `λ_max(P)`; a valid envelope needs the
/// lower bound `V ≥ e^{2kt}λ_min(P)‖z‖²`, so `H` uses `λ_min(P)` (the report
/// carries the value so the substitution is visible).
pub fn compute_overshoot(
    witness: &ValuedRegistry,
    model: &NetworkModel,
    params: &AnalysisParams,
) -> Result<OvershootReport, LmiError> {
    if witness.registry.state_dim() != model.n() {
        return Err(LmiError::DimensionMismatch {
            context: format!(
                "witness is for n = {}, model has n = {}",
                witness.registry.state_dim(),
                model.n()
            ),
        });
    }
    // A witness must satisfy every positivity constraint.
    for var in witness.registry.vars() {
        if var.name == "S" {
            continue;
        }
        let value = var.materialize(&witness.values);
        let ok = match var.kind {
            VarKind::Diagonal => value.diagonal().iter().all(|&v| v > 0.0),
            _ => eig_extremes(&value).0 > 0.0,
        };
        if !ok {
            return Err(LmiError::NotAWitness {
                context: format!("{} is not positive definite", var.name),
            });
        }
    }

    let (h, k) = (params.h, params.k);
    let l = model.l_diag();
    let lmax = |name: &str| eig_extremes(&witness.matrix(name)).1;
    let l2_max = model.l().iter().map(|v| v * v).fold(f64::MIN, f64::max);
    let gram_max = |m: &DMatrix<f64>| eig_extremes(&(m.transpose() * m)).1;

    let p_term = eig_extremes(&witness.matrix("P")).1 * (1.0 + 2.0 * h * h);
    let d1_term = 2.0 * eig_extremes(&(witness.matrix("D1") * &l)).1;
    let d2_term = 2.0 * eig_extremes(&(witness.matrix("D2") * &l)).1;
    let ekh = (2.0 * k * h).exp();
    let q_term = h * ekh * lmax("Q") * (1.0 + l2_max);
    let u_term = h * ekh * (lmax("U1") + lmax("U2") + lmax("U3"));
    let zn_weights = h.powi(3) / 2.0 * lmax("Z1")
        + h.powi(3) / 2.0 * lmax("Z3")
        + h.powi(3) / 6.0 * lmax("N1")
        + h.powi(3) / 2.0 * lmax("N2");
    let dynamics_gain =
        gram_max(model.c()) + gram_max(model.a()) * l2_max + gram_max(model.b()) * l2_max;
    let zn_term = zn_weights * dynamics_gain;
    let m_term = h * eig_extremes(&(witness.matrix("M1") + witness.matrix("M2"))).1;
    let z2_term = h.powi(3) / 2.0 * lmax("Z2");

    let breakdown = vec![
        ("P(1+2h^2)".to_string(), p_term),
        ("2 D1 L".to_string(), d1_term),
        ("2 D2 L".to_string(), d2_term),
        ("h e^{2kh} Q (1+Lmax^2)".to_string(), q_term),
        ("h e^{2kh} (U1+U2+U3)".to_string(), u_term),
        ("double-integral (Z1,Z3,N1,N2)".to_string(), zn_term),
        ("h (M1+M2)".to_string(), m_term),
        ("h^3/2 Z2".to_string(), z2_term),
    ];
    let lambda: f64 = breakdown.iter().map(|(_, v)| v).sum();
    let lambda_min_p = eig_extremes(&witness.matrix("P")).0;
    Ok(OvershootReport {
        lambda,
        lambda_min_p,
        h_factor: (lambda / lambda_min_p).sqrt(),
        breakdown,
    })
}
