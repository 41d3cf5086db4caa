//! Assembly of the delay-dependent exponential-stability criterion.
//!
//! # Background
//!
//! The analyzed system is the delayed neural network
//!
//! ```text
//!     ż(t) = −C z(t) + A f(z(t)) + B f(z(t − h(t))),
//!     0 ≤ h(t) ≤ h,   |ḣ(t)| ≤ μ < 1,
//! ```
//!
//! where `C` is positive diagonal, and each activation `f_j` is sector-bounded:
//! `0 ≤ f_j(s)/s ≤ L_j`. The criterion certifies a decay rate `k` via a
//! Lyapunov–Krasovskii functional whose derivative, after bounding every
//! integral term with the weighted inequalities of [`crate::inequality`],
//! becomes `e^{2kt}·ηᵀ(t){Φ + α(t)Θ₁ + (1−α(t))Θ₂}η(t)` for an augmented
//! vector `η(t)` of twelve `n`-blocks:
//!
//! ```text
//!     η = [ z(t), z(t−h(t)), z(t−h), f(z(t)), f(z(t−h(t))),
//!           (1/h)∫z, (1/h(t))∫z, (1/(h−h(t)))∫z,
//!           (2/h²)∫∫z, (2/h(t)²)∫∫z, (2/(h−h(t))²)∫∫z, z(t−ξ) ]
//! ```
//!
//! (integration windows `[t−h,t]`, `[t−h(t),t]`, `[t−h,t−h(t)]` respectively;
//! `ξ` is the split point of the weighted basis). Since the multiplier
//! `α(t) ∈ [0,1]` enters affinely, negativity at the two vertices
//! `Φ+Θ₁ ≺ 0`, `Φ+Θ₂ ≺ 0` suffices, and together with the reciprocally
//! convex coupling condition `Γ ⪰ 0` and positivity of the functional's
//! matrices these are the criterion's LMIs — all *homogeneous* in the
//! decision variables, which is what the feasibility layer exploits.
//!
//! # Module layout
//!
//! * [`registry`] — decision variables flattened to scalars (`20.5n²+11.5n`),
//! * [`expression`] — symmetric matrix expressions affine in those scalars,
//! * [`assembly`] — the block-by-block construction of `Φ`, `Θ₁`, `Θ₂`, `Γ`
//!   and the positivity constraints, plus the overshoot constant,
//! * [`interchange`] — a sparse-coefficient dump format for external solver
//!   debugging.
//!
//! # Assumptions
//!
//! * `0 < k < min_i c_i` (required for the sector/offset manipulations in the
//!   functional's derivative) and `0 ≤ μ < 1` (the `−(1−μ)Q` bound direction).
//! * The basis coefficients handed to the assembly were computed on `[0, h]`
//!   with the same rate `k`; this is checked numerically via the scalar
//!   `w = e^{2kh}`.

pub mod assembly;
pub mod expression;
pub mod interchange;
pub mod registry;

pub use assembly::{
    build_es, build_theorem_blocks, build_theorem_lmis, build_theorem_lmis_with,
    compute_overshoot, selector, AssemblyOptions, LmiConstraint, LmiSystem, OvershootReport,
    Sense, SystemMeta, TheoremBlocks,
};
pub use expression::AffineSymmetricExpression;
pub use registry::{declare_decision_variables, DecisionRegistry, MatrixVar, ValuedRegistry, VarId, VarKind};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LmiError {
    #[error("selector index {index} out of range 1..=12")]
    IndexOutOfRange { index: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("invalid parameters: {context}")]
    InvalidParams { context: String },
    #[error("valuation is not a feasibility witness: {context}")]
    NotAWitness { context: String },
}

/// The network data: connection weights `A`, delayed weights `B`, positive
/// diagonal self-feedback `C`, and sector slopes `L` (one per neuron).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "NetworkModelData", into = "NetworkModelData")]
pub struct NetworkModel {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    l: DVector<f64>,
}

impl NetworkModel {
    /// Validates dimensions, diagonality and positivity of `C`, and
    /// positivity of the sector slopes.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c_diag: DVector<f64>,
        l: DVector<f64>,
    ) -> Result<Self, LmiError> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n || c_diag.len() != n || l.len() != n
        {
            return Err(LmiError::DimensionMismatch {
                context: format!(
                    "A {}×{}, B {}×{}, C diag {}, L {}",
                    a.nrows(),
                    a.ncols(),
                    b.nrows(),
                    b.ncols(),
                    c_diag.len(),
                    l.len()
                ),
            });
        }
        let finite = a.iter().chain(b.iter()).all(|v| v.is_finite())
            && c_diag.iter().chain(l.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(LmiError::InvalidParams {
                context: "model entries must be finite".into(),
            });
        }
        if c_diag.iter().any(|&v| v <= 0.0) {
            return Err(LmiError::InvalidParams {
                context: "self-feedback diagonal C must be strictly positive".into(),
            });
        }
        if l.iter().any(|&v| v <= 0.0) {
            return Err(LmiError::InvalidParams {
                context: "sector slopes L must be strictly positive".into(),
            });
        }
        Ok(Self {
            a,
            b,
            c: DMatrix::from_diagonal(&c_diag),
            l,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// `C` as a dense diagonal matrix.
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Sector slopes as a vector.
    pub fn l(&self) -> &DVector<f64> {
        &self.l
    }

    /// `L` as a dense diagonal matrix.
    pub fn l_diag(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.l)
    }

    /// `min_i c_i`, the ceiling for admissible rates `k`.
    pub fn c_min(&self) -> f64 {
        self.c.diagonal().min()
    }
}

/// Serialized shape of [`NetworkModel`]: row-major matrices, `C` and `L` as
/// vectors of diagonal entries / slopes.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct NetworkModelData {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub l: Vec<f64>,
}

impl TryFrom<NetworkModelData> for NetworkModel {
    type Error = String;

    fn try_from(d: NetworkModelData) -> Result<Self, String> {
        let n = d.a.len();
        let rows_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&d.a) || !rows_ok(&d.b) {
            return Err("matrices a and b must be square, same dimension, non-empty".into());
        }
        let flat = |m: &Vec<Vec<f64>>| DMatrix::from_row_iterator(n, n, m.iter().flatten().copied());
        NetworkModel::new(
            flat(&d.a),
            flat(&d.b),
            DVector::from_vec(d.c),
            DVector::from_vec(d.l),
        )
        .map_err(|e| e.to_string())
    }
}

impl From<NetworkModel> for NetworkModelData {
    fn from(m: NetworkModel) -> Self {
        let n = m.n();
        let rows = |mat: &DMatrix<f64>| {
            (0..n)
                .map(|i| (0..n).map(|j| mat[(i, j)]).collect())
                .collect()
        };
        NetworkModelData {
            a: rows(&m.a),
            b: rows(&m.b),
            c: m.c.diagonal().iter().copied().collect(),
            l: m.l.iter().copied().collect(),
        }
    }
}

/// The analysis point: delay bound `h`, delay-derivative bound `μ`, and
/// target exponential rate `k`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnalysisParams {
    pub h: f64,
    pub mu: f64,
    pub k: f64,
}

impl AnalysisParams {
    pub fn new(h: f64, mu: f64, k: f64) -> Result<Self, LmiError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(LmiError::InvalidParams {
                context: format!("delay bound h = {h} must be positive and finite"),
            });
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(LmiError::InvalidParams {
                context: format!("delay-derivative bound mu = {mu} must lie in [0, 1)"),
            });
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(LmiError::InvalidParams {
                context: format!("rate k = {k} must be positive and finite"),
            });
        }
        Ok(Self { h, mu, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::identity(2, 2);
        assert!(NetworkModel::new(
            a.clone(),
            b.clone(),
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![0.5, 0.5])
        )
        .is_ok());
        // C must be strictly positive.
        assert!(NetworkModel::new(
            a.clone(),
            b.clone(),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.5, 0.5])
        )
        .is_err());
        // Dimension mismatch.
        assert!(NetworkModel::new(
            a,
            DMatrix::identity(3, 3),
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![0.5, 0.5])
        )
        .is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AnalysisParams::new(1.0, 0.0, 0.5).is_ok());
        assert!(AnalysisParams::new(1.0, 1.0, 0.5).is_err());
        assert!(AnalysisParams::new(0.0, 0.5, 0.5).is_err());
        assert!(AnalysisParams::new(1.0, 0.5, 0.0).is_err());
        assert!(AnalysisParams::new(1.0, -0.1, 0.5).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let m = NetworkModel::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.5, -1.0]),
            DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, 0.5]),
            DVector::from_vec(vec![2.0, 3.5]),
            DVector::from_vec(vec![1.0, 1.0]),
        )
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: NetworkModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m.a(), back.a());
        assert_eq!(m.c(), back.c());
        // Rejects non-square input.
        let bad = r#"{"a":[[1.0,2.0]],"b":[[1.0]],"c":[1.0],"l":[1.0]}"#;
        assert!(serde_json::from_str::<NetworkModel>(bad).is_err());
    }
}
