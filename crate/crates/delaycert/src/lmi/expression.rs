//! Symmetric matrix expressions affine in the scalar decision variables.
//!
//! Every constraint of the criterion has the shape `M(x) = M₀ + Σᵥ xᵥ·Mᵥ`
//! with symmetric coefficient matrices `Mᵥ` and (for this homogeneous
//! criterion) `M₀ = 0`. The expression type stores the coefficient map
//! sparsely by variable id and supports exactly the operations the assembly
//! needs: accumulate quadratic-in-selector terms `scale · Lft · X · Rgtᵀ`
//! (where `X` is a matrix decision variable and `Lft`, `Rgt` are constant
//! "tall" block matrices), add, scale, symmetrize, and evaluate at a
//! valuation.
//!
//! `Lft · E · Rgtᵀ` for an elementary `E = eᵢeⱼᵀ` is the outer product of
//! column `i` of `Lft` with column `j` of `Rgt`; symmetric variables
//! contribute the mirrored elementary as well. Nothing here symmetrizes
//! implicitly: terms that the criterion wraps in `sym(·) = (·) + (·)ᵀ` must go
//! through [`AffineSymmetricExpression::symmetrized`], exactly mirroring the
//! printed formulas.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::registry::{MatrixVar, VarId};

/// A `dim×dim` matrix expression, affine in scalar decision variables.
#[derive(Debug, Clone)]
pub struct AffineSymmetricExpression {
    dim: usize,
    constant: DMatrix<f64>,
    coeffs: BTreeMap<VarId, DMatrix<f64>>,
}

impl AffineSymmetricExpression {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            constant: DMatrix::zeros(dim, dim),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self) -> &DMatrix<f64> {
        &self.constant
    }

    pub fn constant_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<VarId, DMatrix<f64>> {
        &self.coeffs
    }

    /// Accumulates `scale · Lft · X · Rgtᵀ` where `X` is the decision matrix
    /// `var`. `Lft` and `Rgt` must be `dim × var.dim`.
    pub fn add_quadratic(
        &mut self,
        scale: f64,
        lft: &DMatrix<f64>,
        var: &MatrixVar,
        rgt: &DMatrix<f64>,
    ) {
        assert_eq!(lft.nrows(), self.dim, "left factor height");
        assert_eq!(rgt.nrows(), self.dim, "right factor height");
        assert_eq!(lft.ncols(), var.dim, "left factor width vs {}", var.name);
        assert_eq!(rgt.ncols(), var.dim, "right factor width vs {}", var.name);
        var.for_each_scalar(|id, i, j, mirrored| {
            let slot = self
                .coeffs
                .entry(id)
                .or_insert_with(|| DMatrix::zeros(self.dim, self.dim));
            // Lft·eᵢeⱼᵀ·Rgtᵀ = lft[:,i] ⊗ rgt[:,j]
            slot.gemm(scale, &lft.column(i), &rgt.column(j).transpose(), 1.0);
            if mirrored {
                slot.gemm(scale, &lft.column(j), &rgt.column(i).transpose(), 1.0);
            }
        });
    }

    /// Adds `value` to the `(row, col)` entry of scalar `id`'s coefficient
    /// matrix (used when rebuilding an expression from an entry list).
    pub fn insert_coefficient(&mut self, id: VarId, row: usize, col: usize, value: f64) {
        assert!(row < self.dim && col < self.dim, "entry out of range");
        let slot = self
            .coeffs
            .entry(id)
            .or_insert_with(|| DMatrix::zeros(self.dim, self.dim));
        slot[(row, col)] += value;
    }

    /// Adds `scale · other` into `self`.
    pub fn add_scaled(&mut self, other: &Self, scale: f64) {
        assert_eq!(self.dim, other.dim, "expression dims differ");
        self.constant += &other.constant * scale;
        for (id, m) in &other.coeffs {
            let slot = self
                .coeffs
                .entry(*id)
                .or_insert_with(|| DMatrix::zeros(self.dim, self.dim));
            *slot += m * scale;
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, 1.0);
    }

    /// `(·) + (·)ᵀ` applied to every coefficient and the constant.
    pub fn symmetrized(mut self) -> Self {
        self.constant = &self.constant + self.constant.transpose();
        for m in self.coeffs.values_mut() {
            *m = &*m + m.transpose();
        }
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.constant *= s;
        for m in self.coeffs.values_mut() {
            *m *= s;
        }
        self
    }

    /// Dense value at a valuation (indexed by scalar id).
    pub fn eval(&self, values: &[f64]) -> DMatrix<f64> {
        let mut out = self.constant.clone();
        for (id, m) in &self.coeffs {
            out += m * values[*id];
        }
        out
    }

    /// Largest `|M − Mᵀ|` entry over all coefficients and the constant —
    /// zero (to rounding) for every expression the assembly emits.
    pub fn max_symmetry_defect(&self) -> f64 {
        let defect = |m: &DMatrix<f64>| (m - m.transpose()).abs().max();
        self.coeffs
            .values()
            .map(defect)
            .fold(defect(&self.constant), f64::max)
    }

    /// Largest absolute constant-term entry (zero for a homogeneous system).
    pub fn max_constant_abs(&self) -> f64 {
        self.constant.abs().max()
    }
}
