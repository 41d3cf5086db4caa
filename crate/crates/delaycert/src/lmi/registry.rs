//! Decision-variable registry: the named matrix variables of the stability
//! criterion, flattened into symmetry-deduplicated scalar variables.
//!
//! The criterion's hypothesis list declares
//!
//! * `P ∈ S₊^{3n}`, `Q ∈ S₊^{2n}`,
//! * `U₁,U₂,U₃, Z₁,Z₂,Z₃, N₁,N₂, M₁,M₂ ∈ S₊^{n}`,
//! * positive diagonal `D₁,D₂,R₁,R₂`,
//! * one free (non-symmetric) coupling block `S ∈ ℝ^{3n×3n}`.
//!
//! A symmetric `m×m` variable contributes `m(m+1)/2` scalars, a diagonal `m`,
//! a full block `m²`; the total is `20.5n² + 11.5n`, which is the published
//! decision-variable count and is asserted by tests for `n = 1..8`.
//!
//! Scalar ids are assigned contiguously per matrix in declaration order, with
//! a fixed in-matrix layout (lower triangle column-major for symmetric
//! blocks, diagonal order for diagonal blocks, column-major for full blocks),
//! so a valuation is just a `Vec<f64>` indexed by id — the same vector the
//! feasibility solver optimizes over.

use nalgebra::DMatrix;

use super::LmiError;

/// Scalar decision-variable index into a valuation vector.
pub type VarId = usize;

/// Structural class of a matrix decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Symmetric,
    Diagonal,
    Full,
}

/// One named matrix decision variable occupying a contiguous id range.
#[derive(Debug, Clone)]
pub struct MatrixVar {
    pub name: &'static str,
    pub dim: usize,
    pub kind: VarKind,
    pub base: VarId,
}

impl MatrixVar {
    /// Number of independent scalars in this matrix.
    pub fn num_scalars(&self) -> usize {
        match self.kind {
            VarKind::Symmetric => self.dim * (self.dim + 1) / 2,
            VarKind::Diagonal => self.dim,
            VarKind::Full => self.dim * self.dim,
        }
    }

    /// Calls `f(id, i, j, mirrored)` for every independent scalar: the scalar
    /// with id `id` sits at entry `(i, j)`; `mirrored` means it also fills
    /// `(j, i)` (symmetric off-diagonal storage).
    pub fn for_each_scalar<F: FnMut(VarId, usize, usize, bool)>(&self, mut f: F) {
        let m = self.dim;
        match self.kind {
            VarKind::Symmetric => {
                let mut id = self.base;
                for j in 0..m {
                    for i in j..m {
                        f(id, i, j, i != j);
                        id += 1;
                    }
                }
            }
            VarKind::Diagonal => {
                for i in 0..m {
                    f(self.base + i, i, i, false);
                }
            }
            VarKind::Full => {
                let mut id = self.base;
                for j in 0..m {
                    for i in 0..m {
                        f(id, i, j, false);
                        id += 1;
                    }
                }
            }
        }
    }

    /// Reconstructs the dense matrix from a full valuation vector.
    pub fn materialize(&self, values: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.for_each_scalar(|id, i, j, mirrored| {
            out[(i, j)] = values[id];
            if mirrored {
                out[(j, i)] = values[id];
            }
        });
        out
    }
}

/// The full set of decision variables for state dimension `n`.
#[derive(Debug, Clone)]
pub struct DecisionRegistry {
    n: usize,
    vars: Vec<MatrixVar>,
    total: usize,
}

/// Declares the criterion's decision variables for state dimension `n`.
pub fn declare_decision_variables(n: usize) -> DecisionRegistry {
    assert!(n >= 1, "state dimension must be at least 1");
    let spec: [(&'static str, usize, VarKind); 17] = [
        ("P", 3 * n, VarKind::Symmetric),
        ("Q", 2 * n, VarKind::Symmetric),
        ("U1", n, VarKind::Symmetric),
        ("U2", n, VarKind::Symmetric),
        ("U3", n, VarKind::Symmetric),
        ("Z1", n, VarKind::Symmetric),
        ("Z2", n, VarKind::Symmetric),
        ("Z3", n, VarKind::Symmetric),
        ("N1", n, VarKind::Symmetric),
        ("N2", n, VarKind::Symmetric),
        ("M1", n, VarKind::Symmetric),
        ("M2", n, VarKind::Symmetric),
        ("D1", n, VarKind::Diagonal),
        ("D2", n, VarKind::Diagonal),
        ("R1", n, VarKind::Diagonal),
        ("R2", n, VarKind::Diagonal),
        ("S", 3 * n, VarKind::Full),
    ];
    let mut vars = Vec::with_capacity(spec.len());
    let mut base = 0;
    for (name, dim, kind) in spec {
        let var = MatrixVar {
            name,
            dim,
            kind,
            base,
        };
        base += var.num_scalars();
        vars.push(var);
    }
    DecisionRegistry {
        n,
        vars,
        total: base,
    }
}

impl DecisionRegistry {
    /// The network state dimension `n`.
    pub fn state_dim(&self) -> usize {
        self.n
    }

    /// Total number of scalar decision variables (`20.5n² + 11.5n`).
    pub fn num_scalars(&self) -> usize {
        self.total
    }

    /// All matrix variables in declaration order.
    pub fn vars(&self) -> &[MatrixVar] {
        &self.vars
    }

    /// Looks up a matrix variable by name; panics on unknown names (the name
    /// set is a closed, compile-time list).
    pub fn var(&self, name: &str) -> &MatrixVar {
        self.vars
            .iter()
            .find(|v| v.name == name)
            .unwrap_or_else(|| panic!("unknown decision variable {name}"))
    }
}

/// A registry together with one concrete value per scalar variable — a
/// candidate or certified feasibility witness.
#[derive(Debug, Clone)]
pub struct ValuedRegistry {
    pub registry: DecisionRegistry,
    pub values: Vec<f64>,
}

impl ValuedRegistry {
    pub fn new(registry: DecisionRegistry, values: Vec<f64>) -> Result<Self, LmiError> {
        if values.len() != registry.num_scalars() {
            return Err(LmiError::DimensionMismatch {
                context: format!(
                    "valuation has {} scalars, registry declares {}",
                    values.len(),
                    registry.num_scalars()
                ),
            });
        }
        Ok(Self { registry, values })
    }

    /// Dense value of the named matrix variable.
    pub fn matrix(&self, name: &str) -> DMatrix<f64> {
        self.registry.var(name).materialize(&self.values)
    }
}
