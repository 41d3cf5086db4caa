//! Feasibility of homogeneous LMI systems via margin maximization.
//!
//! # Background
//!
//! The criterion's constraint system is *homogeneous*: if `x` satisfies every
//! strict inequality then so does `αx` for any `α > 0`.  Strict feasibility
//! is therefore equivalent to the optimal value of
//!
//! ```text
//!     maximize   t
//!     subject to M_c(x) + tI ⪯ 0        (each ≺-constraint)
//!                M_c(x) − tI ⪰ 0        (each ≻-constraint)
//!                trace normalization: Σ_c trace(X_c) = 1   (S excluded)
//! ```
//!
//! being strictly positive, and the normalization makes the verdict
//! scale-free: a margin `t* > 0` certifies strict feasibility, `t* < 0`
//! certifies that no strictly feasible point exists (any such point could be
//! rescaled onto the normalization slice).  The margin problem itself is
//! always strictly feasible (take any normalized `x` and `t` far negative)
//! and bounded (`P ⪰ tI` with `trace ≤ 1` caps `t`), so a conic solver
//! should always terminate at an optimum; anything else is reported as a
//! numerical failure, not a verdict.
//!
//! # Implementation
//!
//! The margin problem is handed to the Clarabel interior-point solver in its
//! standard form `min qᵀx  s.t.  Ax + s = b, s ∈ K`:
//!
//! * decision columns are the registry's scalars plus one trailing column
//!   for `t`;
//! * each matrix inequality becomes one PSD-triangle cone block whose rows
//!   are the scaled-vectorization (`svec`) of the coefficient matrices —
//!   upper triangle, column-major, off-diagonal entries times `√2` (the
//!   cone's inner-product preserving convention, pinned by a unit test
//!   against a constant SDP with known eigenvalues);
//! * positivity constraints whose coefficients are all diagonal (the sector
//!   multipliers) take a nonnegative-orthant fast path, one row per
//!   diagonal entry;
//! * the trace normalization is a single zero-cone row with `b = 1`.
//!
//! A returned witness is re-checked *independently* of the solver by
//! [`certify`], which evaluates every constraint densely and measures its
//! spectral slack with an eigensolver.
//!
//! # Assumptions
//!
//! * Every constraint has zero constant term (checked; the criterion's
//!   systems are homogeneous by construction).
//! * Verdicts use a symmetric margin threshold (default `1e-7`): margins in
//!   `(−threshold, threshold)` are reported as [`Verdict::Indeterminate`]
//!   rather than rounded to a side.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;
use thiserror::Error;

use crate::lmi::{LmiSystem, Sense};

/// Margins closer to zero than this are not trusted as verdicts.
pub const DEFAULT_MARGIN_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("constraint {constraint} has a nonzero constant term ({value:.3e}); the margin formulation requires a homogeneous system")]
    NonHomogeneous { constraint: String, value: f64 },
    #[error("solver setup rejected the problem: {detail}")]
    SolverSetup { detail: String },
    #[error("solver failed numerically (status {status})")]
    NumericalFailure { status: String },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Scale-free feasibility verdict at one analysis point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    Feasible,
    Infeasible,
    /// The optimal margin is within the trust threshold of zero.
    Indeterminate,
}

/// Knobs for the margin solve.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityOptions {
    pub margin_threshold: f64,
    pub max_iter: u32,
    /// Wall-clock cap in seconds (`None`: no cap).
    pub time_limit: Option<f64>,
    pub verbose: bool,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            margin_threshold: DEFAULT_MARGIN_THRESHOLD,
            max_iter: 500,
            time_limit: None,
            verbose: false,
        }
    }
}

/// Outcome of one margin solve.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    /// Optimal margin `t*` (positive = strictly feasible).
    pub margin: f64,
    pub solver_status: String,
    /// `true` for a full-accuracy solve, `false` for reduced accuracy.
    pub clean: bool,
    /// The normalized decision scalars (a feasibility witness when the
    /// verdict is [`Verdict::Feasible`]).
    pub values: Vec<f64>,
    pub solve_time: f64,
    pub iterations: u32,
}

/// The assembled conic data, exposed for structural tests.
pub struct ConicProblem {
    pub a: CscMatrix<f64>,
    pub b: Vec<f64>,
    pub q: Vec<f64>,
    pub cones: Vec<SupportedConeT<f64>>,
    /// Registry scalars + 1 (the margin column).
    pub num_columns: usize,
}

/// Scaled vectorization: upper triangle, column-major, off-diagonal × √2,
/// so that `⟨svec(A), svec(B)⟩ = ⟨A, B⟩_F` for symmetric `A`, `B`.
pub fn svec(m: &DMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    debug_assert_eq!(d, m.ncols());
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        for i in 0..=j {
            out.push(if i == j { m[(i, j)] } else { m[(i, j)] * sqrt2 });
        }
    }
    out
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let d = m.nrows();
    (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Lowers an assembled system to Clarabel's conic standard form.
pub fn to_conic(system: &LmiSystem) -> Result<ConicProblem, SdpError> {
    for c in &system.constraints {
        let value = c.expr.max_constant_abs();
        if value != 0.0 {
            return Err(SdpError::NonHomogeneous {
                constraint: c.name.clone(),
                value,
            });
        }
    }
    let num_scalars = system.registry.num_scalars();
    let num_columns = num_scalars + 1;
    let t_col = num_scalars;

    let mut rows_i = Vec::new();
    let mut cols_j = Vec::new();
    let mut vals = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut push = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            rows_i.push(i);
            cols_j.push(j);
            vals.push(v);
        }
    };

    // Row 0: trace normalization Σ trace(X) = 1 over every variable but S.
    for var in system.registry.vars() {
        if var.name == "S" {
            continue;
        }
        var.for_each_scalar(|id, i, j, _| {
            if i == j {
                push(0, id, 1.0);
            }
        });
    }
    b.push(1.0);
    cones.push(SupportedConeT::ZeroConeT(1));
    let mut row = 1usize;

    for c in &system.constraints {
        let dim = c.expr.dim();
        let diagonal_fast_path = c.sense == Sense::PositiveDefinite
            && c.expr.coeffs().values().all(is_diagonal);
        if diagonal_fast_path {
            // s_i = M_ii(x) − t ≥ 0.
            for (&id, coef) in c.expr.coeffs() {
                for i in 0..dim {
                    push(row + i, id, -coef[(i, i)]);
                }
            }
            for i in 0..dim {
                push(row + i, t_col, 1.0);
                b.push(0.0);
            }
            cones.push(SupportedConeT::NonnegativeConeT(dim));
            row += dim;
        } else {
            // s = ∓svec(M(x)) − t·svec(−I) ⪰ 0 depending on sense.
            let sign = match c.sense {
                Sense::NegativeDefinite => 1.0, // s = −M(x) − tI
                Sense::PositiveDefinite => -1.0, // s = M(x) − tI
            };
            let tri = dim * (dim + 1) / 2;
            for (&id, coef) in c.expr.coeffs() {
                for (offset, v) in svec(coef).into_iter().enumerate() {
                    push(row + offset, id, sign * v);
                }
            }
            for (offset, v) in svec(&DMatrix::identity(dim, dim)).into_iter().enumerate() {
                push(row + offset, t_col, v);
            }
            b.extend(std::iter::repeat_n(0.0, tri));
            cones.push(SupportedConeT::PSDTriangleConeT(dim));
            row += tri;
        }
    }

    let a = CscMatrix::new_from_triplets(row, num_columns, rows_i, cols_j, vals);
    let mut q = vec![0.0; num_columns];
    q[t_col] = -1.0; // maximize t
    Ok(ConicProblem {
        a,
        b,
        q,
        cones,
        num_columns,
    })
}

/// Solves the margin problem and maps the result to a verdict.
pub fn solve_feasibility(
    system: &LmiSystem,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityReport, SdpError> {
    let problem = to_conic(system)?;
    let settings = DefaultSettings {
        verbose: opts.verbose,
        max_iter: opts.max_iter,
        time_limit: opts.time_limit.unwrap_or(f64::INFINITY),
        ..DefaultSettings::default()
    };
    let p = CscMatrix::zeros((problem.num_columns, problem.num_columns));
    let mut solver = DefaultSolver::new(
        &p,
        &problem.q,
        &problem.a,
        &problem.b,
        &problem.cones,
        settings,
    )
    .map_err(|e| SdpError::SolverSetup {
        detail: e.to_string(),
    })?;
    solver.solve();
    let solution = &solver.solution;
    let status = solution.status;
    let clean = match status {
        SolverStatus::Solved => true,
        SolverStatus::AlmostSolved => false,
        // The margin problem is strictly feasible and bounded; infeasibility
        // certificates and early terminations are numerical failures here.
        other => {
            return Err(SdpError::NumericalFailure {
                status: format!("{other:?}"),
            })
        }
    };
    let num_scalars = system.registry.num_scalars();
    let margin = solution.x[num_scalars];
    let thr = opts.margin_threshold;
    let verdict = if margin >= thr {
        Verdict::Feasible
    } else if margin <= -thr {
        Verdict::Infeasible
    } else {
        Verdict::Indeterminate
    };
    Ok(FeasibilityReport {
        verdict,
        margin,
        solver_status: format!("{status:?}"),
        clean,
        values: solution.x[..num_scalars].to_vec(),
        solve_time: solution.solve_time,
        iterations: solution.iterations,
    })
}

/// Spectral slack of every constraint at a valuation, measured with an
/// eigensolver that shares nothing with the conic solver.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificationReport {
    /// Per constraint: `−λ_max` for ≺-constraints, `λ_min` for ⪰-constraints
    /// (so positive slack = strictly satisfied in both cases).
    pub slacks: Vec<(String, f64)>,
    pub min_slack: f64,
    /// `Σ trace(X)` over the normalized variables (≈ 1 for solver output).
    pub normalization: f64,
}

/// Re-checks a valuation against the system with dense eigendecompositions.
pub fn certify(system: &LmiSystem, values: &[f64]) -> Result<CertificationReport, SdpError> {
    if values.len() != system.registry.num_scalars() {
        return Err(SdpError::DimensionMismatch {
            context: format!(
                "valuation has {} scalars, system declares {}",
                values.len(),
                system.registry.num_scalars()
            ),
        });
    }
    let mut slacks = Vec::with_capacity(system.constraints.len());
    for c in &system.constraints {
        let m = c.expr.eval(values);
        let sym = (&m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let slack = match c.sense {
            Sense::NegativeDefinite => -eig.eigenvalues.max(),
            Sense::PositiveDefinite => eig.eigenvalues.min(),
        };
        slacks.push((c.name.clone(), slack));
    }
    let min_slack = slacks.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    let mut normalization = 0.0;
    for var in system.registry.vars() {
        if var.name == "S" {
            continue;
        }
        var.for_each_scalar(|id, i, j, _| {
            if i == j {
                normalization += values[id];
            }
        });
    }
    Ok(CertificationReport {
        slacks,
        min_slack,
        normalization,
    })
}
