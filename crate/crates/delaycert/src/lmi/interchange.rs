//! JSON interchange format for assembled LMI systems.
//!
//! # Background
//!
//! An assembled system is a list of affine-symmetric constraints over the
//! shared scalar decision vector.  For cross-checking against independent
//! tooling (and for archiving the exact system a certificate refers to), the
//! system can be serialized to a self-describing JSON document:
//!
//! ```text
//! {
//!   "meta":      { n, h, mu, k, xi_delay },
//!   "variables": [ { name, dim, kind, base, count }, ... ],
//!   "constraints": [
//!     { "name": "Phi+Theta1", "sense": "NegativeDefinite", "dim": 24,
//!       "entries": [ [scalar_id, row, col, value], ... ] },
//!     ...
//!   ]
//! }
//! ```
//!
//! `entries` lists only nonzero coefficients of the constraint's dependence
//! on each scalar decision variable; row/col run over the full (symmetric)
//! constraint matrix, so a reader can rebuild each coefficient matrix without
//! knowing the symmetric storage convention.  Constant terms are omitted —
//! the criterion's systems are homogeneous, and [`read_system`] rejects
//! documents that claim otherwise (absent field = zero).
//!
//! # Assumptions
//!
//! Round-tripping preserves coefficients bit-exactly for finite values
//! (serde_json prints f64 shortest-round-trip).

use std::fs;
use std::path::Path;

use super::assembly::{LmiConstraint, LmiSystem, Sense, SystemMeta};
use super::expression::AffineSymmetricExpression;
use super::registry::{declare_decision_variables, VarKind};
use super::LmiError;

#[derive(serde::Serialize, serde::Deserialize)]
struct VariableRecord {
    name: String,
    dim: usize,
    kind: String,
    base: usize,
    count: usize,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ConstraintRecord {
    name: String,
    sense: Sense,
    dim: usize,
    entries: Vec<(usize, usize, usize, f64)>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SystemDocument {
    meta: SystemMeta,
    variables: Vec<VariableRecord>,
    constraints: Vec<ConstraintRecord>,
}

fn kind_name(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Symmetric => "symmetric",
        VarKind::Diagonal => "diagonal",
        VarKind::Full => "full",
    }
}

fn to_document(system: &LmiSystem) -> SystemDocument {
    let variables = system
        .registry
        .vars()
        .iter()
        .map(|v| VariableRecord {
            name: v.name.to_string(),
            dim: v.dim,
            kind: kind_name(v.kind).to_string(),
            base: v.base,
            count: v.num_scalars(),
        })
        .collect();
    let constraints = system
        .constraints
        .iter()
        .map(|c| {
            let mut entries = Vec::new();
            for (&id, coef) in c.expr.coeffs() {
                for col in 0..coef.ncols() {
                    for row in 0..coef.nrows() {
                        let v = coef[(row, col)];
                        if v != 0.0 {
                            entries.push((id, row, col, v));
                        }
                    }
                }
            }
            ConstraintRecord {
                name: c.name.clone(),
                sense: c.sense,
                dim: c.expr.dim(),
                entries,
            }
        })
        .collect();
    SystemDocument {
        meta: system.meta,
        variables,
        constraints,
    }
}

/// Serializes a system to the JSON interchange document.
pub fn system_to_json(system: &LmiSystem) -> String {
    serde_json::to_string_pretty(&to_document(system)).expect("system serialization cannot fail")
}

/// Writes the JSON interchange document to a file.
pub fn write_system(system: &LmiSystem, path: &Path) -> Result<(), LmiError> {
    fs::write(path, system_to_json(system)).map_err(|e| LmiError::InvalidParams {
        context: format!("cannot write {}: {e}", path.display()),
    })
}

/// Parses a JSON interchange document back into an [`LmiSystem`].
pub fn system_from_json(text: &str) -> Result<LmiSystem, LmiError> {
    let doc: SystemDocument =
        serde_json::from_str(text).map_err(|e| LmiError::InvalidParams {
            context: format!("malformed system document: {e}"),
        })?;
    let registry = declare_decision_variables(doc.meta.n);
    // The variable table must match the declared layout for this n.
    if doc.variables.len() != registry.vars().len() {
        return Err(LmiError::InvalidParams {
            context: format!(
                "document declares {} variables, layout for n = {} has {}",
                doc.variables.len(),
                doc.meta.n,
                registry.vars().len()
            ),
        });
    }
    for (rec, var) in doc.variables.iter().zip(registry.vars()) {
        if rec.name != var.name
            || rec.dim != var.dim
            || rec.base != var.base
            || rec.count != var.num_scalars()
            || rec.kind != kind_name(var.kind)
        {
            return Err(LmiError::InvalidParams {
                context: format!("variable record {} does not match the declared layout", rec.name),
            });
        }
    }
    let total = registry.num_scalars();
    let mut constraints = Vec::with_capacity(doc.constraints.len());
    for rec in doc.constraints {
        let mut expr = AffineSymmetricExpression::zero(rec.dim);
        for (id, row, col, value) in rec.entries {
            if id >= total || row >= rec.dim || col >= rec.dim {
                return Err(LmiError::InvalidParams {
                    context: format!(
                        "entry ({id}, {row}, {col}) out of range in constraint {}",
                        rec.name
                    ),
                });
            }
            expr.insert_coefficient(id, row, col, value);
        }
        constraints.push(LmiConstraint {
            name: rec.name,
            expr,
            sense: rec.sense,
        });
    }
    Ok(LmiSystem {
        registry,
        constraints,
        meta: doc.meta,
    })
}

/// Reads a JSON interchange document from a file.
pub fn read_system(path: &Path) -> Result<LmiSystem, LmiError> {
    let text = fs::read_to_string(path).map_err(|e| LmiError::InvalidParams {
        context: format!("cannot read {}: {e}", path.display()),
    })?;
    system_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::super::assembly::build_theorem_lmis;
    use super::super::{AnalysisParams, NetworkModel};
    use super::*;
    use crate::inequality::{compute_coefficients, default_root_tol, Interval, DEFAULT_QUAD_TOL};
    use nalgebra::{DMatrix, DVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_preserves_evaluations() {
        let model = NetworkModel::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.5, -1.0]),
            DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, 0.5]),
            DVector::from_vec(vec![2.0, 3.5]),
            DVector::from_vec(vec![1.0, 1.0]),
        )
        .unwrap();
        let params = AnalysisParams::new(1.0, 0.4, 0.7).unwrap();
        let iv = Interval::new(0.0, 1.0, 0.7).unwrap();
        let coeffs = compute_coefficients(iv, DEFAULT_QUAD_TOL, default_root_tol(1.0)).unwrap();
        let sys = build_theorem_lmis(&model, &params, &coeffs).unwrap();

        let json = system_to_json(&sys);
        let back = system_from_json(&json).unwrap();
        assert_eq!(back.constraints.len(), sys.constraints.len());
        assert_eq!(back.meta.n, 2);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let values: Vec<f64> = (0..sys.registry.num_scalars())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        for (a, b) in sys.constraints.iter().zip(&back.constraints) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.sense, b.sense);
            let diff = (a.expr.eval(&values) - b.expr.eval(&values)).abs().max();
            assert_eq!(diff, 0.0, "round-trip must be bit-exact for {}", a.name);
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(system_from_json("not json").is_err());
        // Valid JSON, wrong shape.
        assert!(system_from_json("{\"meta\": {}}").is_err());
    }
}
