//! The three published benchmark networks and their reference values.
//!
//! # Background
//!
//! The criterion's published evaluation runs three delayed Hopfield networks:
//!
//! * **Example 1** (`n = 2`): the classic two-neuron benchmark with
//!   `C = diag{2, 3.5}` and unit sector slopes; the reference table lists the
//!   largest admissible exponential rate `k` at `h = 1` for
//!   `μ ∈ {0, 0.8, 0.9}`.
//! * **Example 2** (`n = 4`): a four-neuron network; the reference table
//!   lists the largest admissible delay `h` at `k = 10⁻⁶` for
//!   `μ ∈ {0.5, 0.8, 0.9}`.
//! * **Example 3** (`n = 2`): a network whose weight matrices are singularly
//!   coupled (`A = [1 1; −1 −1]`); largest admissible delay at `k = 10⁻⁶`
//!   for `μ ∈ {0.77, 0.80, 0.90}`.
//!
//! Each delay-table example also has a published trajectory figure whose
//! stated initial state and time-varying delay are reproduced here for the
//! simulator.
//!
//! # Assumptions
//!
//! The reference values are transcribed from the published tables verbatim;
//! how close a reproduction is expected to get (and the two cells known to
//! disagree with a re-derivation) is the business of
//! [`crate::search::reproduce`], not of this data module.

use nalgebra::{DMatrix, DVector};

use crate::lmi::NetworkModel;

/// Which quantity a reference table reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SearchKind {
    /// Largest admissible exponential rate `k` at fixed delay bound `h`.
    MaxRate,
    /// Largest admissible delay bound `h` at fixed rate `k`.
    MaxDelay,
}

/// One row of a published reference table: the delay-derivative bound and the
/// published extremal value.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct ReferenceRow {
    pub mu: f64,
    pub published: f64,
}

/// A published benchmark: model, table semantics, and reference rows.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Benchmark {
    /// Stable identifier: `example1`, `example2`, `example3`.
    pub name: &'static str,
    pub model: NetworkModel,
    pub kind: SearchKind,
    /// The fixed parameter: `h` for [`SearchKind::MaxRate`] tables, `k` for
    /// [`SearchKind::MaxDelay`] tables.
    pub fixed: f64,
    pub rows: Vec<ReferenceRow>,
}

/// A published trajectory scenario: initial state (constant history) and the
/// sinusoidal delay `h(t) = h₀ + a·sin(ωt)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrajectoryScenario {
    pub name: &'static str,
    pub model: NetworkModel,
    pub initial_state: Vec<f64>,
    pub delay_center: f64,
    pub delay_amplitude: f64,
    pub delay_frequency: f64,
}

/// Example 1: two neurons, unit slopes.
pub fn example1() -> NetworkModel {
    NetworkModel::new(
        DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.5, -1.0]),
        DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, 0.5]),
        DVector::from_vec(vec![2.0, 3.5]),
        DVector::from_vec(vec![1.0, 1.0]),
    )
    .expect("published model data is valid")
}

/// Example 2: four neurons.
pub fn example2() -> NetworkModel {
    NetworkModel::new(
        DMatrix::from_row_slice(
            4,
            4,
            &[
                -0.0373, 0.4852, -0.3351, 0.2336, //
                -1.6033, 0.5988, -0.3224, 1.2352, //
                0.3394, -0.0860, -0.3824, -0.5785, //
                -0.1311, 0.3253, -0.9534, -0.5015,
            ],
        ),
        DMatrix::from_row_slice(
            4,
            4,
            &[
                0.8674, -1.2405, -0.5325, -0.0220, //
                0.0474, -0.9164, 0.0360, 0.9816, //
                1.8495, 2.6117, -0.3788, 0.0824, //
                -2.0413, 0.5179, 1.1734, -0.2775,
            ],
        ),
        DVector::from_vec(vec![1.2769, 0.6231, 0.9230, 0.4480]),
        DVector::from_vec(vec![0.1137, 0.1279, 0.7994, 0.2368]),
    )
    .expect("published model data is valid")
}

/// Example 3: two neurons with singular weight coupling.
pub fn example3() -> NetworkModel {
    NetworkModel::new(
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, -1.0]),
        DMatrix::from_row_slice(2, 2, &[0.88, 1.0, 1.0, 1.0]),
        DVector::from_vec(vec![2.0, 2.0]),
        DVector::from_vec(vec![0.4, 0.8]),
    )
    .expect("published model data is valid")
}

/// Looks a model up by its stable identifier.
pub fn model_by_name(name: &str) -> Option<NetworkModel> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "example3" => Some(example3()),
        _ => None,
    }
}

/// Rate `k` used by the published delay tables.
pub const TABLE_RATE: f64 = 1e-6;

/// The three published tables.
pub fn benchmarks() -> Vec<Benchmark> {
    vec![
        Benchmark {
            name: "example1",
            model: example1(),
            kind: SearchKind::MaxRate,
            fixed: 1.0,
            rows: vec![
                ReferenceRow {
                    mu: 0.0,
                    published: 1.2477,
                },
                ReferenceRow {
                    mu: 0.8,
                    published: 1.0299,
                },
                ReferenceRow {
                    mu: 0.9,
                    published: 1.0115,
                },
            ],
        },
        Benchmark {
            name: "example2",
            model: example2(),
            kind: SearchKind::MaxDelay,
            fixed: TABLE_RATE,
            rows: vec![
                ReferenceRow {
                    mu: 0.5,
                    published: 4.2050,
                },
                ReferenceRow {
                    mu: 0.8,
                    published: 3.6674,
                },
                ReferenceRow {
                    mu: 0.9,
                    published: 3.5170,
                },
            ],
        },
        Benchmark {
            name: "example3",
            model: example3(),
            kind: SearchKind::MaxDelay,
            fixed: TABLE_RATE,
            rows: vec![
                ReferenceRow {
                    mu: 0.77,
                    published: 7.0739,
                },
                ReferenceRow {
                    mu: 0.80,
                    published: 3.5641,
                },
                ReferenceRow {
                    mu: 0.90,
                    published: 2.2092,
                },
            ],
        },
    ]
}

/// The two published trajectory scenarios (both use `sin(t)`, so the
/// frequency is 1 and `|ḣ| ≤ amplitude`).
pub fn trajectory_scenarios() -> Vec<TrajectoryScenario> {
    vec![
        TrajectoryScenario {
            name: "example2",
            model: example2(),
            initial_state: vec![-1.0, -0.5, 0.5, 1.0],
            delay_center: 2.8674,
            delay_amplitude: 0.8,
            delay_frequency: 1.0,
        },
        TrajectoryScenario {
            name: "example3",
            model: example3(),
            initial_state: vec![-1.0, 1.0],
            delay_center: 6.3039,
            delay_amplitude: 0.77,
            delay_frequency: 1.0,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_have_expected_dimensions_and_entries() {
        assert_eq!(example1().n(), 2);
        assert_eq!(example2().n(), 4);
        assert_eq!(example3().n(), 2);
        assert_eq!(example1().a()[(0, 1)], 0.5);
        assert_eq!(example2().b()[(3, 0)], -2.0413);
        assert_eq!(example2().l()[2], 0.7994);
        assert_eq!(example3().c()[(1, 1)], 2.0);
        assert!(model_by_name("example2").is_some());
        assert!(model_by_name("example9").is_none());
    }

    #[test]
    fn tables_are_mu_sorted_with_decreasing_published_values() {
        for bench in benchmarks() {
            for pair in bench.rows.windows(2) {
                assert!(pair[0].mu < pair[1].mu, "{}: rows sorted by mu", bench.name);
                assert!(
                    pair[0].published > pair[1].published,
                    "{}: published bounds decrease in mu",
                    bench.name
                );
            }
        }
    }

    #[test]
    fn scenario_delays_stay_positive_and_slope_bounded() {
        for sc in trajectory_scenarios() {
            assert!(sc.delay_center - sc.delay_amplitude > 0.0);
            assert_eq!(sc.initial_state.len(), sc.model.n());
            // |ḣ(t)| = |a·ω·cos| ≤ a·ω < 1 for both published scenarios.
            assert!(sc.delay_amplitude * sc.delay_frequency < 1.0);
        }
    }
}
