//! Acceptance gate: one end-to-end check per published acceptance criterion,
//! one `PASS`/`FAIL` line each.
//!
//! The checks mirror the published evaluation of the criterion:
//!
//!  1–3. reproduction of the three benchmark tables (largest admissible rate
//!       for example1 at `h = 1`, largest admissible delay for example2 and
//!       example3 at `k = 10⁻⁶`), graded against the published values with
//!       the bracketing fallback and documented discrepancies;
//!  4.   the published decision-variable count `20.5n² + 11.5n`;
//!  5.   the seeded randomized soundness suite for the integral inequalities;
//!  6.   flat-weight limits of the weighted-basis constants as `k → 0`;
//!  7.   dual-path evaluation of every named LMI block (coefficient-map
//!       versus an independent dense reconstruction);
//!  8.   independent eigensolver certification of every feasible verdict;
//!  9.   trajectory cross-checks of the certificates (decay envelope, fitted
//!       rate, qualitative decay of the published scenarios);
//! 10.   strict μ-monotonicity of the reproduced bounds and clean post-scans.
//!
//! Runs without the default test harness so the table reproductions are
//! computed once and shared, and so a panic inside one criterion downgrades
//! that criterion to FAIL instead of killing the run.

use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use delaycert::inequality::{
    compute_coefficients, default_root_tol, verify::run_suite, Interval,
    WeightedBasisCoefficients, DEFAULT_QUAD_TOL,
};
use delaycert::lmi::{
    build_theorem_blocks, build_theorem_lmis, compute_overshoot, declare_decision_variables,
    AffineSymmetricExpression, AnalysisParams, AssemblyOptions, NetworkModel, ValuedRegistry,
};
use delaycert::presets::{
    benchmarks, example1, example2, model_by_name, trajectory_scenarios, SearchKind,
};
use delaycert::search::{
    probe_point, reproduce_table, CellGrade, CellResult, ProbeStatus, ReproduceOptions,
    TableResult,
};
use delaycert::sdp::{certify, solve_feasibility, FeasibilityOptions, Verdict};
use delaycert::sim::{
    check_envelope, decays_monotonically, estimate_decay_rate, simulate, DelayFunction,
};

type Outcome = Result<String, Box<dyn Error>>;

fn fail(msg: impl Into<String>) -> Box<dyn Error> {
    msg.into().into()
}

// ---------------------------------------------------------------------------
// Shared table reproductions (criteria 1–3, 8, 10)
// ---------------------------------------------------------------------------

static TABLES: [OnceLock<(TableResult, f64)>; 3] = [const { OnceLock::new() }; 3];

/// Reproduces benchmark table `idx` (0-based) on first use and caches the
/// result together with its wall time; later criteria reuse it.
fn table(idx: usize) -> &'static (TableResult, f64) {
    TABLES[idx].get_or_init(|| {
        let bench = &benchmarks()[idx];
        eprintln!("[acceptance] reproducing {} ...", bench.name);
        let started = Instant::now();
        let result = reproduce_table(bench, &ReproduceOptions::default());
        (result, started.elapsed().as_secs_f64())
    })
}

/// A cell meets the reproduction criterion when its bound lands within ±1% of
/// the published value, when the fallback bracketing holds (feasible at
/// 0.97× the published value and infeasible at 1.05×), or when a persistent
/// deviation was recomputed under the alternate ξ reading and is documented
/// in the report alongside certified brackets and a clean post-scan.
fn cell_meets_criterion(cell: &CellResult) -> Result<(), String> {
    match cell.grade {
        CellGrade::WithinTolerance | CellGrade::Bracketed => Ok(()),
        CellGrade::Discrepancy => match &cell.alternate_xi {
            Some(alt) if alt.bound.is_some() => Ok(()),
            _ => Err(format!(
                "mu={}: discrepancy lacks the alternate-reading comparison",
                cell.mu
            )),
        },
        CellGrade::Error => Err(format!(
            "mu={}: {}",
            cell.mu,
            cell.error.as_deref().unwrap_or("search failed")
        )),
    }
}

fn describe_cells(result: &TableResult) -> String {
    result
        .cells
        .iter()
        .map(|c| {
            let bound = c
                .bound
                .map_or_else(|| "-".to_string(), |b| format!("{b:.4}"));
            let tag = match c.grade {
                CellGrade::WithinTolerance => "within 1%",
                CellGrade::Bracketed => "bracketed",
                CellGrade::Discrepancy => "documented discrepancy",
                CellGrade::Error => "error",
            };
            format!("mu={}: {bound} vs {} ({tag})", c.mu, c.published)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn check_table(idx: usize, budget_s: Option<f64>) -> Outcome {
    let (result, elapsed) = table(idx);
    for cell in &result.cells {
        cell_meets_criterion(cell).map_err(fail)?;
    }
    if let Some(budget) = budget_s {
        if *elapsed > budget {
            return Err(fail(format!(
                "table took {elapsed:.0}s, budget is {budget:.0}s"
            )));
        }
        Ok(format!(
            "{} [{elapsed:.1}s < {budget:.0}s]",
            describe_cells(result)
        ))
    } else {
        Ok(format!("{} [{elapsed:.1}s]", describe_cells(result)))
    }
}

fn c01_rate_table() -> Outcome {
    check_table(0, Some(120.0))
}

fn c02_delay_table_four_neurons() -> Outcome {
    check_table(1, Some(900.0))
}

fn c03_delay_table_singular_coupling() -> Outcome {
    check_table(2, None)
}

// ---------------------------------------------------------------------------
// Criterion 4: decision-variable count
// ---------------------------------------------------------------------------

fn c04_decision_count() -> Outcome {
    for n in 1..=8usize {
        let reg = declare_decision_variables(n);
        // 20.5n² + 11.5n = n(41n + 23)/2, an integer for every n.
        let expected = n * (41 * n + 23) / 2;
        if reg.num_scalars() != expected {
            return Err(fail(format!(
                "n={n}: {} scalar variables, published count is {expected}",
                reg.num_scalars()
            )));
        }
    }
    Ok("scalar count equals 20.5n^2 + 11.5n exactly for n = 1..8".to_string())
}

// ---------------------------------------------------------------------------
// Criterion 5: randomized inequality suite
// ---------------------------------------------------------------------------

fn c05_inequality_suite() -> Outcome {
    let started = Instant::now();
    let report = run_suite(7, 1000)?;
    let elapsed = started.elapsed().as_secs_f64();
    if report.slack_tolerance > 1e-8 {
        return Err(fail(format!(
            "suite tolerance {} is looser than 1e-8",
            report.slack_tolerance
        )));
    }
    for lemma in &report.lemmas {
        if lemma.trials != 1000 {
            return Err(fail(format!(
                "{}: {} trials instead of 1000",
                lemma.name, lemma.trials
            )));
        }
        if lemma.violations > 0 {
            return Err(fail(format!(
                "{}: {} slack violations below -1e-8 (worst {:+.3e})",
                lemma.name, lemma.violations, lemma.worst_slack
            )));
        }
    }
    if elapsed > 60.0 {
        return Err(fail(format!("suite took {elapsed:.1}s, budget is 60s")));
    }
    let worst = report
        .lemmas
        .iter()
        .map(|l| l.worst_slack)
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "3x1000 seeded random functions, zero violations, worst slack {worst:+.1e} [{elapsed:.2}s < 60s]"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 6: flat-weight limits of the basis constants
// ---------------------------------------------------------------------------

fn c06_flat_weight_limits() -> Outcome {
    let k = 1e-8;
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.0, 1.0), (-0.7, 1.8)] {
        let d = b - a;
        let coeffs =
            compute_coefficients(Interval::new(a, b, k)?, DEFAULT_QUAD_TOL, default_root_tol(d))?;
        let checks = [
            ("c1", coeffs.c1, -d / 2.0),
            ("split", coeffs.split, (a + b) / 2.0),
            ("c4", coeffs.c4, -2.0),
            ("q0", coeffs.q0, d),
            ("q1", coeffs.q1, d.powi(3) / 12.0),
        ];
        for (name, got, limit) in checks {
            let rel = ((got - limit) / limit).abs();
            worst = worst.max(rel);
            if rel > 1e-5 {
                return Err(fail(format!(
                    "[{a}, {b}]: {name} = {got:.10} vs flat-weight limit {limit:.10} \
                     (relative deviation {rel:.2e} > 1e-5)"
                )));
            }
        }
    }
    Ok(format!(
        "c1, split, c4, q0, q1 at k = 1e-8 match the flat-weight constants on two windows \
         (worst relative deviation {worst:.1e})"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 7: dual-path evaluation of every named LMI block
// ---------------------------------------------------------------------------

/// Selector for block `i` (1-based) of the 12-block augmented vector, rebuilt
/// from scratch for the dense mirror.
fn sel(i: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(12 * n, n, |r, c| {
        if r == (i - 1) * n + c {
            1.0
        } else {
            0.0
        }
    })
}

fn hcat(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = parts[0].nrows();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    out
}

fn symm(m: DMatrix<f64>) -> DMatrix<f64> {
    &m + m.transpose()
}

/// Every named block of the criterion, computed directly by dense matrix
/// arithmetic on the valued decision matrices — the same printed formulas,
/// but none of the sparse coefficient-map machinery the assembly uses.
fn dense_blocks(
    model: &NetworkModel,
    h: f64,
    mu: f64,
    k: f64,
    coeffs: &WeightedBasisCoefficients,
    valued: &ValuedRegistry,
) -> Vec<(&'static str, DMatrix<f64>)> {
    let n = model.n();
    let (c1, c2, c3, c4) = (coeffs.c1, coeffs.c2, coeffs.c3, coeffs.c4);
    let (q0, q1, q2, q3, q13) = (coeffs.q0, coeffs.q1, coeffs.q2, coeffs.q3, coeffs.q13);

    // Selectors (index 0 unused so eᵢ below matches the published numbering).
    let e: Vec<DMatrix<f64>> = (0..=12)
        .map(|i| if i == 0 { DMatrix::zeros(12 * n, n) } else { sel(i, n) })
        .collect();
    let es = -&e[1] * model.c().transpose()
        + &e[4] * model.a().transpose()
        + &e[5] * model.b().transpose();
    let l = model.l_diag();

    let p = valued.matrix("P");
    let q = valued.matrix("Q");
    let (u1, u2, u3) = (valued.matrix("U1"), valued.matrix("U2"), valued.matrix("U3"));
    let (z1, z2, z3) = (valued.matrix("Z1"), valued.matrix("Z2"), valued.matrix("Z3"));
    let (nn1, nn2) = (valued.matrix("N1"), valued.matrix("N2"));
    let (m1, m2) = (valued.matrix("M1"), valued.matrix("M2"));
    let (d1, d2) = (valued.matrix("D1"), valued.matrix("D2"));
    let (r1, r2) = (valued.matrix("R1"), valued.matrix("R2"));
    let s = valued.matrix("S");

    let ekh = (2.0 * k * h).exp();
    // Block 12 is z(t − (h − split)), so its weight scalar is e^{2k·split}.
    let ekhx = (2.0 * k * coeffs.split).exp();
    let emkh = (-2.0 * k * h).exp();

    let z4c = hcat(&[&e[1], &(&e[6] * h), &(&e[9] * h)]);
    let z1c = hcat(&[&e[1], &(&e[7] * h), &(&e[9] * h)]);
    let z2c = hcat(&[&e[1], &(&e[8] * h), &(&e[9] * h)]);
    let z3rhs = hcat(&[&es, &(&e[1] - &e[3]), &((&e[1] - &e[6]) * 2.0)]);

    let e1l = &e[1] * &l;
    let e2l = &e[2] * &l;
    let e1l_m_e4 = &e1l - &e[4];

    // Ξ₁: derivative of the quadratic/sector part along ż.
    let xi1 = symm(
        &z4c * &p * z4c.transpose() * k
            + &e[4] * &d1 * e[1].transpose() * (2.0 * k)
            + &e1l_m_e4 * &d2 * e[1].transpose() * (2.0 * k)
            + &e[4] * &d1 * es.transpose()
            + &e1l_m_e4 * &d2 * es.transpose(),
    );

    // Ξ₂: delayed quadratic states.
    let e14 = hcat(&[&e[1], &e[4]]);
    let e25 = hcat(&[&e[2], &e[5]]);
    let xi2 = &e14 * &q * e14.transpose() * ekh
        + &e[1] * &u1 * e[1].transpose() * ekh
        + &e[1] * &u2 * e[1].transpose() * ekh
        - &e25 * &q * e25.transpose() * (1.0 - mu)
        - &e[12] * &u2 * e[12].transpose() * ekhx
        + &e[12] * &u3 * e[12].transpose() * ekhx
        - &e[3] * &u1 * e[3].transpose()
        - &e[3] * &u3 * e[3].transpose();

    // Ξ₃: ż-level weighted integral bounds (shipped e₆ reading).
    let v96 = &e[6] * (2.0 * c1 / h) + &e[9];
    let v4 = &e[1] * (1.0 - (h + c1) * q13 / q1) - &e[3] * (1.0 + c4 - c1 * q13 / q1)
        + &e[6] * (q13 / q1)
        + &e[12] * c4;
    let g3_0 = &e[1] - &e[3];
    let g3_1 = &e[1] * (h + c1) - &e[3] * c1 - &e[6] * h;
    let g3_2 = &e[1] * (h * h + c2 * h + c3) - &e[3] * c3 - &e[6] * (c2 * h) - &e[9] * (h * h);
    let xi3 = &es * &z1 * es.transpose() * (h * h)
        + &e[1] * &z2 * e[1].transpose() * (h * h)
        + &es * &z3 * es.transpose() * (h * h)
        - &e[6] * &z2 * e[6].transpose() * (h.powi(3) / q0)
        - &v96 * &z2 * v96.transpose() * (h.powi(5) / (4.0 * q1))
        - &g3_0 * &z3 * g3_0.transpose() * (h / q0)
        - &g3_1 * &z3 * g3_1.transpose() * (h / q1)
        - &g3_2 * &z3 * g3_2.transpose() * (h / q2)
        - &v4 * &z3 * v4.transpose() * (h / q3);

    // Ξ₄: double-integral bounds.
    let mut xi4 = &es * &nn1 * es.transpose() * (h * h / 2.0)
        + &es * &nn2 * es.transpose() * (h * h / 2.0);
    let n1_vecs = [
        (2.0, &e[1] - &e[7]),
        (4.0, &e[1] + &e[7] * 2.0 - &e[10] * 3.0),
        (2.0, &e[2] - &e[8]),
        (4.0, &e[2] + &e[8] * 2.0 - &e[11] * 3.0),
    ];
    for (wt, v) in &n1_vecs {
        xi4 -= v * &nn1 * v.transpose() * (emkh * wt);
    }
    let n2_vecs = [
        (2.0, &e[2] - &e[7]),
        (4.0, &e[2] - &e[7] * 4.0 + &e[10] * 3.0),
        (2.0, &e[3] - &e[8]),
        (4.0, &e[3] - &e[8] * 4.0 + &e[11] * 3.0),
    ];
    for (wt, v) in &n2_vecs {
        xi4 -= v * &nn2 * v.transpose() * (emkh * wt);
    }

    // Ξ₅: delay-derivative correction.
    let xi5 = &e[1] * (&m1 - &m2) * e[1].transpose() * (mu / h);

    // Ψ: reciprocally convex combination of the two Wirtinger-type bounds.
    let g1_0 = &e[1] - &e[2];
    let g1_1 = &e[1] + &e[2] - &e[7] * 2.0;
    let g1_2 = &e[1] - &e[2] + &e[7] * 6.0 - &e[10] * 6.0;
    let g2_0 = &e[2] - &e[3];
    let g2_1 = &e[2] + &e[3] - &e[8] * 2.0;
    let g2_2 = &e[2] - &e[3] + &e[8] * 6.0 - &e[11] * 6.0;
    let mut psi_inner = DMatrix::zeros(12 * n, 12 * n);
    for (wt, g) in [
        (1.0, &g1_0),
        (3.0, &g1_1),
        (5.0, &g1_2),
        (1.0, &g2_0),
        (3.0, &g2_1),
        (5.0, &g2_2),
    ] {
        psi_inner += g * &z1 * g.transpose() * wt;
    }
    let big_g1 = hcat(&[&g1_0, &g1_1, &g1_2]);
    let big_g2 = hcat(&[&g2_0, &g2_1, &g2_2]);
    let cross = &big_g1 * &s * big_g2.transpose();
    let psi = (psi_inner + &cross + cross.transpose()) * -emkh;

    // Π: activation sector condition at z(t) and z(t−h(t)).
    let pi = symm(
        &e1l * &r1 * e[4].transpose() - &e[4] * &r1 * e[4].transpose()
            + &e2l * &r2 * e[5].transpose()
            - &e[5] * &r2 * e[5].transpose(),
    );

    // Θⱼ: delay-dependent vertex terms.
    let theta = |zc: &DMatrix<f64>, mm: &DMatrix<f64>| {
        symm(zc * &p * z3rhs.transpose())
            + symm(&e[1] * mm * e[1].transpose() * k + &e[1] * mm * es.transpose())
    };
    let theta1 = theta(&z1c, &m1);
    let theta2 = theta(&z2c, &m2);

    let phi = &xi1 + &xi2 + &xi3 + &xi4 + &xi5 + &psi + &pi;

    // Γ: positivity side of the reciprocally convex coupling (6n-dim).
    let gdim = 6 * n;
    let t = |i: usize| {
        DMatrix::from_fn(gdim, n, move |r, c| {
            if r == i * n + c {
                1.0
            } else {
                0.0
            }
        })
    };
    let ts: Vec<DMatrix<f64>> = (0..6).map(t).collect();
    let z1n1 = &z1 + &nn1;
    let z1n2 = &z1 + &nn2;
    let mut gamma = DMatrix::zeros(gdim, gdim);
    for (bi, wt) in [(0usize, 1.0), (1, 3.0), (2, 5.0)] {
        gamma += &ts[bi] * &z1n1 * ts[bi].transpose() * wt;
        gamma += &ts[bi + 3] * &z1n2 * ts[bi + 3].transpose() * wt;
    }
    let ttop = hcat(&[&ts[0], &ts[1], &ts[2]]);
    let tbot = hcat(&[&ts[3], &ts[4], &ts[5]]);
    let gcross = &ttop * &s * tbot.transpose();
    gamma += &gcross + gcross.transpose();

    vec![
        ("xi1", xi1),
        ("xi2", xi2),
        ("xi3", xi3),
        ("xi4", xi4),
        ("xi5", xi5),
        ("psi", psi),
        ("pi", pi),
        ("phi", phi),
        ("theta1", theta1),
        ("theta2", theta2),
        ("gamma", gamma),
    ]
}

fn c07_dual_path() -> Outcome {
    // One representative point per model; k stays below min_i c_i (0.448 for
    // the four-neuron network).
    let points = [
        ("example1", example1(), 1.0, 0.6, 0.9),
        ("example2", example2(), 3.2, 0.5, 0.2),
    ];
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for (name, model, h, mu, k) in points {
        let params = AnalysisParams::new(h, mu, k)?;
        let coeffs = compute_coefficients(
            Interval::new(0.0, h, k)?,
            DEFAULT_QUAD_TOL,
            default_root_tol(h),
        )?;
        let blocks = build_theorem_blocks(&model, &params, &coeffs, AssemblyOptions::default())?;
        let exprs: [(&str, &AffineSymmetricExpression); 11] = [
            ("xi1", &blocks.xi1),
            ("xi2", &blocks.xi2),
            ("xi3", &blocks.xi3),
            ("xi4", &blocks.xi4),
            ("xi5", &blocks.xi5),
            ("psi", &blocks.psi),
            ("pi", &blocks.pi),
            ("phi", &blocks.phi),
            ("theta1", &blocks.theta1),
            ("theta2", &blocks.theta2),
            ("gamma", &blocks.gamma),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        for _ in 0..100 {
            let values: Vec<f64> = (0..blocks.registry.num_scalars())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let valued = ValuedRegistry::new(blocks.registry.clone(), values.clone())?;
            let dense = dense_blocks(&model, h, mu, k, &coeffs, &valued);
            for ((dense_name, dense_value), (expr_name, expr)) in dense.iter().zip(exprs.iter()) {
                assert_eq!(dense_name, expr_name);
                let via_expr = expr.eval(&values);
                let diff = (dense_value - &via_expr).abs().max();
                let scale = via_expr
                    .abs()
                    .max()
                    .max(dense_value.abs().max())
                    .max(1e-30);
                let rel = diff / scale;
                worst = worst.max(rel);
                if rel > 1e-10 {
                    return Err(fail(format!(
                        "{name} block {dense_name}: coefficient-map and dense evaluations \
                         differ by {rel:.2e} relative"
                    )));
                }
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{compared} block evaluations (100 valuations x 2 models x 11 blocks) agree to 1e-10 \
         relative (worst {worst:.1e})"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 8: certification soundness of every feasible verdict
// ---------------------------------------------------------------------------

fn c08_certification_soundness() -> Outcome {
    let mut recorded = 0usize;
    let mut reprobed = 0usize;
    for idx in 0..3 {
        let (result, _) = table(idx);
        for cell in &result.cells {
            let probes = cell
                .probe_low
                .iter()
                .chain(cell.probe_high.iter())
                .chain(cell.post_scan.iter());
            for probe in probes {
                if probe.status != ProbeStatus::Feasible {
                    continue;
                }
                let margin = probe.margin.ok_or_else(|| {
                    fail(format!(
                        "{} mu={}: feasible probe at {} carries no margin",
                        cell.example, cell.mu, probe.parameter
                    ))
                })?;
                let slack = probe.certified_slack.ok_or_else(|| {
                    fail(format!(
                        "{} mu={}: feasible probe at {} carries no witness certification",
                        cell.example, cell.mu, probe.parameter
                    ))
                })?;
                if slack < margin - 1e-6 {
                    return Err(fail(format!(
                        "{} mu={}: witness slack {slack:.3e} below margin {margin:.3e} - 1e-6",
                        cell.example, cell.mu
                    )));
                }
                recorded += 1;
            }

            // The reported bound itself must re-probe feasible with a fresh,
            // independently certified witness.
            let bound = cell
                .bound
                .ok_or_else(|| fail(format!("{} mu={}: no bound", cell.example, cell.mu)))?;
            let model = model_by_name(&cell.example)
                .ok_or_else(|| fail(format!("unknown example {}", cell.example)))?;
            let (h, k) = match cell.kind {
                SearchKind::MaxDelay => (bound, cell.fixed),
                SearchKind::MaxRate => (cell.fixed, bound),
            };
            let decision = probe_point(&model, h, cell.mu, k, &FeasibilityOptions::default())?;
            if decision.status != ProbeStatus::Feasible {
                return Err(fail(format!(
                    "{} mu={}: reported bound {bound:.6} does not re-probe feasible ({:?})",
                    cell.example, cell.mu, decision.status
                )));
            }
            let margin = decision.margin.unwrap_or(f64::NAN);
            let slack = decision.certified_slack.ok_or_else(|| {
                fail(format!(
                    "{} mu={}: re-probed bound carries no witness certification",
                    cell.example, cell.mu
                ))
            })?;
            if slack < margin - 1e-6 {
                return Err(fail(format!(
                    "{} mu={}: re-probed witness slack {slack:.3e} below margin {margin:.3e} - 1e-6",
                    cell.example, cell.mu
                )));
            }
            reprobed += 1;
        }
    }
    Ok(format!(
        "{recorded} recorded feasible probes and {reprobed} re-probed optima all carry witnesses \
         with independent eigensolver slack >= margin - 1e-6"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 9: trajectory cross-checks of the certificates
// ---------------------------------------------------------------------------

fn c09_simulation_consistency() -> Outcome {
    // Certified point: example1 at (h = 1, mu = 0, k = 1).
    let model = example1();
    let (h, mu, k) = (1.0, 0.0, 1.0);
    let params = AnalysisParams::new(h, mu, k)?;
    let coeffs = compute_coefficients(
        Interval::new(0.0, h, k)?,
        DEFAULT_QUAD_TOL,
        default_root_tol(h),
    )?;
    let system = build_theorem_lmis(&model, &params, &coeffs)?;
    let report = solve_feasibility(&system, &FeasibilityOptions::default())?;
    if report.verdict != Verdict::Feasible {
        return Err(fail(format!(
            "(h=1, mu=0, k=1) should certify, solver said {:?}",
            report.verdict
        )));
    }
    let cert = certify(&system, &report.values)?;
    if cert.min_slack <= 0.0 {
        return Err(fail(format!(
            "witness failed independent certification (min slack {:.3e})",
            cert.min_slack
        )));
    }
    let witness = ValuedRegistry::new(system.registry.clone(), report.values.clone())?;
    let envelope = compute_overshoot(&witness, &model, &params)?;

    let z0 = DVector::from_vec(vec![1.0, -1.0]);
    let traj = simulate(&model, DelayFunction::constant(h)?, &z0, 30.0, 1e-3)?;
    let check = check_envelope(&traj, envelope.h_factor, k);
    if !check.passed() {
        return Err(fail(format!(
            "envelope H = {:.4} violated at {} samples (worst ratio {:.3})",
            envelope.h_factor,
            check.violation_times.len(),
            check.worst_ratio
        )));
    }
    let k_est = estimate_decay_rate(&traj, (5.0, 30.0))?;
    if k_est < k - 0.05 {
        return Err(fail(format!(
            "fitted decay rate {k_est:.4} below k - 0.05 = {:.2}",
            k - 0.05
        )));
    }

    // The published trajectory scenarios must decay monotonically (window
    // maxima over one delay period) after t = 5.
    let mut names = Vec::new();
    for scenario in trajectory_scenarios() {
        let delay = DelayFunction::new(
            scenario.delay_center,
            scenario.delay_amplitude,
            scenario.delay_frequency,
        )?;
        let z0 = DVector::from_vec(scenario.initial_state.clone());
        let traj = simulate(&scenario.model, delay, &z0, 30.0, 1e-3)?;
        if !decays_monotonically(&traj, 5.0) {
            return Err(fail(format!(
                "{}: window maxima do not strictly decrease after t = 5",
                scenario.name
            )));
        }
        names.push(scenario.name);
    }
    Ok(format!(
        "envelope H = {:.2} holds (worst ratio {:.3}), fitted rate {:.3} >= 0.95; {} decay \
         monotonically after t = 5",
        envelope.h_factor,
        check.worst_ratio,
        k_est,
        names.join(" and ")
    ))
}

// ---------------------------------------------------------------------------
// Criterion 10: μ-monotonicity and post-scan guards
// ---------------------------------------------------------------------------

fn c10_monotonicity() -> Outcome {
    let mut scanned = 0usize;
    for idx in 0..3 {
        let (result, _) = table(idx);
        match result.monotone_in_mu {
            Some(true) => {}
            Some(false) => {
                return Err(fail(format!(
                    "{}: bounds do not strictly decrease in mu",
                    result.name
                )));
            }
            None => {
                return Err(fail(format!(
                    "{}: monotonicity not assessable (a cell failed)",
                    result.name
                )));
            }
        }
        for cell in &result.cells {
            if cell.post_scan_violations > 0 {
                return Err(fail(format!(
                    "{} mu={}: {} feasible post-scan points above the reported bound",
                    cell.example, cell.mu, cell.post_scan_violations
                )));
            }
            scanned += cell.post_scan.len();
        }
    }
    Ok(format!(
        "bounds strictly decrease in mu in all three tables; all {scanned} post-scan probes \
         above the bounds are infeasible"
    ))
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("published rate table (example1, h = 1)", c01_rate_table),
        (
            "published delay table (example2, k = 1e-6)",
            c02_delay_table_four_neurons,
        ),
        (
            "published delay table (example3, k = 1e-6)",
            c03_delay_table_singular_coupling,
        ),
        ("decision-variable count", c04_decision_count),
        ("randomized inequality suite", c05_inequality_suite),
        ("flat-weight limits", c06_flat_weight_limits),
        ("dual-path LMI evaluation", c07_dual_path),
        ("certification soundness", c08_certification_soundness),
        ("simulation consistency", c09_simulation_consistency),
        ("monotonicity and post-scan", c10_monotonicity),
    ];

    let mut failures = 0usize;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let number = idx + 1;
        match catch_unwind(AssertUnwindSafe(|| check())) {
            Ok(Ok(detail)) => println!("PASS {number:>2} {name}: {detail}"),
            Ok(Err(e)) => {
                failures += 1;
                println!("FAIL {number:>2} {name}: {e}");
            }
            Err(payload) => {
                failures += 1;
                println!(
                    "FAIL {number:>2} {name}: panicked: {}",
                    panic_text(payload.as_ref())
                );
            }
        }
    }

    if failures > 0 {
        println!("{failures} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
