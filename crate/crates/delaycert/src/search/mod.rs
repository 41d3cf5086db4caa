//! Bisection searches for admissible-rate/delay boundaries and table
//! reproduction.
//!
//! # Background
//!
//! The published evaluation reports, per network and delay-derivative bound
//! `μ`, either the largest exponential rate `k*` at a fixed delay bound
//! (Example 1, `h = 1`) or the largest delay bound `h*` at a fixed rate
//! (Examples 2–3, `k = 10⁻⁶`).  Both are computed here by bisection on the
//! margin verdict: each probe recomputes the weighted-basis coefficients on
//! `[0, h]`, rebuilds the LMI system, and solves the margin problem.
//!
//! Feasibility is *assumed* monotone in the searched parameter (standard for
//! delay LMIs, unproven): the bisection keeps the invariant that `lo` is
//! feasible and `hi` is not, and a mandatory post-scan of 10 equispaced
//! points above each reported boundary guards against false boundaries.
//!
//! # Implementation
//!
//! * Probes that end in a solver numerical failure are retried once at a
//!   shrunken step (midpoint moved halfway toward the feasible side); a
//!   second failure marks the point indeterminate.
//! * Indeterminate probes count as infeasible for bracket maintenance (the
//!   conservative side) but are logged; more than three in one search flags
//!   the result as low-confidence.
//! * The reported optimum is the *feasible* end of the final bracket, so the
//!   returned value always carries a certificate.
//! * Table reproduction grades every cell against the published value:
//!   within ±1% (`WithinTolerance`), else bracketed by feasibility at
//!   `0.97·published` and infeasibility at `1.05·published` (`Bracketed`),
//!   else `Discrepancy` — reported with the probe margins, never silently
//!   dropped.  Cells run in parallel; each bisection is sequential by
//!   nature.
//!
//! # Assumptions
//!
//! * Default brackets cover all published values with slack: delay searches
//!   start from `(0.1, 12)` (widened geometrically up to 64 if the upper end
//!   is still feasible), rate searches from `(10⁻⁶, 0.999·min_i c_i)` (the
//!   criterion's own ceiling — a feasible upper end saturates instead of
//!   widening).
//! * The tolerance default `10⁻⁴` matches the published 4-decimal tables.

pub mod reproduce;

use serde::Serialize;

use crate::inequality::{
    compute_coefficients, default_root_tol, InequalityError, Interval, DEFAULT_QUAD_TOL,
};
use crate::lmi::{build_theorem_lmis_with, AnalysisParams, AssemblyOptions, LmiError, NetworkModel};
use crate::presets::SearchKind;
use crate::sdp::{certify, solve_feasibility, FeasibilityOptions, SdpError, Verdict};

pub use reproduce::{
    reproduce_all, reproduce_table, write_csv, write_manifest, write_report, AlternateReading,
    CellGrade, CellResult, ReproduceOptions, ReproductionReport, TableResult,
};

/// Delay-search bracket (lower, upper) in time units.
pub const DEFAULT_DELAY_BRACKET: (f64, f64) = (0.1, 12.0);
/// Hard cap for widening a delay bracket whose upper end is feasible.
pub const DELAY_BRACKET_CAP: f64 = 64.0;
/// Lower end of rate searches.
pub const DEFAULT_RATE_FLOOR: f64 = 1e-6;
/// Rate searches stop short of the criterion's ceiling `min_i c_i` by this
/// factor.
pub const RATE_CEILING_FACTOR: f64 = 0.999;
/// Bracket width at which a search stops (matches 4-decimal reporting).
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("no certificate even at the bracket's lower end {parameter} (margin {margin:.3e}); the model/parameter combination looks wrong")]
    InfeasibleAtLo { parameter: f64, margin: f64 },
    #[error("invalid bracket: {detail}")]
    BracketInvalid { detail: String },
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Lmi(#[from] LmiError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// How one parameter spec resolves (mode + the parameter held fixed).
#[derive(Debug, Clone, Copy)]
pub struct SearchSpec {
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub max_iters: usize,
    pub feasibility: FeasibilityOptions,
    pub assembly: AssemblyOptions,
}

impl SearchSpec {
    /// Defaults for a delay search.
    pub fn for_delay() -> Self {
        Self {
            bracket: DEFAULT_DELAY_BRACKET,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: 64,
            feasibility: FeasibilityOptions::default(),
            assembly: AssemblyOptions::default(),
        }
    }

    /// Defaults for a rate search on `model` (ceiling `0.999·min_i c_i`).
    pub fn for_rate(model: &NetworkModel) -> Self {
        Self {
            bracket: (DEFAULT_RATE_FLOOR, RATE_CEILING_FACTOR * model.c_min()),
            tolerance: DEFAULT_TOLERANCE,
            max_iters: 64,
            feasibility: FeasibilityOptions::default(),
            assembly: AssemblyOptions::default(),
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        let (lo, hi) = self.bracket;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(SearchError::BracketInvalid {
                detail: format!("need 0 < lo < hi, got ({lo}, {hi})"),
            });
        }
        if self.tolerance <= 0.0 {
            return Err(SearchError::BracketInvalid {
                detail: format!("tolerance {} must be positive", self.tolerance),
            });
        }
        Ok(())
    }
}

/// Verdict of a single probe as the bisection saw it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeStatus {
    Feasible,
    Infeasible,
    /// Margin within the trust threshold of zero.
    Indeterminate,
    /// Solver numerical failure (after the retry).
    Failed,
}

/// One bisection probe: the parameter value tried and what came back.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeRecord {
    pub parameter: f64,
    pub status: ProbeStatus,
    pub margin: Option<f64>,
    /// Independent dense-eigensolver slack of the witness; present on every
    /// feasible probe (a feasible verdict is only reported once its witness
    /// certifies).
    pub certified_slack: Option<f64>,
}

/// Feasibility decision at one analysis point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointDecision {
    pub status: ProbeStatus,
    pub margin: Option<f64>,
    /// See [`ProbeRecord::certified_slack`].
    pub certified_slack: Option<f64>,
}

/// A feasible witness must re-certify to within this slack of the solver's
/// margin; otherwise the verdict is downgraded to indeterminate.
pub const CERTIFICATION_SLACK_TOL: f64 = 1e-6;

/// Result of one search.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    /// The feasible end of the final bracket (carries a certificate).
    pub optimum: f64,
    pub iterations: usize,
    pub probes: Vec<ProbeRecord>,
    pub indeterminate_count: usize,
    /// More than three indeterminate/failed probes.
    pub low_confidence: bool,
    /// The upper end had to be widened before bisection could start.
    pub widened: bool,
    /// The optimum is pinned at the bracket's ceiling (rate searches cannot
    /// widen past `min_i c_i`; delay searches cap at 64).
    pub saturated: bool,
}

/// Decides feasibility at one `(h, μ, k)` point, mapping solver numerical
/// failures to a probe status instead of an error.
pub fn probe_point(
    model: &NetworkModel,
    h: f64,
    mu: f64,
    k: f64,
    feasibility: &FeasibilityOptions,
) -> Result<PointDecision, SearchError> {
    probe_point_with(model, h, mu, k, AssemblyOptions::default(), feasibility)
}

/// As [`probe_point`] with explicit alternate-reading options.
///
/// A `Feasible` verdict is reported only after the witness passes the
/// independent dense eigenvalue certification with slack at least
/// `margin − `[`CERTIFICATION_SLACK_TOL`]; a witness that fails downgrades
/// the point to `Indeterminate` (conservative for bracket maintenance).
pub fn probe_point_with(
    model: &NetworkModel,
    h: f64,
    mu: f64,
    k: f64,
    assembly: AssemblyOptions,
    feasibility: &FeasibilityOptions,
) -> Result<PointDecision, SearchError> {
    let params = AnalysisParams::new(h, mu, k)?;
    let coeffs = compute_coefficients(
        Interval::new(0.0, h, k)?,
        DEFAULT_QUAD_TOL,
        default_root_tol(h),
    )?;
    let system = build_theorem_lmis_with(model, &params, &coeffs, assembly)?;
    match solve_feasibility(&system, feasibility) {
        Ok(report) => {
            let status = match report.verdict {
                Verdict::Feasible => ProbeStatus::Feasible,
                Verdict::Infeasible => ProbeStatus::Infeasible,
                Verdict::Indeterminate => ProbeStatus::Indeterminate,
            };
            if status != ProbeStatus::Feasible {
                return Ok(PointDecision {
                    status,
                    margin: Some(report.margin),
                    certified_slack: None,
                });
            }
            let cert = certify(&system, &report.values)?;
            if cert.min_slack >= report.margin - CERTIFICATION_SLACK_TOL {
                Ok(PointDecision {
                    status,
                    margin: Some(report.margin),
                    certified_slack: Some(cert.min_slack),
                })
            } else {
                Ok(PointDecision {
                    status: ProbeStatus::Indeterminate,
                    margin: Some(report.margin),
                    certified_slack: Some(cert.min_slack),
                })
            }
        }
        Err(SdpError::NumericalFailure { .. }) => Ok(PointDecision {
            status: ProbeStatus::Failed,
            margin: None,
            certified_slack: None,
        }),
        Err(e) => Err(e.into()),
    }
}

struct Driver<'a> {
    model: &'a NetworkModel,
    kind: SearchKind,
    fixed: f64,
    mu: f64,
    feasibility: FeasibilityOptions,
    assembly: AssemblyOptions,
    probes: Vec<ProbeRecord>,
}

impl Driver<'_> {
    fn probe(&mut self, parameter: f64) -> Result<ProbeStatus, SearchError> {
        let (h, k) = match self.kind {
            SearchKind::MaxDelay => (parameter, self.fixed),
            SearchKind::MaxRate => (self.fixed, parameter),
        };
        let decision =
            probe_point_with(self.model, h, self.mu, k, self.assembly, &self.feasibility)?;
        self.probes.push(ProbeRecord {
            parameter,
            status: decision.status,
            margin: decision.margin,
            certified_slack: decision.certified_slack,
        });
        Ok(decision.status)
    }
}

/// Maximal admissible delay bound `h*` at fixed `(μ, k)`.
pub fn max_delay(
    model: &NetworkModel,
    mu: f64,
    k: f64,
    spec: &SearchSpec,
) -> Result<SearchResult, SearchError> {
    run_search(model, SearchKind::MaxDelay, k, mu, spec, Some(DELAY_BRACKET_CAP))
}

/// Maximal admissible exponential rate `k*` at fixed `(h, μ)`.
pub fn max_rate(
    model: &NetworkModel,
    h: f64,
    mu: f64,
    spec: &SearchSpec,
) -> Result<SearchResult, SearchError> {
    if spec.bracket.1 >= model.c_min() {
        return Err(SearchError::BracketInvalid {
            detail: format!(
                "rate bracket upper end {} must stay below min_i c_i = {}",
                spec.bracket.1,
                model.c_min()
            ),
        });
    }
    run_search(model, SearchKind::MaxRate, h, mu, spec, None)
}

fn run_search(
    model: &NetworkModel,
    kind: SearchKind,
    fixed: f64,
    mu: f64,
    spec: &SearchSpec,
    widen_cap: Option<f64>,
) -> Result<SearchResult, SearchError> {
    spec.validate()?;
    let mut driver = Driver {
        model,
        kind,
        fixed,
        mu,
        feasibility: spec.feasibility,
        assembly: spec.assembly,
        probes: Vec::new(),
    };
    let (mut lo, mut hi) = spec.bracket;
    let mut widened = false;
    let mut saturated = false;

    // Pre-checks: certificate at lo, no certificate at hi (widen if allowed).
    match driver.probe(lo)? {
        ProbeStatus::Feasible => {}
        _ => {
            let margin = driver.probes.last().and_then(|p| p.margin).unwrap_or(f64::NAN);
            return Err(SearchError::InfeasibleAtLo {
                parameter: lo,
                margin,
            });
        }
    }
    loop {
        match driver.probe(hi)? {
            ProbeStatus::Feasible => match widen_cap {
                Some(cap) if hi < cap => {
                    lo = hi;
                    hi = (hi * 1.5).min(cap);
                    widened = true;
                }
                _ => {
                    // Cannot widen (rate ceiling / cap reached): the boundary
                    // is at or beyond the bracket's end.
                    saturated = true;
                    hi = driver.probes.last().expect("probe pushed").parameter;
                    lo = hi;
                    break;
                }
            },
            _ => break,
        }
    }

    let mut indeterminate = 0usize;
    let mut iterations = 0usize;
    if !saturated {
        while hi - lo > spec.tolerance && iterations < spec.max_iters {
            iterations += 1;
            let mut mid = 0.5 * (lo + hi);
            let mut status = driver.probe(mid)?;
            if status == ProbeStatus::Failed {
                // Shrink the step toward the feasible side, retry once.
                mid = lo + 0.25 * (hi - lo);
                status = driver.probe(mid)?;
                if status == ProbeStatus::Failed {
                    status = ProbeStatus::Indeterminate;
                }
            }
            match status {
                ProbeStatus::Feasible => lo = mid,
                ProbeStatus::Infeasible => hi = mid,
                ProbeStatus::Indeterminate | ProbeStatus::Failed => {
                    indeterminate += 1;
                    hi = mid;
                }
            }
        }
    }

    Ok(SearchResult {
        optimum: lo,
        iterations,
        indeterminate_count: indeterminate,
        low_confidence: indeterminate > 3,
        widened,
        saturated,
        probes: driver.probes,
    })
}

/// Post-hoc monotonicity guard: probes `count` equispaced points in
/// `(bound, bound + span]` (delay searches) or up to the rate ceiling (rate
/// searches) and reports each verdict.  A feasible point above a reported
/// boundary falsifies the bisection's monotonicity assumption.
pub fn post_scan(
    model: &NetworkModel,
    kind: SearchKind,
    fixed: f64,
    mu: f64,
    bound: f64,
    count: usize,
    span: f64,
    spec: &SearchSpec,
) -> Result<Vec<ProbeRecord>, SearchError> {
    let upper = match kind {
        SearchKind::MaxDelay => bound + span,
        SearchKind::MaxRate => (bound + span).min(RATE_CEILING_FACTOR * model.c_min()),
    };
    let mut driver = Driver {
        model,
        kind,
        fixed,
        mu,
        feasibility: spec.feasibility,
        assembly: spec.assembly,
        probes: Vec::new(),
    };
    for i in 1..=count {
        let p = bound + (upper - bound) * (i as f64) / (count as f64);
        if p <= bound {
            continue;
        }
        driver.probe(p)?;
    }
    Ok(driver.probes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{example1, example3};

    fn quick_spec(bracket: (f64, f64), tol: f64) -> SearchSpec {
        SearchSpec {
            bracket,
            tolerance: tol,
            max_iters: 64,
            feasibility: FeasibilityOptions::default(),
            assembly: AssemblyOptions::default(),
        }
    }

    #[test]
    fn rate_search_brackets_the_two_neuron_boundary() {
        let model = example1();
        let spec = quick_spec((0.5, 1.9), 0.02);
        let result = max_rate(&model, 1.0, 0.0, &spec).unwrap();
        assert!(
            result.optimum > 1.1 && result.optimum < 1.3,
            "boundary {} outside the expected band",
            result.optimum
        );
        assert!(!result.saturated && !result.widened);
        assert!(result.iterations > 0);
        // Bracket invariant left a feasible certificate at the optimum.
        let last_feasible = result
            .probes
            .iter()
            .filter(|p| p.status == ProbeStatus::Feasible)
            .map(|p| p.parameter)
            .fold(f64::MIN, f64::max);
        assert_eq!(last_feasible, result.optimum);
    }

    #[test]
    fn rate_bracket_above_ceiling_is_rejected() {
        let model = example1(); // min c_i = 2
        let spec = quick_spec((0.5, 2.5), 0.02);
        assert!(matches!(
            max_rate(&model, 1.0, 0.0, &spec),
            Err(SearchError::BracketInvalid { .. })
        ));
    }

    #[test]
    fn infeasible_lower_end_is_an_error() {
        let model = example3();
        let spec = quick_spec((5.0, 12.0), 0.02);
        assert!(matches!(
            max_delay(&model, 0.9, 1e-6, &spec),
            Err(SearchError::InfeasibleAtLo { .. })
        ));
    }

    #[test]
    fn feasible_upper_end_widens_then_converges() {
        let model = example3();
        // Boundary for mu = 0.9 sits near 2.2; start with both ends feasible.
        let spec = quick_spec((0.1, 0.3), 0.02);
        let result = max_delay(&model, 0.9, 1e-6, &spec).unwrap();
        assert!(result.widened);
        assert!(!result.saturated);
        assert!(
            result.optimum > 1.9 && result.optimum < 2.5,
            "boundary {} outside the expected band",
            result.optimum
        );

        // Nothing feasible above the boundary.
        let scan = post_scan(
            &model,
            SearchKind::MaxDelay,
            1e-6,
            0.9,
            result.optimum,
            5,
            0.5,
            &spec,
        )
        .unwrap();
        assert_eq!(scan.len(), 5);
        assert!(scan.iter().all(|p| p.status != ProbeStatus::Feasible));
    }

    #[test]
    fn bad_brackets_are_rejected() {
        let model = example1();
        let spec = quick_spec((1.0, 0.5), 0.02);
        assert!(matches!(
            max_delay(&model, 0.0, 1e-6, &spec),
            Err(SearchError::BracketInvalid { .. })
        ));
        let spec = quick_spec((0.0, 0.5), 0.02);
        assert!(matches!(
            max_delay(&model, 0.0, 1e-6, &spec),
            Err(SearchError::BracketInvalid { .. })
        ));
    }
}
