//! Command-line front end for analysis, search, reproduction, simulation,
//! and inequality verification.
//!
//! # Background
//!
//! Every capability of the library is reachable through one subcommand with
//! file-based, reproducible inputs and outputs:
//!
//! * `analyze` — decide feasibility at one `(h, μ, k)` point and emit a JSON
//!   report with the margin, the independent eigensolver certification, and
//!   the decay envelope `(H, Λ)`;
//! * `search` — bisect for the maximal admissible delay or rate;
//! * `reproduce` — re-derive the published benchmark tables with deviations
//!   against the embedded reference values;
//! * `simulate` — integrate the delayed dynamics and write a plot-ready CSV;
//! * `verify-inequalities` — run the seeded randomized soundness suite for
//!   the integral inequalities.
//!
//! # Implementation
//!
//! Inputs come from flags, an optional JSON run configuration
//! ([`RunConfig`]: named preset or explicit row-major matrices with a
//! dimension field), and the `DELAYCERT_OUT_DIR` environment variable for
//! the output directory (precedence: flag, then environment, then config,
//! then the working directory).  The configuration is schema-validated
//! before any computation; violations are reported with their field path
//! and exit code 64.  Outputs are computed fully before anything is
//! written, so no subcommand leaves partial outputs behind on error, and
//! identical inputs produce byte-identical files (the single exception is
//! the reproduction manifest's timestamp field).
//!
//! Exit codes: `0` for a positive answer (feasible / search converged /
//! suite clean), `1` for a certified negative answer (infeasible point,
//! infeasible lower bracket end, suite violations), `2` for numerical
//! failures or runtime errors, `64` for malformed configuration.  Errors
//! are mirrored as one-line JSON objects on stderr for machine consumption.
//!
//! # Assumptions
//!
//! * No network access and no interactive prompts; everything is decided by
//!   the argument list, the config file, and the environment variable.
//! * `reproduce` may run cells concurrently (`--jobs`); all other commands
//!   are single-job.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::inequality::{
    compute_coefficients, default_root_tol, verify, Interval, DEFAULT_QUAD_TOL,
};
use crate::lmi::{
    build_theorem_lmis, compute_overshoot, AnalysisParams, NetworkModel, ValuedRegistry,
};
use crate::presets::{benchmarks, model_by_name, trajectory_scenarios, TABLE_RATE};
use crate::search::{
    max_delay, max_rate, reproduce_all, write_csv, write_manifest, write_report,
    ReproduceOptions, SearchError, SearchResult, SearchSpec,
};
use crate::sdp::{certify, solve_feasibility, FeasibilityOptions, Verdict};
use crate::sim::{self, DelayFunction};

/// Environment variable overriding the output directory when `--out` is not
/// given.
pub const OUT_DIR_ENV: &str = "DELAYCERT_OUT_DIR";

const EXIT_OK: i32 = 0;
const EXIT_NEGATIVE: i32 = 1;
const EXIT_NUMERICAL: i32 = 2;
const EXIT_CONFIG: i32 = 64;

/// A failure with an exit-code class and a machine-readable rendering.
#[derive(Debug)]
enum Failure {
    /// Malformed or inconsistent configuration (exit 64), with the offending
    /// field path when one is known.
    Config { path: Option<String>, detail: String },
    /// Runtime or numerical failure (exit 2); `code` names the stage.
    Runtime { code: &'static str, detail: String },
}

impl Failure {
    fn config(path: &str, detail: impl Into<String>) -> Self {
        Failure::Config {
            path: Some(path.to_string()),
            detail: detail.into(),
        }
    }

    fn runtime(code: &'static str, detail: impl std::fmt::Display) -> Self {
        Failure::Runtime {
            code,
            detail: detail.to_string(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config { .. } => EXIT_CONFIG,
            Failure::Runtime { .. } => EXIT_NUMERICAL,
        }
    }

    /// One-line JSON error object on stderr.
    fn emit(&self) {
        let obj = match self {
            Failure::Config { path, detail } => {
                json!({"error": {"code": "config", "path": path, "detail": detail}})
            }
            Failure::Runtime { code, detail } => {
                json!({"error": {"code": code, "detail": detail}})
            }
        };
        eprintln!("{obj}");
    }
}

#[derive(Parser)]
#[command(
    name = "delaycert",
    version,
    about = "Exponential-stability certification for time-delay neural networks",
    long_about = "Decides exponential stability of delayed neural networks via a \
                  weighted-integral-inequality LMI criterion, searches for maximal \
                  admissible delays and rates, reproduces the published benchmark \
                  tables, and cross-checks certificates against simulated trajectories."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility at one (h, mu, k) point and write a JSON report.
    Analyze(AnalyzeArgs),
    /// Bisect for the maximal admissible delay or exponential rate.
    Search(SearchArgs),
    /// Re-derive the published benchmark tables (CSV + manifest + report).
    Reproduce(ReproduceArgs),
    /// Integrate the delayed dynamics and write a plot-ready trajectory CSV.
    Simulate(SimulateArgs),
    /// Run the seeded randomized soundness suite for the integral bounds.
    VerifyInequalities(VerifyArgs),
}

/// Where the network model comes from.
#[derive(Args, Debug)]
struct ConfigSource {
    /// Named benchmark network: example1 | example2 | example3.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// JSON run configuration file (see RunConfig).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Delay bound h (overrides config params.h).
    #[arg(long)]
    h: Option<f64>,
    /// Delay-derivative bound mu in [0, 1) (default 0).
    #[arg(long)]
    mu: Option<f64>,
    /// Exponential rate k to certify (overrides config params.k).
    #[arg(long)]
    k: Option<f64>,
    /// Output directory for analysis.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Search direction, on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    /// Maximal admissible exponential rate k* at fixed (h, mu).
    Rate,
    /// Maximal admissible delay h* at fixed (k, mu).
    Delay,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// What to maximize (overrides config search.kind).
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Fixed delay bound h for a rate search.
    #[arg(long)]
    h: Option<f64>,
    /// Fixed exponential rate k for a delay search (default 1e-6).
    #[arg(long)]
    k: Option<f64>,
    /// Delay-derivative bound mu in [0, 1).
    #[arg(long)]
    mu: Option<f64>,
    /// Initial bracket as "LO,HI" (defaults depend on the search kind).
    #[arg(long, value_name = "LO,HI")]
    bracket: Option<String>,
    /// Bisection tolerance on the parameter (default 1e-4).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output directory for search.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Which table to reproduce: 1 | 2 | 3 (or example1 | example2 |
    /// example3). All three when omitted.
    example: Option<String>,
    /// Concurrent cells (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Bisection tolerance on the searched parameter (default 1e-4).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output directory for table.csv, manifest.json, report.md.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Initial state as comma-separated floats, e.g. "-1,1".
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    z0: Option<String>,
    /// Final time (default 30).
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Step size (default 1e-3).
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory for the trajectory CSV and JSON sidecar.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Seed for the deterministic generator (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Random trials per inequality (default 1000).
    #[arg(long)]
    count: Option<usize>,
    /// JSON run configuration file (seed / count / output_dir fields).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory for inequality_suite.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Run configuration (JSON)
// ---------------------------------------------------------------------------

/// Schema of the JSON run configuration.  Every section is optional; flags
/// override file values.  Unknown fields are rejected so typos surface as
/// configuration errors with their field path rather than being ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Named benchmark network (alternative to `model`).
    preset: Option<String>,
    /// Explicit network matrices, row-major, with a dimension field.
    model: Option<ModelConfig>,
    /// Fixed analysis point for `analyze`.
    params: Option<ParamsConfig>,
    /// Time-varying delay `h(t) = h0 + amplitude·sin(frequency·t)` for
    /// `simulate`.
    delay: Option<DelayConfig>,
    /// Search direction, fixed parameter, bracket, and tolerance.
    search: Option<SearchConfig>,
    /// Initial state and integration grid for `simulate`.
    simulation: Option<SimulationConfig>,
    /// SDP margin-solve knobs.
    solver: Option<SolverConfig>,
    /// Adaptive-quadrature tolerance for the basis coefficients in
    /// `analyze`.
    quadrature: Option<QuadratureConfig>,
    /// Output directory (lowest precedence; see `OUT_DIR_ENV`).
    output_dir: Option<PathBuf>,
    /// Seed for `verify-inequalities`.
    seed: Option<u64>,
    /// Trial count for `verify-inequalities`.
    count: Option<usize>,
}

/// Explicit network model: `ż = −C z + A·L tanh(z) + B·L tanh(z(t−h(t)))`
/// with diagonal `C` (rates) and `L` (activation slopes).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelConfig {
    /// State dimension.
    n: usize,
    /// `A`, row-major, n² entries.
    a: Vec<f64>,
    /// `B`, row-major, n² entries.
    b: Vec<f64>,
    /// Diagonal of `C`, n entries, all positive.
    c: Vec<f64>,
    /// Activation slope bounds, n entries.
    l: Vec<f64>,
}

impl ModelConfig {
    fn to_model(&self) -> Result<NetworkModel, Failure> {
        let n = self.n;
        if n == 0 {
            return Err(Failure::config("model.n", "dimension must be positive"));
        }
        let expect = |field: &str, len: usize, want: usize| -> Result<(), Failure> {
            if len == want {
                Ok(())
            } else {
                Err(Failure::config(
                    &format!("model.{field}"),
                    format!("expected {want} entries for n = {n}, got {len}"),
                ))
            }
        };
        expect("a", self.a.len(), n * n)?;
        expect("b", self.b.len(), n * n)?;
        expect("c", self.c.len(), n)?;
        expect("l", self.l.len(), n)?;
        NetworkModel::new(
            DMatrix::from_row_slice(n, n, &self.a),
            DMatrix::from_row_slice(n, n, &self.b),
            DVector::from_column_slice(&self.c),
            DVector::from_column_slice(&self.l),
        )
        .map_err(|e| Failure::config("model", e.to_string()))
    }
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsConfig {
    h: Option<f64>,
    mu: Option<f64>,
    k: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct DelayConfig {
    h0: f64,
    #[serde(default)]
    amplitude: f64,
    #[serde(default = "one")]
    frequency: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchConfig {
    kind: Option<KindArg>,
    mu: Option<f64>,
    /// Fixed h for a rate search / fixed k for a delay search.
    fixed: Option<f64>,
    bracket: Option<[f64; 2]>,
    tolerance: Option<f64>,
    max_iters: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationConfig {
    z0: Option<Vec<f64>>,
    t_end: Option<f64>,
    dt: Option<f64>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverConfig {
    margin_threshold: Option<f64>,
    max_iter: Option<u32>,
    time_limit: Option<f64>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureConfig {
    tolerance: Option<f64>,
}

/// Reads and schema-validates the config file, then lets the `--preset`
/// flag override its `preset` field.
fn load_config(preset: Option<&str>, path: Option<&Path>) -> Result<RunConfig, Failure> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config {
                path: None,
                detail: format!("cannot read {}: {e}", p.display()),
            })?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            serde_path_to_error::deserialize(de).map_err(|e| Failure::Config {
                path: Some(e.path().to_string()),
                detail: e.inner().to_string(),
            })?
        }
        None => RunConfig::default(),
    };
    if let Some(name) = preset {
        cfg.preset = Some(name.to_string());
    }
    Ok(cfg)
}

/// Model named by the preset, or built from the explicit matrices.
fn resolve_model(cfg: &RunConfig) -> Result<(String, NetworkModel), Failure> {
    if let Some(name) = &cfg.preset {
        let model = model_by_name(name).ok_or_else(|| {
            Failure::config(
                "preset",
                format!("unknown preset {name:?} (expected example1 | example2 | example3)"),
            )
        })?;
        return Ok((name.clone(), model));
    }
    if let Some(mc) = &cfg.model {
        return Ok(("custom".to_string(), mc.to_model()?));
    }
    Err(Failure::config(
        "model",
        "no network given: pass --preset or provide a model block in the config",
    ))
}

fn feasibility_options(cfg: &RunConfig) -> FeasibilityOptions {
    let mut opts = FeasibilityOptions::default();
    if let Some(s) = cfg.solver {
        if let Some(v) = s.margin_threshold {
            opts.margin_threshold = v;
        }
        if let Some(v) = s.max_iter {
            opts.max_iter = v;
        }
        if s.time_limit.is_some() {
            opts.time_limit = s.time_limit;
        }
    }
    opts
}

/// Output directory: flag, then `DELAYCERT_OUT_DIR`, then config, then `.`;
/// created if missing.
fn resolve_out_dir(flag: Option<&Path>, cfg: Option<&Path>) -> Result<PathBuf, Failure> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::runtime("io", format!("create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Writes through a sibling temp file + rename so a failed write never
/// leaves a truncated output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::runtime("io", format!("{}: {e}", path.display()));
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn parse_bracket(text: &str) -> Result<(f64, f64), Failure> {
    let mut parts = text.split(',').map(str::trim);
    let bad = || Failure::config("bracket", format!("expected \"LO,HI\", got {text:?}"));
    let lo: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let hi: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_z0(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .map(|s| {
            s.parse::<f64>().map_err(|_| {
                Failure::config("z0", format!("component {s:?} is not a number"))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CertificationOut {
    min_slack: f64,
    normalization: f64,
}

#[derive(Serialize)]
struct EnvelopeOut {
    /// Envelope factor `H` in `‖z(t)‖ ≤ H‖φ‖e^{−kt}`.
    h_factor: f64,
    /// Initial-condition bound `Λ` of the functional.
    lambda: f64,
    /// Smallest eigenvalue of the witness `P` (the envelope denominator).
    lambda_min_p: f64,
}

#[derive(Serialize)]
struct AnalyzeOut {
    model: String,
    h: f64,
    mu: f64,
    k: f64,
    verdict: String,
    margin: f64,
    margin_threshold: f64,
    solver_status: String,
    iterations: u32,
    solve_time_s: f64,
    /// Independent dense-eigensolver re-check of the witness (feasible only).
    certification: Option<CertificationOut>,
    /// Decay envelope constants (feasible only).
    envelope: Option<EnvelopeOut>,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, Failure> {
    let cfg = load_config(args.source.preset.as_deref(), args.source.config.as_deref())?;
    let (name, model) = resolve_model(&cfg)?;
    let p = cfg.params.unwrap_or_default();
    let h = args
        .h
        .or(p.h)
        .ok_or_else(|| Failure::config("params.h", "analyze needs the delay bound (--h)"))?;
    let mu = args.mu.or(p.mu).unwrap_or(0.0);
    let k = args
        .k
        .or(p.k)
        .ok_or_else(|| Failure::config("params.k", "analyze needs the rate to certify (--k)"))?;
    let params = AnalysisParams::new(h, mu, k)
        .map_err(|e| Failure::config("params", e.to_string()))?;
    let out_dir = resolve_out_dir(args.out.as_deref(), cfg.output_dir.as_deref())?;

    let quad_tol = cfg
        .quadrature
        .and_then(|q| q.tolerance)
        .unwrap_or(DEFAULT_QUAD_TOL);
    let interval =
        Interval::new(0.0, h, k).map_err(|e| Failure::config("params", e.to_string()))?;
    let coeffs = compute_coefficients(interval, quad_tol, default_root_tol(h))
        .map_err(|e| Failure::runtime("coefficients", e))?;
    let system = build_theorem_lmis(&model, &params, &coeffs)
        .map_err(|e| Failure::runtime("assembly", e))?;
    let opts = feasibility_options(&cfg);
    let report =
        solve_feasibility(&system, &opts).map_err(|e| Failure::runtime("solver", e))?;

    let (certification, envelope) = if report.verdict == Verdict::Feasible {
        let cert =
            certify(&system, &report.values).map_err(|e| Failure::runtime("certification", e))?;
        let witness = ValuedRegistry::new(system.registry.clone(), report.values.clone())
            .map_err(|e| Failure::runtime("certification", e))?;
        let over = compute_overshoot(&witness, &model, &params)
            .map_err(|e| Failure::runtime("envelope", e))?;
        (
            Some(CertificationOut {
                min_slack: cert.min_slack,
                normalization: cert.normalization,
            }),
            Some(EnvelopeOut {
                h_factor: over.h_factor,
                lambda: over.lambda,
                lambda_min_p: over.lambda_min_p,
            }),
        )
    } else {
        (None, None)
    };

    let verdict_name = match report.verdict {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
        Verdict::Indeterminate => "indeterminate",
    };
    let out = AnalyzeOut {
        model: name.clone(),
        h,
        mu,
        k,
        verdict: verdict_name.to_string(),
        margin: report.margin,
        margin_threshold: opts.margin_threshold,
        solver_status: report.solver_status.clone(),
        iterations: report.iterations,
        solve_time_s: report.solve_time,
        certification,
        envelope,
    };
    let path = out_dir.join("analysis.json");
    let body = serde_json::to_string_pretty(&out)
        .map_err(|e| Failure::runtime("io", e))?;
    write_atomic(&path, (body + "\n").as_bytes())?;

    println!(
        "{name} at (h={h}, mu={mu}, k={k}): {verdict_name}   margin {:+.3e}",
        report.margin
    );
    if let Some(env) = &out.envelope {
        println!(
            "decay envelope: ||z(t)|| <= {:.4}·||phi||·e^(-{k}·t)   (Lambda = {:.4})",
            env.h_factor, env.lambda
        );
    }
    println!("report: {}", path.display());
    Ok(match report.verdict {
        Verdict::Feasible => EXIT_OK,
        Verdict::Infeasible => EXIT_NEGATIVE,
        // Within the numerical trust threshold of the boundary: neither side
        // is certified, which is a numerical outcome, not an answer.
        Verdict::Indeterminate => EXIT_NUMERICAL,
    })
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SearchOut {
    model: String,
    kind: String,
    mu: f64,
    /// Fixed h (rate search) or fixed k (delay search).
    fixed: f64,
    bracket: (f64, f64),
    tolerance: f64,
    result: SearchResult,
}

fn cmd_search(args: &SearchArgs) -> Result<i32, Failure> {
    let cfg = load_config(args.source.preset.as_deref(), args.source.config.as_deref())?;
    let (name, model) = resolve_model(&cfg)?;
    let sc = cfg.search.unwrap_or_default();
    let kind = args.kind.or(sc.kind).ok_or_else(|| {
        Failure::config("search.kind", "search needs a direction (--kind rate | delay)")
    })?;
    let mu = args.mu.or(sc.mu).ok_or_else(|| {
        Failure::config("search.mu", "search needs the delay-derivative bound (--mu)")
    })?;
    let out_dir = resolve_out_dir(args.out.as_deref(), cfg.output_dir.as_deref())?;

    let mut spec = match kind {
        KindArg::Rate => SearchSpec::for_rate(&model),
        KindArg::Delay => SearchSpec::for_delay(),
    };
    if let Some(text) = &args.bracket {
        spec.bracket = parse_bracket(text)?;
    } else if let Some([lo, hi]) = sc.bracket {
        spec.bracket = (lo, hi);
    }
    if let Some(t) = args.tolerance.or(sc.tolerance) {
        spec.tolerance = t;
    }
    if let Some(m) = sc.max_iters {
        spec.max_iters = m;
    }
    spec.feasibility = feasibility_options(&cfg);

    let (fixed, kind_name, searched) = match kind {
        KindArg::Rate => {
            let h = args.h.or(sc.fixed).ok_or_else(|| {
                Failure::config("search.fixed", "a rate search needs the fixed delay (--h)")
            })?;
            (h, "max-rate", "k*")
        }
        KindArg::Delay => {
            let k = args.k.or(sc.fixed).unwrap_or(TABLE_RATE);
            (k, "max-delay", "h*")
        }
    };
    let outcome = match kind {
        KindArg::Rate => max_rate(&model, fixed, mu, &spec),
        KindArg::Delay => max_delay(&model, mu, fixed, &spec),
    };
    let result = match outcome {
        Ok(r) => r,
        Err(SearchError::InfeasibleAtLo { parameter, margin }) => {
            println!(
                "{name}: infeasible already at the lower bracket end {parameter} \
                 (margin {margin:+.3e}); no admissible value in the bracket"
            );
            return Ok(EXIT_NEGATIVE);
        }
        Err(SearchError::BracketInvalid { detail }) => {
            return Err(Failure::config("search.bracket", detail));
        }
        Err(e) => return Err(Failure::runtime("search", e)),
    };

    let out = SearchOut {
        model: name.clone(),
        kind: kind_name.to_string(),
        mu,
        fixed,
        bracket: spec.bracket,
        tolerance: spec.tolerance,
        result,
    };
    let path = out_dir.join("search.json");
    let body = serde_json::to_string_pretty(&out)
        .map_err(|e| Failure::runtime("io", e))?;
    write_atomic(&path, (body + "\n").as_bytes())?;

    println!(
        "{name} {kind_name} at mu={mu}: {searched} = {:.6} ({} probes{}{})",
        out.result.optimum,
        out.result.probes.len(),
        if out.result.low_confidence {
            ", low confidence"
        } else {
            ""
        },
        if out.result.saturated { ", saturated" } else { "" },
    );
    println!("result: {}", path.display());
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

fn cmd_reproduce(args: &ReproduceArgs) -> Result<i32, Failure> {
    let mut benches = benchmarks();
    if let Some(which) = &args.example {
        let target = match which.as_str() {
            "1" | "example1" => "example1",
            "2" | "example2" => "example2",
            "3" | "example3" => "example3",
            other => {
                return Err(Failure::config(
                    "example",
                    format!("unknown table {other:?} (expected 1 | 2 | 3)"),
                ));
            }
        };
        benches.retain(|b| b.name == target);
    }
    let out_dir = resolve_out_dir(args.out.as_deref(), None)?;

    let mut opts = ReproduceOptions {
        jobs: args.jobs,
        ..ReproduceOptions::default()
    };
    if let Some(t) = args.tolerance {
        opts.tolerance = t;
    }

    let report = reproduce_all(&benches, &opts);

    let io_err = |e: SearchError| Failure::runtime("io", e);
    write_csv(&report, &out_dir.join("table.csv")).map_err(io_err)?;
    write_manifest(&report, &out_dir.join("manifest.json")).map_err(io_err)?;
    write_report(&report, &out_dir.join("report.md")).map_err(io_err)?;

    let mut errors = 0usize;
    for table in &report.tables {
        for cell in &table.cells {
            let bound = cell
                .bound
                .map(|b| format!("{b:.4}"))
                .unwrap_or_else(|| "—".to_string());
            println!(
                "{} mu={}: bound {} vs published {} [{:?}, {} confidence]",
                cell.example,
                cell.mu,
                bound,
                cell.published,
                cell.grade,
                cell.confidence()
            );
            if cell.error.is_some() {
                errors += 1;
            }
        }
    }
    println!(
        "wrote {}, {}, {}",
        out_dir.join("table.csv").display(),
        out_dir.join("manifest.json").display(),
        out_dir.join("report.md").display()
    );
    Ok(if errors > 0 { EXIT_NUMERICAL } else { EXIT_OK })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, Failure> {
    let cfg = load_config(args.source.preset.as_deref(), args.source.config.as_deref())?;

    // A preset naming a bundled trajectory scenario carries its own delay
    // function and initial state; other presets fall back to the constant
    // delay h = 1 benchmark point unless the config provides a delay block.
    let scenario = cfg
        .preset
        .as_deref()
        .and_then(|name| trajectory_scenarios().into_iter().find(|s| s.name == name));
    let (name, model, default_delay, default_z0) = match scenario {
        Some(s) => {
            let delay = DelayFunction::new(s.delay_center, s.delay_amplitude, s.delay_frequency)
                .map_err(|e| Failure::runtime("simulation", e))?;
            (
                s.name.to_string(),
                s.model,
                delay,
                DVector::from_vec(s.initial_state.clone()),
            )
        }
        None => {
            let (name, model) = resolve_model(&cfg)?;
            let delay = DelayFunction::constant(1.0).expect("constant delay");
            let z0 = DVector::from_fn(model.n(), |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
            (name, model, delay, z0)
        }
    };
    let delay = match cfg.delay {
        Some(d) => DelayFunction::new(d.h0, d.amplitude, d.frequency)
            .map_err(|e| Failure::config("delay", e.to_string()))?,
        None => default_delay,
    };

    let sim_cfg = cfg.simulation.clone().unwrap_or_default();
    let z0 = match &args.z0 {
        Some(text) => DVector::from_vec(parse_z0(text)?),
        None => sim_cfg
            .z0
            .as_ref()
            .map(|v| DVector::from_vec(v.clone()))
            .unwrap_or(default_z0),
    };
    if z0.len() != model.n() {
        return Err(Failure::config(
            "z0",
            format!("expected {} components for this network, got {}", model.n(), z0.len()),
        ));
    }
    let t_end = args.t_end.or(sim_cfg.t_end).unwrap_or(sim::DEFAULT_T_END);
    let dt = args.dt.or(sim_cfg.dt).unwrap_or(sim::DEFAULT_DT);
    let out_dir = resolve_out_dir(args.out.as_deref(), cfg.output_dir.as_deref())?;

    let traj = sim::simulate(&model, delay, &z0, t_end, dt)
        .map_err(|e| Failure::runtime("simulation", e))?;

    let csv_path = out_dir.join(format!("{name}_trajectory.csv"));
    let meta_path = out_dir.join(format!("{name}_trajectory.json"));
    sim::write_trajectory_csv(&traj, &csv_path).map_err(|e| Failure::runtime("io", e))?;
    sim::write_trajectory_meta(&traj, &meta_path).map_err(|e| Failure::runtime("io", e))?;

    println!(
        "{name}: {} samples, ||z({t_end})|| = {:.4e}",
        traj.times.len(),
        traj.final_state().norm()
    );
    let window_start = if t_end > 10.0 { 5.0 } else { 0.5 * t_end };
    match sim::estimate_decay_rate(&traj, (window_start, t_end)) {
        Ok(k_est) => println!("fitted decay rate over [{window_start}, {t_end}]: {k_est:.4}"),
        Err(e) => println!("decay-rate fit unavailable: {e}"),
    }
    println!("wrote {}, {}", csv_path.display(), meta_path.display());
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify-inequalities
// ---------------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<i32, Failure> {
    let cfg = load_config(None, args.config.as_deref())?;
    let seed = args.seed.or(cfg.seed).unwrap_or(7);
    let count = args.count.or(cfg.count).unwrap_or(1000);
    if count == 0 {
        return Err(Failure::config("count", "trial count must be positive"));
    }
    let out_dir = resolve_out_dir(args.out.as_deref(), cfg.output_dir.as_deref())?;

    let report = verify::run_suite(seed, count).map_err(|e| Failure::runtime("inequality", e))?;

    let path = out_dir.join("inequality_suite.json");
    let body = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::runtime("io", e))?;
    write_atomic(&path, (body + "\n").as_bytes())?;

    for lemma in &report.lemmas {
        println!(
            "{}: {} trials, {} violations, worst slack {:+.3e}",
            lemma.name, lemma.trials, lemma.violations, lemma.worst_slack
        );
    }
    println!(
        "seed {seed}: {} violations across {} inequalities",
        report.total_violations(),
        report.lemmas.len()
    );
    println!("report: {}", path.display());
    Ok(if report.passed() { EXIT_OK } else { EXIT_NEGATIVE })
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

/// Parses the process arguments, dispatches, and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Search(args) => cmd_search(args),
        Command::Reproduce(args) => cmd_reproduce(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::VerifyInequalities(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            failure.emit();
            failure.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_and_state_parsing() {
        assert_eq!(parse_bracket("0.1, 12").unwrap(), (0.1, 12.0));
        assert!(parse_bracket("0.1").is_err());
        assert!(parse_bracket("a,b").is_err());
        assert!(parse_bracket("1,2,3").is_err());
        assert_eq!(parse_z0("-1, 1").unwrap(), vec![-1.0, 1.0]);
        assert!(parse_z0("-1, x").is_err());
    }

    #[test]
    fn config_errors_carry_field_paths() {
        let dir = std::env::temp_dir().join(format!("delaycert-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");

        // Unknown field.
        std::fs::write(&path, r#"{"modell": {}}"#).unwrap();
        let err = load_config(None, Some(&path)).unwrap_err();
        match err {
            Failure::Config { detail, .. } => assert!(detail.contains("modell"), "{detail}"),
            other => panic!("expected config failure, got {other:?}"),
        }

        // Wrong type deep inside a section: the path must point at it.
        std::fs::write(&path, r#"{"model": {"n": 2, "a": [1, "x"], "b": [], "c": [], "l": []}}"#)
            .unwrap();
        let err = load_config(None, Some(&path)).unwrap_err();
        match err {
            Failure::Config { path: Some(p), .. } => {
                assert!(p.contains("model.a"), "path was {p}")
            }
            other => panic!("expected a field path, got {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn model_block_dimension_checks_name_the_field() {
        let mc = ModelConfig {
            n: 2,
            a: vec![0.0; 3],
            b: vec![0.0; 4],
            c: vec![1.0; 2],
            l: vec![1.0; 2],
        };
        match mc.to_model().unwrap_err() {
            Failure::Config { path: Some(p), detail } => {
                assert_eq!(p, "model.a");
                assert!(detail.contains("expected 4"), "{detail}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_resolution() {
        let cfg = RunConfig {
            preset: Some("example1".into()),
            ..RunConfig::default()
        };
        let (name, model) = resolve_model(&cfg).unwrap();
        assert_eq!(name, "example1");
        assert_eq!(model.n(), 2);

        let cfg = RunConfig {
            preset: Some("example9".into()),
            ..RunConfig::default()
        };
        assert!(matches!(resolve_model(&cfg), Err(Failure::Config { .. })));

        assert!(matches!(
            resolve_model(&RunConfig::default()),
            Err(Failure::Config { .. })
        ));
    }

    #[test]
    fn out_dir_precedence_prefers_flag_over_config() {
        let base = std::env::temp_dir().join(format!("delaycert-out-{}", std::process::id()));
        let flag = base.join("flag");
        let from_cfg = base.join("cfg");
        let got = resolve_out_dir(Some(&flag), Some(&from_cfg)).unwrap();
        assert_eq!(got, flag);
        let got = resolve_out_dir(None, Some(&from_cfg)).unwrap();
        assert_eq!(got, from_cfg);
        std::fs::remove_dir_all(&base).ok();
    }
}
