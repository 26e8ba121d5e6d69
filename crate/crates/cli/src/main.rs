//! `star-orlicz`: radial additions, dual mixed volumes and inequality
//! verification for star bodies, from JSON descriptors to JSON/CSV
//! reports.
//!
//! Exit codes: 0 success, 1 at least one violated verdict, 2 input or
//! validation error (malformed JSON, refused declarations, solver
//! failures).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use star_orlicz::dual_functionals::{
    dual_mixed_volume, dual_surface_area, first_variation, harmonic_mean_radius, DEFAULT_EPSILONS,
};
use star_orlicz::inequality_lab::sweeps::{
    margin_sweep, run_all, run_suite, sweep_to_csv, SuiteConfig, SuiteOutcome,
};
use star_orlicz::inequality_lab::{
    reports_to_csv, verify_comparison, verify_dual_minkowski, verify_dual_obm,
    verify_isoperimetric, verify_linear_dual_obm, verify_sl_invariance, verify_urysohn, Curvature,
    TheoremId, Verdict, VerificationReport,
};
use star_orlicz::radial_addition::{orlicz_radial_sum, LinearOrliczSpec};
use star_orlicz::spherical_quadrature::{volume, QuadratureRule};
use star_orlicz::star_bodies::{Direction, LinearMap, StarBody};
use star_orlicz::{OrliczBivariate, OrliczUnivariate};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(
    name = "star-orlicz",
    version,
    about = "Orlicz radial addition, dual mixed volumes and inequality verification for star bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RuleArgs {
    /// Ambient dimension.
    #[arg(long = "n", default_value_t = 2)]
    n: usize,
    /// Quadrature rule: circle_trapezoid | sphere_product_gauss | monte_carlo.
    /// Defaults by dimension.
    #[arg(long)]
    rule: Option<String>,
    /// Rule size: circle nodes, polar nodes (azimuth is doubled), or
    /// Monte Carlo samples.
    #[arg(long = "N")]
    size: Option<usize>,
    /// Seed for Monte Carlo rules and randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RuleArgs {
    fn build(&self) -> Result<QuadratureRule> {
        let rule = match self.rule.as_deref() {
            None => match self.size {
                None => QuadratureRule::default_for_dimension(self.n)?,
                Some(s) => match self.n {
                    2 => QuadratureRule::circle(s)?,
                    3 => QuadratureRule::sphere_product(s, 2 * s)?,
                    _ => QuadratureRule::monte_carlo(self.n, s, self.seed)?,
                },
            },
            Some("circle_trapezoid") => QuadratureRule::circle(self.size.unwrap_or(2048))?,
            Some("sphere_product_gauss") => {
                let s = self.size.unwrap_or(64);
                QuadratureRule::sphere_product(s, 2 * s)?
            }
            Some("monte_carlo") => {
                QuadratureRule::monte_carlo(self.n, self.size.unwrap_or(200_000), self.seed)?
            }
            Some(other) => bail!("unknown rule `{other}`"),
        };
        Ok(rule)
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Orlicz radial sum of two bodies: emits the sum descriptor and
    /// sampled radii.
    Add {
        /// Bivariate generator (inline JSON or @file).
        #[arg(long)]
        phi: String,
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        /// Number of sampled directions to report.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Volume of a body by spherical quadrature.
    Volume {
        #[arg(long = "K")]
        k: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dual mixed volume of a pair of bodies.
    Mixedvol {
        /// Univariate weight (inline JSON or @file).
        #[arg(long)]
        phi: String,
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dual surface area of a body.
    Surface {
        #[arg(long)]
        phi: String,
        #[arg(long = "K")]
        k: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Harmonic mean radius of a body.
    Meanradius {
        #[arg(long)]
        phi: String,
        #[arg(long = "K")]
        k: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First variation of volume along the ε-perturbation sum.
    Variation {
        #[arg(long)]
        phi1: String,
        #[arg(long)]
        phi2: String,
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(long = "L")]
        l: PathBuf,
        /// Comma-separated decreasing step schedule.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify inequalities: randomized suites (--suite) or a single
    /// instance (--theorem plus inputs).
    Verify {
        /// all | dual_obm | linear_dual_obm | dual_minkowski |
        /// isoperimetric | urysohn | comparison | sl_invariance
        #[arg(long, conflicts_with = "theorem")]
        suite: Option<String>,
        /// Randomized instances per theorem in suite mode.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Single-instance theorem id.
        #[arg(long)]
        theorem: Option<String>,
        /// Generator: bivariate for dual_obm, univariate elsewhere.
        #[arg(long)]
        phi: Option<String>,
        /// Comparison weight to invert.
        #[arg(long)]
        psi: Option<String>,
        /// Parts of the linear combination.
        #[arg(long)]
        phi1: Option<String>,
        #[arg(long)]
        phi2: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Declared curvature of the shape transform: convex | concave.
        #[arg(long)]
        declare: Option<String>,
        /// Volume-preserving matrix for sl_invariance (inline JSON rows
        /// or @file).
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long = "K")]
        k: Option<PathBuf>,
        #[arg(long = "L")]
        l: Option<PathBuf>,
        /// Override the verdict tolerance of single-instance reports.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the reports as a CSV margin table.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Margin-vs-eccentricity table for every inequality (CSV).
    Sweep {
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("STAR_ORLICZ_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(violated) => {
            if violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether any verdict was violated.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Add {
            phi,
            k,
            l,
            samples,
            rule,
            out,
        } => {
            let phi = load_bivariate(&phi)?;
            let k = load_body(&k, rule.n)?;
            let l = load_body(&l, rule.n)?;
            let sum = orlicz_radial_sum(&phi, &[k, l])?;
            let dirs = Direction::grid(rule.n, samples.max(1))?;
            let radii: Result<Vec<Value>> = dirs
                .iter()
                .map(|u| {
                    let r = sum.radius(u)?;
                    Ok(json!({"direction": u.components(), "radius": r}))
                })
                .collect();
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "add",
                "body": sum.to_json()?,
                "radii": radii?,
            });
            emit(report, &out.out)?;
            Ok(false)
        }
        Command::Volume { k, rule, out } => {
            let body = load_body(&k, rule.n)?;
            let q = rule.build()?;
            let v = volume(&body, &q)?;
            emit(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "volume",
                    "result": v.to_json(),
                }),
                &out.out,
            )?;
            Ok(false)
        }
        Command::Mixedvol {
            phi,
            k,
            l,
            rule,
            out,
        } => {
            let phi = load_univariate(&phi)?;
            let k = load_body(&k, rule.n)?;
            let l = load_body(&l, rule.n)?;
            let q = rule.build()?;
            let v = dual_mixed_volume(&phi, &k, &l, &q)?;
            emit(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "mixedvol",
                    "result": v.to_json(),
                }),
                &out.out,
            )?;
            Ok(false)
        }
        Command::Surface { phi, k, rule, out } => {
            let phi = load_univariate(&phi)?;
            let k = load_body(&k, rule.n)?;
            let q = rule.build()?;
            let v = dual_surface_area(&phi, &k, &q)?;
            emit(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "surface",
                    "result": v.to_json(),
                }),
                &out.out,
            )?;
            Ok(false)
        }
        Command::Meanradius { phi, k, rule, out } => {
            let phi = load_univariate(&phi)?;
            let k = load_body(&k, rule.n)?;
            let q = rule.build()?;
            let v = harmonic_mean_radius(&phi, &k, &q)?;
            emit(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "meanradius",
                    "result": v.to_json(),
                }),
                &out.out,
            )?;
            Ok(false)
        }
        Command::Variation {
            phi1,
            phi2,
            k,
            l,
            eps,
            rule,
            out,
        } => {
            let phi1 = load_univariate(&phi1)?;
            let phi2 = load_univariate(&phi2)?;
            let k = load_body(&k, rule.n)?;
            let l = load_body(&l, rule.n)?;
            let q = rule.build()?;
            let schedule = if eps.is_empty() {
                DEFAULT_EPSILONS.to_vec()
            } else {
                eps
            };
            let est = first_variation(&phi1, &phi2, &k, &l, &q, &schedule)?;
            emit(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "variation",
                    "result": est.to_json(),
                }),
                &out.out,
            )?;
            Ok(false)
        }
        Command::Verify {
            suite,
            trials,
            theorem,
            phi,
            psi,
            phi1,
            phi2,
            alpha,
            beta,
            declare,
            matrix,
            k,
            l,
            tol,
            csv,
            rule,
            out,
        } => {
            if let Some(suite) = suite {
                let cfg = SuiteConfig {
                    dim: rule.n,
                    trials,
                    seed: rule.seed,
                };
                let outcomes = if suite == "all" {
                    run_all(&cfg)?
                } else {
                    run_suite(TheoremId::from_str_name(&suite)?, &cfg)?
                };
                finish_verify(&outcomes, suite.as_str(), &out.out, &csv)
            } else {
                let theorem =
                    theorem.ok_or_else(|| anyhow!("verify needs either --suite or --theorem"))?;
                let report = verify_single(
                    &theorem, phi, psi, phi1, phi2, alpha, beta, declare, matrix, k, l, &rule,
                )?;
                let report = apply_tol_override(report, tol);
                let outcomes = vec![report];
                if let Some(path) = &csv {
                    fs::write(path, reports_to_csv(&outcomes))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
                let violated = outcomes.iter().any(|r| r.verdict == Verdict::Violated);
                let report = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify",
                    "theorem": theorem,
                    "reports": outcomes.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                });
                emit(report, &out.out)?;
                Ok(violated)
            }
        }
        Command::Sweep { steps, rule, out } => {
            if steps < 2 {
                bail!("sweep needs at least 2 steps");
            }
            let rows = margin_sweep(rule.n, steps)?;
            let csv = sweep_to_csv(&rows);
            match &out.out {
                Some(path) => {
                    fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{csv}"),
            }
            Ok(rows.iter().any(|r| r.report.verdict == Verdict::Violated))
        }
    }
}

fn finish_verify(
    outcomes: &[SuiteOutcome],
    suite: &str,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> Result<bool> {
    if let Some(path) = csv {
        let reports: Vec<VerificationReport> = outcomes.iter().map(|o| o.report.clone()).collect();
        fs::write(path, reports_to_csv(&reports))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let violated = outcomes
        .iter()
        .any(|o| o.report.verdict == Verdict::Violated);
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "suite": suite,
        "outcomes": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
    });
    emit(report, out)?;
    Ok(violated)
}

#[allow(clippy::too_many_arguments)]
fn verify_single(
    theorem: &str,
    phi: Option<String>,
    psi: Option<String>,
    phi1: Option<String>,
    phi2: Option<String>,
    alpha: f64,
    beta: f64,
    declare: Option<String>,
    matrix: Option<String>,
    k: Option<PathBuf>,
    l: Option<PathBuf>,
    rule: &RuleArgs,
) -> Result<VerificationReport> {
    let q = rule.build()?;
    let theorem_id = TheoremId::from_str_name(theorem)?;
    let body = |p: &Option<PathBuf>, name: &str| -> Result<StarBody> {
        let p = p
            .as_ref()
            .ok_or_else(|| anyhow!("{theorem} requires --{name}"))?;
        load_body(p, rule.n)
    };
    let declared = || -> Result<Curvature> {
        let d = declare
            .as_deref()
            .ok_or_else(|| anyhow!("{theorem} requires --declare convex|concave"))?;
        Ok(Curvature::from_str_name(d)?)
    };
    let univ = |s: &Option<String>, name: &str| -> Result<OrliczUnivariate> {
        let s = s
            .as_ref()
            .ok_or_else(|| anyhow!("{theorem} requires --{name}"))?;
        load_univariate(s)
    };

    let report = match theorem_id {
        TheoremId::DualOBM => {
            let phi = load_bivariate(
                phi.as_deref()
                    .ok_or_else(|| anyhow!("dual_obm requires --phi"))?,
            )?;
            verify_dual_obm(&phi, &body(&k, "K")?, &body(&l, "L")?, &q, declared()?)?
        }
        TheoremId::LinearDualOBM => {
            let spec =
                LinearOrliczSpec::new(alpha, beta, univ(&phi1, "phi1")?, univ(&phi2, "phi2")?)?;
            verify_linear_dual_obm(&spec, &body(&k, "K")?, &body(&l, "L")?, &q, declared()?)?
        }
        TheoremId::DualMinkowski => {
            verify_dual_minkowski(&univ(&phi, "phi")?, &body(&k, "K")?, &body(&l, "L")?, &q)?
        }
        TheoremId::Isoperimetric => verify_isoperimetric(&univ(&phi, "phi")?, &body(&k, "K")?, &q)?,
        TheoremId::Urysohn => verify_urysohn(&univ(&phi, "phi")?, &body(&k, "K")?, &q)?,
        TheoremId::Comparison => verify_comparison(
            &univ(&phi, "phi")?,
            &univ(&psi, "psi")?,
            &body(&k, "K")?,
            &body(&l, "L")?,
            &q,
            declared()?,
        )?,
        TheoremId::SLInvariance => {
            let m = matrix
                .as_deref()
                .ok_or_else(|| anyhow!("sl_invariance requires --matrix"))?;
            let rows: Vec<Vec<f64>> = serde_json::from_value(load_json_arg(m)?)
                .context("matrix must be an array of numeric rows")?;
            let map = LinearMap::from_rows(&rows)?;
            verify_sl_invariance(
                &univ(&phi, "phi")?,
                &body(&k, "K")?,
                &body(&l, "L")?,
                &map,
                &q,
            )?
        }
    };
    Ok(report)
}

fn apply_tol_override(mut report: VerificationReport, tol: Option<f64>) -> VerificationReport {
    if let Some(tol) = tol {
        let (margin, verdict) =
            VerificationReport::decide(report.lhs, report.rhs, report.relation, tol);
        report.tolerance = tol;
        report.margin = margin;
        report.verdict = verdict;
    }
    report
}

// ---------------------------------------------------------------------------
// input loading
// ---------------------------------------------------------------------------

/// Inline JSON (starts with `{` or `[`), `@file`, or a bare path.
fn load_json_arg(arg: &str) -> Result<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        let path = arg.strip_prefix('@').unwrap_or(arg);
        fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON from `{arg}`"))
}

fn load_body(path: &Path, dim: usize) -> Result<StarBody> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(StarBody::from_json(&v, dim)?)
}

fn load_univariate(arg: &str) -> Result<OrliczUnivariate> {
    Ok(OrliczUnivariate::from_json(&load_json_arg(arg)?)?)
}

fn load_bivariate(arg: &str) -> Result<OrliczBivariate> {
    Ok(OrliczBivariate::from_json(&load_json_arg(arg)?)?)
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

/// Rewrites every float with 17 significant digits so report bytes are
/// reproducible across runs and platforms.
fn format_floats(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_u64() || n.is_i64() {
                Value::Number(n)
            } else if let Some(x) = n.as_f64() {
                serde_json::from_str(&format!("{x:.16e}"))
                    .expect("formatted float parses as JSON number")
            } else {
                Value::Number(n)
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(format_floats).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, format_floats(v)))
                .collect(),
        ),
        other => other,
    }
}

fn emit(report: Value, out: &Option<PathBuf>) -> Result<()> {
    let formatted = format_floats(report);
    let text = format!("{}\n", serde_json::to_string_pretty(&formatted)?);
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}
