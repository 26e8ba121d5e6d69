//! Numerical verification of the dual inequalities.
//!
//! Each verifier computes both sides of one inequality by quadrature,
//! derives a tolerance from the quadrature error estimates, and issues
//! a verdict: `holds`, `violated`, or `equality_within_tol`. Whenever
//! the two sides agree within tolerance, the report carries a dilate
//! diagnosis — the equality case of every inequality here is "the
//! bodies are dilates" (or "the body is a ball"), which is decidable
//! numerically as constancy of the radial ratio on a grid.
//!
//! Declared convexity or concavity of the driving shape transform is
//! always cross-checked against a sampling probe before any verdict;
//! a contradiction refuses the run instead of guessing a direction.

use serde_json::{json, Value};

use crate::dual_functionals::{dual_mixed_volume, dual_surface_area, harmonic_mean_radius};
use crate::error::{Error, Result};
use crate::orlicz_functions::{
    probe_increasing_1d, probe_shape_1d, shape_of_f_transform, shape_of_univariate_f,
    OrliczBivariate, OrliczUnivariate, ProbeGrid, ShapeProbe, UnivariateClass,
};
use crate::radial_addition::{linear_orlicz_sum, orlicz_radial_sum, LinearOrliczSpec};
use crate::roots;
use crate::spherical_quadrature::{unit_ball_volume, volume, QuadratureRule};
use crate::star_bodies::{apply_linear, Direction, LinearMap, StarBody};

pub mod sweeps;

/// Grid size for dilate detection.
pub const DILATE_GRID: usize = 512;
/// Relative ratio-constancy tolerance for dilate detection.
pub const DILATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    DualOBM,
    LinearDualOBM,
    DualMinkowski,
    Isoperimetric,
    Urysohn,
    Comparison,
    SLInvariance,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::DualOBM,
        TheoremId::LinearDualOBM,
        TheoremId::DualMinkowski,
        TheoremId::Isoperimetric,
        TheoremId::Urysohn,
        TheoremId::Comparison,
        TheoremId::SLInvariance,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::DualOBM => "dual_obm",
            TheoremId::LinearDualOBM => "linear_dual_obm",
            TheoremId::DualMinkowski => "dual_minkowski",
            TheoremId::Isoperimetric => "isoperimetric",
            TheoremId::Urysohn => "urysohn",
            TheoremId::Comparison => "comparison",
            TheoremId::SLInvariance => "sl_invariance",
        }
    }

    pub fn from_str_name(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Leq,
    Geq,
    Eq,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Leq => "<=",
            Relation::Geq => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    EqualityWithinTol,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::EqualityWithinTol => "equality_within_tol",
        }
    }
}

/// Declared curvature of the shape transform driving an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

impl Curvature {
    pub fn as_str(&self) -> &'static str {
        match self {
            Curvature::Convex => "convex",
            Curvature::Concave => "concave",
        }
    }

    pub fn from_str_name(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Curvature::Convex),
            "concave" => Ok(Curvature::Concave),
            other => Err(Error::InvalidParameter(format!(
                "declaration must be `convex` or `concave`, got `{other}`"
            ))),
        }
    }
}

/// Radial-ratio statistics attached to near-equality verdicts.
#[derive(Debug, Clone, Copy)]
pub struct EqualityDiagnosis {
    /// Present when the ratio is constant within the detection tolerance.
    pub lambda: Option<f64>,
    pub mean_ratio: f64,
    pub max_ratio_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Signed so that nonnegative means the stated relation holds.
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub equality_diagnosis: Option<EqualityDiagnosis>,
}

impl VerificationReport {
    /// Margin and verdict from the raw fields; the stored verdict always
    /// equals this recomputation.
    pub fn decide(lhs: f64, rhs: f64, relation: Relation, tolerance: f64) -> (f64, Verdict) {
        let raw = lhs - rhs;
        let margin = match relation {
            Relation::Geq => raw,
            Relation::Leq => -raw,
            Relation::Eq => -raw.abs(),
        };
        let verdict = if raw.abs() <= tolerance {
            Verdict::EqualityWithinTol
        } else if margin > 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        (margin, verdict)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "theorem_id": self.theorem.as_str(),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "direction": self.relation.as_str(),
            "margin": self.margin,
            "tolerance": self.tolerance,
            "verdict": self.verdict.as_str(),
            "equality_diagnosis": self.equality_diagnosis.map(|d| json!({
                "lambda": d.lambda,
                "mean_ratio": d.mean_ratio,
                "max_ratio_deviation": d.max_ratio_deviation,
            })),
        })
    }

    pub fn csv_header() -> &'static str {
        "theorem_id,lhs,rhs,margin,tolerance,verdict,lambda_estimate"
    }

    pub fn csv_row(&self) -> String {
        let lambda = match self.equality_diagnosis.and_then(|d| d.lambda) {
            Some(l) => format!("{l:.16e}"),
            None => String::new(),
        };
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.theorem.as_str(),
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance,
            self.verdict.as_str(),
            lambda
        )
    }
}

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(VerificationReport::csv_header());
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// dilate detection
// ---------------------------------------------------------------------------

fn dilate_stats(k: &StarBody, l: &StarBody, grid: &[Direction]) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut ratios = Vec::with_capacity(grid.len());
    for u in grid {
        let r = l.radius(u)? / k.radius(u)?;
        ratios.push(r);
        sum += r;
    }
    let mean = sum / grid.len() as f64;
    let max_dev = ratios
        .iter()
        .map(|r| (r - mean).abs())
        .fold(0.0f64, f64::max);
    Ok((mean, max_dev))
}

/// Returns `λ` with `ρ_L ≈ λ·ρ_K` when the ratio is constant on the
/// grid within `tol·λ`, otherwise `None`.
pub fn dilate_detector(
    k: &StarBody,
    l: &StarBody,
    grid: &[Direction],
    tol: f64,
) -> Result<Option<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("direction grid is empty".into()));
    }
    let (mean, max_dev) = dilate_stats(k, l, grid)?;
    Ok((max_dev <= tol * mean).then_some(mean))
}

fn diagnose(k: &StarBody, l: &StarBody) -> Result<EqualityDiagnosis> {
    let grid = Direction::grid(k.dim(), DILATE_GRID)?;
    let (mean_ratio, max_ratio_deviation) = dilate_stats(k, l, &grid)?;
    let lambda = (max_ratio_deviation <= DILATE_TOL * mean_ratio).then_some(mean_ratio);
    Ok(EqualityDiagnosis {
        lambda,
        mean_ratio,
        max_ratio_deviation,
    })
}

// ---------------------------------------------------------------------------
// shared verifier plumbing
// ---------------------------------------------------------------------------

/// Verdict tolerance: a relative floor plus ten times the propagated
/// quadrature error estimates.
fn verdict_tolerance(rhs: f64, err_lhs: f64, err_rhs: f64) -> f64 {
    (1e-9 * rhs.abs()).max(10.0 * (err_lhs + err_rhs))
}

fn check_probe(declared: Curvature, probe: &ShapeProbe, what: &str) -> Result<()> {
    let consistent = match declared {
        Curvature::Convex => probe.convex,
        Curvature::Concave => probe.concave,
    };
    if !consistent {
        return Err(Error::ProbeMismatch {
            declared: declared.as_str().into(),
            probed: format!(
                "{what} has chord gaps in [{:.3e}, {:.3e}]",
                probe.min_gap, probe.max_gap
            ),
        });
    }
    Ok(())
}

fn assemble(
    theorem: TheoremId,
    lhs: f64,
    rhs: f64,
    relation: Relation,
    tolerance: f64,
    diagnosis_pair: (&StarBody, &StarBody),
) -> Result<VerificationReport> {
    let (margin, verdict) = VerificationReport::decide(lhs, rhs, relation, tolerance);
    let equality_diagnosis = if (lhs - rhs).abs() <= tolerance {
        Some(diagnose(diagnosis_pair.0, diagnosis_pair.1)?)
    } else {
        None
    };
    Ok(VerificationReport {
        theorem,
        lhs,
        rhs,
        relation,
        margin,
        tolerance,
        verdict,
        equality_diagnosis,
    })
}

// ---------------------------------------------------------------------------
// verifiers
// ---------------------------------------------------------------------------

/// Brunn–Minkowski for the Orlicz radial sum:
/// `φ((|K+̃L|/|K|)^{1/n}, (|K+̃L|/|L|)^{1/n})` against 1, direction by
/// the declared curvature of the shape transform.
pub fn verify_dual_obm(
    phi: &OrliczBivariate,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
    declared: Curvature,
) -> Result<VerificationReport> {
    let n = k.dim();
    let probe = shape_of_f_transform(phi, n);
    check_probe(declared, &probe, "shape transform")?;

    let sum = orlicz_radial_sum(phi, &[k.clone(), l.clone()])?;
    let vs = volume(&sum, rule)?;
    let vk = volume(k, rule)?;
    let vl = volume(l, rule)?;

    let inv_n = 1.0 / n as f64;
    let expr = |s: f64, a: f64, b: f64| phi.eval(&[(s / a).powf(inv_n), (s / b).powf(inv_n)]);
    let lhs = expr(vs.value, vk.value, vl.value);
    let hi = expr(
        vs.value + vs.error_estimate,
        vk.value - vk.error_estimate,
        vl.value - vl.error_estimate,
    );
    let lo = expr(
        vs.value - vs.error_estimate,
        vk.value + vk.error_estimate,
        vl.value + vl.error_estimate,
    );
    let err_lhs = (hi - lhs).abs().max((lo - lhs).abs());

    let relation = match declared {
        Curvature::Convex => Relation::Leq,
        Curvature::Concave => Relation::Geq,
    };
    let tolerance = verdict_tolerance(1.0, err_lhs, 0.0);
    assemble(TheoremId::DualOBM, lhs, 1.0, relation, tolerance, (k, l))
}

/// Brunn–Minkowski for the linear combination
/// `α·φ₁(ρ/ρ_K) + β·φ₂(ρ/ρ_L) = 1`.
pub fn verify_linear_dual_obm(
    spec: &LinearOrliczSpec,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
    declared: Curvature,
) -> Result<VerificationReport> {
    let n = k.dim();
    check_probe(
        declared,
        &shape_of_univariate_f(spec.phi1(), n),
        "first part",
    )?;
    check_probe(
        declared,
        &shape_of_univariate_f(spec.phi2(), n),
        "second part",
    )?;

    let sum = linear_orlicz_sum(spec, k, l)?;
    let vs = volume(&sum, rule)?;
    let vk = volume(k, rule)?;
    let vl = volume(l, rule)?;

    let inv_n = 1.0 / n as f64;
    let expr = |s: f64, a: f64, b: f64| {
        spec.alpha() * spec.phi1().eval((s / a).powf(inv_n))
            + spec.beta() * spec.phi2().eval((s / b).powf(inv_n))
    };
    let lhs = expr(vs.value, vk.value, vl.value);
    let hi = expr(
        vs.value + vs.error_estimate,
        vk.value - vk.error_estimate,
        vl.value - vl.error_estimate,
    );
    let lo = expr(
        vs.value - vs.error_estimate,
        vk.value + vk.error_estimate,
        vl.value + vl.error_estimate,
    );
    let err_lhs = (hi - lhs).abs().max((lo - lhs).abs());

    let relation = match declared {
        Curvature::Convex => Relation::Leq,
        Curvature::Concave => Relation::Geq,
    };
    let tolerance = verdict_tolerance(1.0, err_lhs, 0.0);
    assemble(
        TheoremId::LinearDualOBM,
        lhs,
        1.0,
        relation,
        tolerance,
        (k, l),
    )
}

/// Minkowski-type lower/upper bound for the dual mixed volume:
/// `Ṽ_φ(K, L)` against `|K|·φ(|K|^{1/n}·|L|^{-1/n})`.
pub fn verify_dual_minkowski(
    phi: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    let relation = shape_class_relation(phi, k.dim())?;
    let lhs_fv = dual_mixed_volume(phi, k, l, rule)?;
    let vk = volume(k, rule)?;
    let vl = volume(l, rule)?;

    let inv_n = 1.0 / k.dim() as f64;
    let expr = |a: f64, b: f64| a * phi.eval((a / b).powf(inv_n));
    let rhs = expr(vk.value, vl.value);
    let hi = expr(vk.value + vk.error_estimate, vl.value - vl.error_estimate);
    let lo = expr(vk.value - vk.error_estimate, vl.value + vl.error_estimate);
    let err_rhs = (hi - rhs).abs().max((lo - rhs).abs());

    let tolerance = verdict_tolerance(rhs, lhs_fv.error_estimate, err_rhs);
    assemble(
        TheoremId::DualMinkowski,
        lhs_fv.value,
        rhs,
        relation,
        tolerance,
        (k, l),
    )
}

/// Isoperimetric-type bound: `S̃_φ(K)` against `S̃_φ(B_K)` where `B_K`
/// is the equal-volume ball (closed form `φ(r)·n·|K|`).
pub fn verify_isoperimetric(
    phi: &OrliczUnivariate,
    k: &StarBody,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    let n = k.dim();
    let relation = shape_class_relation(phi, n)?;
    let lhs_fv = dual_surface_area(phi, k, rule)?;
    let vk = volume(k, rule)?;

    let omega = unit_ball_volume(n);
    let expr = |v: f64| phi.eval((v / omega).powf(1.0 / n as f64)) * n as f64 * v;
    let rhs = expr(vk.value);
    let err_rhs = (expr(vk.value + vk.error_estimate) - rhs)
        .abs()
        .max((expr(vk.value - vk.error_estimate) - rhs).abs());

    let tolerance = verdict_tolerance(rhs, lhs_fv.error_estimate, err_rhs);
    let ball = StarBody::unit_ball(n)?;
    assemble(
        TheoremId::Isoperimetric,
        lhs_fv.value,
        rhs,
        relation,
        tolerance,
        (&ball, k),
    )
}

/// Urysohn-type bound: `ω̃_φ(K)` against `φ(ω_n^{1/n}·|K|^{-1/n})`.
pub fn verify_urysohn(
    phi: &OrliczUnivariate,
    k: &StarBody,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    let n = k.dim();
    let relation = shape_class_relation(phi, n)?;
    let lhs_fv = harmonic_mean_radius(phi, k, rule)?;
    let vk = volume(k, rule)?;

    let omega = unit_ball_volume(n);
    let expr = |v: f64| phi.eval((omega / v).powf(1.0 / n as f64));
    let rhs = expr(vk.value);
    let err_rhs = (expr(vk.value + vk.error_estimate) - rhs)
        .abs()
        .max((expr(vk.value - vk.error_estimate) - rhs).abs());

    let tolerance = verdict_tolerance(rhs, lhs_fv.error_estimate, err_rhs);
    let ball = StarBody::unit_ball(n)?;
    assemble(
        TheoremId::Urysohn,
        lhs_fv.value,
        rhs,
        relation,
        tolerance,
        (&ball, k),
    )
}

fn shape_class_relation(phi: &OrliczUnivariate, dim: usize) -> Result<Relation> {
    let relation = match phi.class() {
        UnivariateClass::Phi => Relation::Geq,
        UnivariateClass::Psi => Relation::Leq,
        other => {
            return Err(Error::ClassViolation(format!(
                "verifier needs a Phi or Psi class tag, got {other:?}"
            )))
        }
    };
    let report = phi.validate(&ProbeGrid::log_default(), dim);
    if !report.is_clean() {
        return Err(Error::ProbeMismatch {
            declared: format!("{:?}", phi.class()),
            probed: report.violations[0].detail.clone(),
        });
    }
    Ok(relation)
}

/// Jensen comparison of two mixed volumes through `H = φ ∘ ψ⁻¹`:
/// `Ṽ_φ(K, L)/|K|` against `H(Ṽ_ψ(K, L)/|K|)`.
pub fn verify_comparison(
    phi: &OrliczUnivariate,
    psi: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
    declared: Curvature,
) -> Result<VerificationReport> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    // radial ratio range, padded so degenerate (dilate) ranges still
    // give the probes room
    let grid = Direction::grid(k.dim(), DILATE_GRID)?;
    let mut rmin = f64::INFINITY;
    let mut rmax = 0.0f64;
    for u in &grid {
        let r = k.radius(u)? / l.radius(u)?;
        rmin = rmin.min(r);
        rmax = rmax.max(r);
    }
    let lo = rmin * 0.5;
    let hi = rmax * 2.0;

    // ψ must be strictly monotone (hence invertible) on the padded range
    let probe_pts = ProbeGrid::log_spaced(64, lo, hi).points;
    let (incr, strictly_incr) = probe_increasing_1d(|t| psi.eval(t), &probe_pts);
    let (decr, strictly_decr) = probe_increasing_1d(|t| -psi.eval(t), &probe_pts);
    if !(incr && strictly_incr) && !(decr && strictly_decr) {
        return Err(Error::ClassViolation(
            "psi is not strictly monotone on the sampled ratio range".into(),
        ));
    }

    let invert = |target: f64| -> Result<f64> {
        roots::solve_level(|t| psi.eval(t), target, lo * 0.25, hi * 4.0).map(|r| r.root)
    };
    let compose = |t: f64| -> Result<f64> { Ok(phi.eval(invert(t)?)) };

    // probe H on the ψ-image of the range
    let (pa, pb) = (psi.eval(lo), psi.eval(hi));
    let (psi_lo, psi_hi) = (pa.min(pb), pa.max(pb));
    let h_pts = ProbeGrid::linear(64, psi_lo, psi_hi).points;
    let h_vals_ok = std::cell::Cell::new(true);
    let h_probe = probe_shape_1d(
        |t| match compose(t) {
            Ok(v) => v,
            Err(_) => {
                h_vals_ok.set(false);
                f64::NAN
            }
        },
        &h_pts,
    );
    if !h_vals_ok.get() {
        return Err(Error::ClassViolation(
            "composition could not be evaluated on the sampled range".into(),
        ));
    }
    check_probe(declared, &h_probe, "composition")?;

    let v_phi = dual_mixed_volume(phi, k, l, rule)?;
    let v_psi = dual_mixed_volume(psi, k, l, rule)?;
    let vk = volume(k, rule)?;

    let lhs = v_phi.value / vk.value;
    let err_lhs = ((v_phi.value + v_phi.error_estimate) / (vk.value - vk.error_estimate) - lhs)
        .abs()
        .max(((v_phi.value - v_phi.error_estimate) / (vk.value + vk.error_estimate) - lhs).abs());

    let rhs = compose(v_psi.value / vk.value)?;
    let rhs_hi = compose((v_psi.value + v_psi.error_estimate) / (vk.value - vk.error_estimate))?;
    let rhs_lo = compose((v_psi.value - v_psi.error_estimate) / (vk.value + vk.error_estimate))?;
    let err_rhs = (rhs_hi - rhs).abs().max((rhs_lo - rhs).abs());

    let relation = match declared {
        Curvature::Convex => Relation::Geq,
        Curvature::Concave => Relation::Leq,
    };
    let tolerance = verdict_tolerance(rhs, err_lhs, err_rhs);
    assemble(TheoremId::Comparison, lhs, rhs, relation, tolerance, (k, l))
}

/// Invariance of the dual mixed volume under volume-preserving linear
/// maps: `Ṽ_φ(TK, TL) = Ṽ_φ(K, L)` for `|det T| = 1`.
pub fn verify_sl_invariance(
    phi: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    map: &LinearMap,
    rule: &QuadratureRule,
) -> Result<VerificationReport> {
    if !map.is_unimodular(1e-10) {
        return Err(Error::InvalidParameter(format!(
            "map is not volume-preserving: |det T| = {}",
            map.det_abs()
        )));
    }
    let tk = apply_linear(map, k)?;
    let tl = apply_linear(map, l)?;
    let lhs = dual_mixed_volume(phi, &tk, &tl, rule)?;
    let rhs = dual_mixed_volume(phi, k, l, rule)?;
    // both sides carry quadrature error only; no relative floor here
    let tolerance = 5.0 * (lhs.error_estimate + rhs.error_estimate);
    assemble(
        TheoremId::SLInvariance,
        lhs.value,
        rhs.value,
        Relation::Eq,
        tolerance,
        (k, l),
    )
}
