//! Randomized verification sweeps and margin-vs-eccentricity tables.
//!
//! Instances are generated deterministically from a seed: a quarter are
//! constructed dilate pairs (the equality case), a quarter are
//! eccentric pairs with axis ratio at least 2 (strict inequality for
//! strictly curved shape transforms), and the rest are random smooth
//! bodies with random admissible generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::orlicz_functions::{
    shape_of_f_transform, shape_of_univariate_f, BivariateClass, OrliczBivariate, OrliczUnivariate,
    UnivariateClass,
};
use crate::radial_addition::LinearOrliczSpec;
use crate::spherical_quadrature::QuadratureRule;
use crate::star_bodies::{LinearMap, StarBody};

use super::{
    verify_comparison, verify_dual_minkowski, verify_dual_obm, verify_isoperimetric,
    verify_linear_dual_obm, verify_sl_invariance, verify_urysohn, Curvature, TheoremId,
    VerificationReport,
};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Random,
    Dilates,
    Eccentric,
}

impl InstanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceKind::Random => "random",
            InstanceKind::Dilates => "dilates",
            InstanceKind::Eccentric => "eccentric",
        }
    }
}

/// One verified instance together with what the generator built.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub theorem: TheoremId,
    pub kind: InstanceKind,
    /// Dilation factor used to construct the pair, when `kind` is
    /// `Dilates` (for single-body theorems: the ball radius).
    pub expected_lambda: Option<f64>,
    /// Whether the instance's shape probe certified strict curvature.
    pub strict_probe: bool,
    pub report: VerificationReport,
}

impl SuiteOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "theorem_id": self.theorem.as_str(),
            "instance": self.kind.as_str(),
            "expected_lambda": self.expected_lambda,
            "strict_probe": self.strict_probe,
            "report": self.report.to_json(),
        })
    }
}

/// Quadrature resolution used by sweeps; smaller than the anchors so a
/// full 200-instance suite stays fast.
pub fn sweep_rule(dim: usize) -> Result<QuadratureRule> {
    match dim {
        2 => QuadratureRule::circle(1024),
        3 => QuadratureRule::sphere_product(48, 96),
        _ => QuadratureRule::monte_carlo(dim, 40_000, 0x5eed),
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn instance_seed(seed: u64, theorem: TheoremId, trial: usize) -> u64 {
    splitmix64(seed ^ ((theorem as u64) << 40) ^ (trial as u64))
}

// ---------------------------------------------------------------------------
// random geometry
// ---------------------------------------------------------------------------

fn random_rotation(dim: usize, rng: &mut ChaCha8Rng) -> Result<LinearMap> {
    if dim == 2 {
        return Ok(LinearMap::rotation_2d(
            rng.random_range(0.0..std::f64::consts::TAU),
        ));
    }
    // composition of coordinate-plane rotations
    let mut m = nalgebra::DMatrix::<f64>::identity(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mut r = nalgebra::DMatrix::<f64>::identity(dim, dim);
            r[(i, i)] = theta.cos();
            r[(j, j)] = theta.cos();
            r[(i, j)] = -theta.sin();
            r[(j, i)] = theta.sin();
            m = r * m;
        }
    }
    LinearMap::new(m)
}

fn random_axes(dim: usize, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..hi)).collect()
}

/// Smooth positive random body: ball, (rotated) ellipsoid, or a
/// low-order trigonometric/polynomial perturbation of a ball.
pub fn random_smooth_body(dim: usize, rng: &mut ChaCha8Rng) -> Result<StarBody> {
    match rng.random_range(0u8..4) {
        0 => StarBody::ball(dim, rng.random_range(0.6..1.8)),
        1 => StarBody::ellipsoid(random_axes(dim, rng, 0.7, 1.6)),
        2 => {
            let e = StarBody::ellipsoid(random_axes(dim, rng, 0.7, 1.6))?;
            e.linear_image(&random_rotation(dim, rng)?)
        }
        _ => {
            let c0: f64 = rng.random_range(1.0..1.5);
            if dim == 2 {
                let coeffs: Vec<(f64, f64, f64)> = (1..=3)
                    .map(|k| {
                        (
                            k as f64,
                            rng.random_range(-0.08..0.08) * c0,
                            rng.random_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                StarBody::custom_radial(dim, "trig_perturbed_ball", move |u| {
                    let theta = u.components()[1].atan2(u.components()[0]);
                    c0 + coeffs
                        .iter()
                        .map(|(k, a, p)| a * (k * theta + p).cos())
                        .sum::<f64>()
                })
            } else {
                let a = rng.random_range(-0.2..0.2) * c0;
                let b = rng.random_range(-0.2..0.2) * c0;
                let c = rng.random_range(-0.2..0.2) * c0;
                StarBody::custom_radial(dim, "poly_perturbed_ball", move |u| {
                    let x = u.components();
                    c0 + a * x[0] * x[1] + b * x[1] * x[2 % x.len()] + c * x[0].powi(2)
                        - c / x.len() as f64
                })
            }
        }
    }
}

/// Ellipsoid with axis ratio at least 2, randomly rotated.
pub fn eccentric_body(dim: usize, rng: &mut ChaCha8Rng) -> Result<StarBody> {
    let long: f64 = rng.random_range(1.2..1.8);
    let ratio: f64 = rng.random_range(2.0..3.0);
    let mut axes = vec![long; dim];
    axes[1] = long / ratio;
    for axis in axes.iter_mut().skip(2) {
        *axis = long / rng.random_range(1.0..ratio);
    }
    let e = StarBody::ellipsoid(axes)?;
    e.linear_image(&random_rotation(dim, rng)?)
}

fn random_unimodular(dim: usize, rng: &mut ChaCha8Rng) -> Result<LinearMap> {
    loop {
        let entries: Vec<f64> = (0..dim * dim)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &entries);
        let det = m.determinant();
        if det.abs() < 0.3 {
            continue;
        }
        let scaled = m / det.abs().powf(1.0 / dim as f64);
        if let Ok(map) = LinearMap::new(scaled) {
            // keep the transform well conditioned for quadrature
            let norm = map.matrix().amax();
            let inv_norm = map
                .apply_inverse(&vec![1.0; dim])
                .iter()
                .fold(0.0f64, |a, &b| a.max(b.abs()));
            if norm <= 6.0 && inv_norm <= 6.0 && map.is_unimodular(1e-10) {
                return Ok(map);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// random generators per theorem
// ---------------------------------------------------------------------------

fn obm_generator(dim: usize, rng: &mut ChaCha8Rng) -> Result<(OrliczBivariate, Curvature)> {
    let n = dim as f64;
    Ok(match rng.random_range(0u8..4) {
        0 => {
            // shape transform t^{p/n} with p < n: concave
            let p = rng.random_range(0.5..n - 0.4);
            (
                OrliczBivariate::power_sum_decreasing(p, 2)?,
                Curvature::Concave,
            )
        }
        1 => {
            let p = rng.random_range(n + 0.5..n + 2.5);
            (
                OrliczBivariate::power_sum_decreasing(p, 2)?,
                Curvature::Convex,
            )
        }
        2 => {
            let p = rng.random_range(0.7..3.0);
            (
                OrliczBivariate::power_sum_increasing(p, 2)?,
                Curvature::Convex,
            )
        }
        _ => {
            // normalized increasing mix: θx^p1 + (1-θ)x^p2 + y^p3
            let theta: f64 = rng.random_range(0.2..0.8);
            let p1: f64 = rng.random_range(0.8..2.5);
            let p2: f64 = rng.random_range(0.8..2.5);
            let p3: f64 = rng.random_range(0.8..2.5);
            let phi = OrliczBivariate::custom(2, BivariateClass::PhiTilde, move |x| {
                theta * x[0].powf(p1) + (1.0 - theta) * x[0].powf(p2) + x[1].powf(p3)
            });
            (phi, Curvature::Convex)
        }
    })
}

fn univariate_generator(dim: usize, rng: &mut ChaCha8Rng) -> Result<OrliczUnivariate> {
    let n = dim as f64;
    Ok(match rng.random_range(0u8..5) {
        0 => OrliczUnivariate::power(rng.random_range(0.6..3.0))?.with_class(UnivariateClass::Phi),
        1 => OrliczUnivariate::power(-rng.random_range(n + 0.5..n + 2.5))?
            .with_class(UnivariateClass::Phi),
        2 => OrliczUnivariate::power(-rng.random_range(0.5..n - 0.4))?
            .with_class(UnivariateClass::Psi),
        3 => OrliczUnivariate::arctan_inv(n),
        _ => OrliczUnivariate::log1p_inv(n),
    })
}

fn linear_parts(dim: usize, rng: &mut ChaCha8Rng) -> Result<(LinearOrliczSpec, Curvature)> {
    let n = dim as f64;
    let alpha: f64 = rng.random_range(0.5..1.3);
    let beta: f64 = rng.random_range((1.05 - alpha).max(0.1)..1.4);
    let (phi1, phi2, curvature) = if rng.random_bool(0.5) {
        (
            OrliczUnivariate::power(rng.random_range(0.7..2.5))?,
            OrliczUnivariate::power(rng.random_range(0.7..2.5))?,
            Curvature::Convex,
        )
    } else {
        (
            OrliczUnivariate::power(-rng.random_range(0.5..n - 0.4))?,
            OrliczUnivariate::power(-rng.random_range(0.5..n - 0.4))?,
            Curvature::Concave,
        )
    };
    Ok((LinearOrliczSpec::new(alpha, beta, phi1, phi2)?, curvature))
}

fn comparison_pair(
    rng: &mut ChaCha8Rng,
) -> Result<(OrliczUnivariate, OrliczUnivariate, Curvature)> {
    let b: f64 = if rng.random_bool(0.5) {
        rng.random_range(0.6..2.0)
    } else {
        -rng.random_range(0.6..2.0)
    };
    let (h, curvature) = if rng.random_bool(0.5) {
        (rng.random_range(1.3..2.2), Curvature::Convex)
    } else {
        (rng.random_range(0.35..0.7), Curvature::Concave)
    };
    let phi = OrliczUnivariate::power(b * h)?;
    let psi = OrliczUnivariate::power(b)?;
    Ok((phi, psi, curvature))
}

// ---------------------------------------------------------------------------
// suite runner
// ---------------------------------------------------------------------------

fn instance_bodies(
    kind: InstanceKind,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(StarBody, StarBody, Option<f64>)> {
    match kind {
        InstanceKind::Dilates => {
            let k = random_smooth_body(dim, rng)?;
            let lambda = rng.random_range(0.4..2.5);
            let l = k.dilate(lambda)?;
            Ok((k, l, Some(lambda)))
        }
        InstanceKind::Eccentric => {
            let k = StarBody::ball(dim, rng.random_range(0.8..1.2))?;
            let l = eccentric_body(dim, rng)?;
            Ok((k, l, None))
        }
        InstanceKind::Random => {
            let k = random_smooth_body(dim, rng)?;
            let l = random_smooth_body(dim, rng)?;
            Ok((k, l, None))
        }
    }
}

/// Single body for the isoperimetric and Urysohn suites; the dilate
/// case is a ball (the equality case of both).
fn instance_single_body(
    kind: InstanceKind,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(StarBody, Option<f64>)> {
    match kind {
        InstanceKind::Dilates => {
            let r = rng.random_range(0.5..2.0);
            Ok((StarBody::ball(dim, r)?, Some(r)))
        }
        InstanceKind::Eccentric => Ok((eccentric_body(dim, rng)?, None)),
        InstanceKind::Random => Ok((random_smooth_body(dim, rng)?, None)),
    }
}

fn run_instance(
    theorem: TheoremId,
    kind: InstanceKind,
    dim: usize,
    rule: &QuadratureRule,
    rng: &mut ChaCha8Rng,
) -> Result<SuiteOutcome> {
    let outcome = match theorem {
        TheoremId::DualOBM => {
            let (phi, declared) = obm_generator(dim, rng)?;
            let (k, l, expected_lambda) = instance_bodies(kind, dim, rng)?;
            let probe = shape_of_f_transform(&phi, dim);
            let strict_probe = match declared {
                Curvature::Convex => probe.strictly_convex,
                Curvature::Concave => probe.strictly_concave,
            };
            let report = verify_dual_obm(&phi, &k, &l, rule, declared)?;
            SuiteOutcome {
                theorem,
                kind,
                expected_lambda,
                strict_probe,
                report,
            }
        }
        TheoremId::LinearDualOBM => {
            let (spec, declared) = linear_parts(dim, rng)?;
            let (k, l, expected_lambda) = instance_bodies(kind, dim, rng)?;
            let p1 = shape_of_univariate_f(spec.phi1(), dim);
            let p2 = shape_of_univariate_f(spec.phi2(), dim);
            let strict_probe = match declared {
                Curvature::Convex => p1.strictly_convex || p2.strictly_convex,
                Curvature::Concave => p1.strictly_concave || p2.strictly_concave,
            };
            let report = verify_linear_dual_obm(&spec, &k, &l, rule, declared)?;
            SuiteOutcome {
                theorem,
                kind,
                expected_lambda,
                strict_probe,
                report,
            }
        }
        TheoremId::DualMinkowski => {
            let phi = univariate_generator(dim, rng)?;
            let (k, l, expected_lambda) = instance_bodies(kind, dim, rng)?;
            let probe = shape_of_univariate_f(&phi, dim);
            let strict_probe = match phi.class() {
                UnivariateClass::Phi => probe.strictly_convex,
                _ => probe.strictly_concave,
            };
            let report = verify_dual_minkowski(&phi, &k, &l, rule)?;
            SuiteOutcome {
                theorem,
                kind,
                expected_lambda,
                strict_probe,
                report,
            }
        }
        TheoremId::Isoperimetric | TheoremId::Urysohn => {
            let phi = univariate_generator(dim, rng)?;
            let (k, expected_lambda) = instance_single_body(kind, dim, rng)?;
            let probe = shape_of_univariate_f(&phi, dim);
            let strict_probe = match phi.class() {
                UnivariateClass::Phi => probe.strictly_convex,
                _ => probe.strictly_concave,
            };
            let report = if theorem == TheoremId::Isoperimetric {
                verify_isoperimetric(&phi, &k, rule)?
            } else {
                verify_urysohn(&phi, &k, rule)?
            };
            SuiteOutcome {
                theorem,
                kind,
                expected_lambda,
                strict_probe,
                report,
            }
        }
        TheoremId::Comparison => {
            let (phi, psi, declared) = comparison_pair(rng)?;
            let (k, l, expected_lambda) = instance_bodies(kind, dim, rng)?;
            let report = verify_comparison(&phi, &psi, &k, &l, rule, declared)?;
            SuiteOutcome {
                theorem,
                kind,
                expected_lambda,
                strict_probe: true, // exponent ratio kept away from 0 and 1
                report,
            }
        }
        TheoremId::SLInvariance => {
            let p: f64 = if rng.random_bool(0.5) {
                rng.random_range(0.5..2.0)
            } else {
                -rng.random_range(0.5..2.0)
            };
            let phi = OrliczUnivariate::power(p)?;
            let k = random_smooth_body(dim, rng)?;
            let l = random_smooth_body(dim, rng)?;
            let map = random_unimodular(dim, rng)?;
            let report = verify_sl_invariance(&phi, &k, &l, &map, rule)?;
            SuiteOutcome {
                theorem,
                kind: InstanceKind::Random,
                expected_lambda: None,
                strict_probe: false,
                report,
            }
        }
    };
    Ok(outcome)
}

/// Deterministic randomized suite for one theorem: a quarter dilate
/// pairs, a quarter eccentric pairs, half fully random.
pub fn run_suite(theorem: TheoremId, cfg: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    let rule = sweep_rule(cfg.dim)?;
    let mut out = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(cfg.seed, theorem, trial));
        let kind = match trial % 4 {
            0 => InstanceKind::Dilates,
            1 => InstanceKind::Eccentric,
            _ => InstanceKind::Random,
        };
        out.push(run_instance(theorem, kind, cfg.dim, &rule, &mut rng)?);
    }
    Ok(out)
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    let mut out = Vec::new();
    for theorem in TheoremId::ALL {
        out.extend(run_suite(theorem, cfg)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// margin-vs-eccentricity sweep (plot data)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub theorem: TheoremId,
    pub eccentricity: f64,
    pub report: VerificationReport,
}

/// Margins of every inequality as one body is stretched from a ball
/// (eccentricity 1) to axis ratio 3.
pub fn margin_sweep(dim: usize, steps: usize) -> Result<Vec<SweepRow>> {
    let rule = sweep_rule(dim)?;
    let mut rows = Vec::new();
    for i in 0..steps {
        let ecc = 1.0 + 2.0 * i as f64 / (steps.max(2) - 1) as f64;
        let mut axes = vec![1.0; dim];
        axes[0] = ecc;
        let stretched = StarBody::ellipsoid(axes)?;
        let ball = StarBody::unit_ball(dim)?;

        let phi = OrliczBivariate::power_sum_decreasing(dim as f64 + 1.0, 2)?;
        rows.push(SweepRow {
            theorem: TheoremId::DualOBM,
            eccentricity: ecc,
            report: verify_dual_obm(&phi, &ball, &stretched, &rule, Curvature::Convex)?,
        });

        let t = OrliczUnivariate::power(1.0)?;
        let spec = LinearOrliczSpec::new(1.0, 1.0, t.clone(), t.clone())?;
        rows.push(SweepRow {
            theorem: TheoremId::LinearDualOBM,
            eccentricity: ecc,
            report: verify_linear_dual_obm(&spec, &ball, &stretched, &rule, Curvature::Convex)?,
        });

        let phi_min = OrliczUnivariate::power(1.0)?.with_class(UnivariateClass::Phi);
        rows.push(SweepRow {
            theorem: TheoremId::DualMinkowski,
            eccentricity: ecc,
            report: verify_dual_minkowski(&phi_min, &stretched, &ball, &rule)?,
        });

        rows.push(SweepRow {
            theorem: TheoremId::Isoperimetric,
            eccentricity: ecc,
            report: verify_isoperimetric(&phi_min, &stretched, &rule)?,
        });

        rows.push(SweepRow {
            theorem: TheoremId::Urysohn,
            eccentricity: ecc,
            report: verify_urysohn(&phi_min, &stretched, &rule)?,
        });

        let sq = OrliczUnivariate::power(2.0)?;
        rows.push(SweepRow {
            theorem: TheoremId::Comparison,
            eccentricity: ecc,
            report: verify_comparison(&sq, &t, &stretched, &ball, &rule, Curvature::Convex)?,
        });

        let mut diag = vec![1.0; dim];
        diag[0] = ecc;
        diag[1] = 1.0 / ecc;
        let map = LinearMap::diagonal(&diag)?;
        let body = StarBody::ellipsoid({
            let mut a = vec![0.9; dim];
            a[0] = 1.3;
            a
        })?;
        rows.push(SweepRow {
            theorem: TheoremId::SLInvariance,
            eccentricity: ecc,
            report: verify_sl_invariance(&t, &body, &ball, &map, &rule)?,
        });
    }
    Ok(rows)
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("theorem_id,eccentricity,lhs,rhs,margin,tolerance,verdict,lambda_estimate\n");
    for row in rows {
        let r = &row.report;
        let lambda = match r.equality_diagnosis.and_then(|d| d.lambda) {
            Some(l) => format!("{l:.16e}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            r.theorem.as_str(),
            row.eccentricity,
            r.lhs,
            r.rhs,
            r.margin,
            r.tolerance,
            r.verdict.as_str(),
            lambda
        ));
    }
    out
}
