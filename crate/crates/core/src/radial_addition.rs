//! Implicit radial additions of star bodies.
//!
//! The m-ary Orlicz radial sum of bodies `K_1, …, K_m` has, in every
//! direction `u`, the radius `c` solving
//! `φ(c/ρ_{K_1}(u), …, c/ρ_{K_m}(u)) = 1`. For a generator in the
//! increasing class the left side grows strictly from 0, for the
//! decreasing class it falls strictly from +∞, so `c` is unique and
//! pinned inside `[τ·min ρ_i, τ·max ρ_i]` where `τ` is the diagonal
//! root `φ(τ, …, τ) = 1`. That bracket makes every per-direction solve
//! a safeguarded scalar root find.
//!
//! The linear combination `α·φ₁(c/ρ_K) + β·φ₂(c/ρ_L) = 1` and its
//! `α = 1, β = ε` perturbation are handled by the same machinery, and
//! the power-sum case has a closed form kept as an independent
//! cross-check of the solver.

use crate::error::{Error, Result};
use crate::orlicz_functions::{OrliczBivariate, OrliczUnivariate, ProbeGrid, UnivariateClass};
use crate::roots;
use crate::star_bodies::{detect_dilate, StarBody};

/// One radial solve instance: a validated generator, positive radii,
/// and the cached diagonal root.
#[derive(Debug, Clone)]
pub struct RadialSolveProblem {
    pub phi: OrliczBivariate,
    pub radii: Vec<f64>,
    pub tau: f64,
}

impl RadialSolveProblem {
    pub fn new(phi: OrliczBivariate, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != phi.arity() {
            return Err(Error::DimensionMismatch {
                expected: phi.arity(),
                got: radii.len(),
            });
        }
        if radii.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "radii must be positive and finite, got {radii:?}"
            )));
        }
        let tau = phi.solve_tau()?;
        Ok(Self { phi, radii, tau })
    }
}

/// Unique root `c` of `φ(c/a_1, …, c/a_m) = 1`.
pub fn solve_radial(problem: &RadialSolveProblem) -> Result<f64> {
    solve_radial_values(&problem.phi, problem.tau, &problem.radii)
}

pub(crate) fn solve_radial_values(phi: &OrliczBivariate, tau: f64, radii: &[f64]) -> Result<f64> {
    let mut amin = f64::INFINITY;
    let mut amax: f64 = 0.0;
    for &a in radii {
        amin = amin.min(a);
        amax = amax.max(a);
    }
    if amin == amax {
        // diagonal case: the root is τ·a by definition of τ
        return Ok(tau * amin);
    }
    let g = |x: f64| {
        let args: Vec<f64> = radii.iter().map(|&a| x / a).collect();
        phi.eval(&args)
    };
    // widen the exact bracket [τ·min, τ·max] a hair so endpoint rounding
    // cannot spoil the sign change
    let lo = tau * amin * (1.0 - 1e-9);
    let hi = tau * amax * (1.0 + 1e-9);
    match roots::solve_level(g, 1.0, lo, hi) {
        Ok(r) => Ok(r.root),
        Err(Error::BracketFailure { .. }) => Err(Error::BracketFailure {
            lo: tau * amin,
            hi: tau * amax,
            g_lo: g(tau * amin),
            g_hi: g(tau * amax),
        }),
        Err(e) => Err(e),
    }
}

/// Orlicz radial sum of `m ≥ 2` star bodies. The generator is checked
/// against its declared class before any solve; the diagonal root is
/// computed once and cached in the node.
pub fn orlicz_radial_sum(phi: &OrliczBivariate, bodies: &[StarBody]) -> Result<StarBody> {
    if bodies.len() != phi.arity() || bodies.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "generator arity {} does not match body count {}",
            phi.arity(),
            bodies.len()
        )));
    }
    let dim = bodies[0].dim();
    for b in bodies {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
    }
    let report = phi.validate(&ProbeGrid::log_default());
    if !report.is_clean() {
        return Err(Error::ClassViolation(format!(
            "generator fails class validation: {}",
            report.violations[0].detail
        )));
    }
    let tau = phi.solve_tau()?;

    // a recognized dilate pair has a direction-independent ratio
    let dilate_ratio = if bodies.len() == 2 {
        match detect_dilate(&bodies[0], &bodies[1]) {
            Some(lambda) => Some(solve_radial_values(phi, tau, &[1.0, lambda])?),
            None => None,
        }
    } else {
        None
    };

    Ok(StarBody::orlicz_sum_node(
        dim,
        phi.clone(),
        tau,
        bodies.to_vec(),
        dilate_ratio,
    ))
}

/// Closed-form p-radial sum `ρ = (ρ_K^p + ρ_L^p)^{1/p}`, valid for any
/// nonzero real `p`. Independent of the implicit solver; used to
/// cross-check it on power-sum generators.
pub fn p_radial_sum_closed_form(p: f64, k: &StarBody, l: &StarBody) -> Result<StarBody> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "p-radial exponent must be finite and nonzero, got {p}"
        )));
    }
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    let (k, l) = (k.clone(), l.clone());
    let dim = k.dim();
    StarBody::custom_radial_fallible(dim, "p_radial_closed_form", move |u| {
        let a = k.radius(u)?;
        let b = l.radius(u)?;
        Ok((a.powf(p) + b.powf(p)).powf(1.0 / p))
    })
}

/// Coefficients and parts of the linear combination
/// `α·φ₁(x/a) + β·φ₂(x/b) = 1`, with the diagonal root cached.
#[derive(Debug, Clone)]
pub struct LinearOrliczSpec {
    alpha: f64,
    beta: f64,
    phi1: OrliczUnivariate,
    phi2: OrliczUnivariate,
    class: UnivariateClass,
    tau: f64,
}

impl LinearOrliczSpec {
    pub fn new(
        alpha: f64,
        beta: f64,
        phi1: OrliczUnivariate,
        phi2: OrliczUnivariate,
    ) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coefficients must be positive and finite, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if alpha + beta < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "coefficients must satisfy alpha + beta >= 1, got {}",
                alpha + beta
            )));
        }
        let class = match (phi1.class(), phi2.class()) {
            (UnivariateClass::PhiTilde1, UnivariateClass::PhiTilde1) => UnivariateClass::PhiTilde1,
            (UnivariateClass::PsiTilde1, UnivariateClass::PsiTilde1) => UnivariateClass::PsiTilde1,
            (c1, c2) => {
                return Err(Error::ClassViolation(format!(
                    "parts must both be PhiTilde1 or both PsiTilde1, got {c1:?} and {c2:?}"
                )))
            }
        };
        let grid = ProbeGrid::log_default();
        for (name, f) in [("phi1", &phi1), ("phi2", &phi2)] {
            let report = f.validate(&grid, 2);
            if !report.is_clean() {
                return Err(Error::ClassViolation(format!(
                    "{name} fails class validation: {}",
                    report.violations[0].detail
                )));
            }
        }

        let g = |t: f64| alpha * phi1.eval(t) + beta * phi2.eval(t);
        let tau = match class {
            UnivariateClass::PhiTilde1 => {
                let hi = roots::expand_upward(g, 1.0, |v| v >= 1.0)?;
                roots::solve_level(g, 1.0, 0.0, hi)?.root
            }
            _ => {
                let lo = roots::expand_downward(g, 1.0, |v| v >= 1.0)?;
                let hi = roots::expand_upward(g, lo.max(1.0), |v| v <= 1.0)?;
                roots::solve_level(g, 1.0, lo, hi)?.root
            }
        };
        Ok(Self {
            alpha,
            beta,
            phi1,
            phi2,
            class,
            tau,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi1(&self) -> &OrliczUnivariate {
        &self.phi1
    }

    pub fn phi2(&self) -> &OrliczUnivariate {
        &self.phi2
    }

    /// Shared tilde class of the two parts.
    pub fn class(&self) -> UnivariateClass {
        self.class
    }

    /// Diagonal root: `α·φ₁(τ) + β·φ₂(τ) = 1`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, x: f64, a: f64, b: f64) -> f64 {
        self.alpha * self.phi1.eval(x / a) + self.beta * self.phi2.eval(x / b)
    }

    /// Root of the combination for radii `(a, b)`.
    pub(crate) fn solve(&self, a: f64, b: f64) -> Result<f64> {
        let amin = a.min(b);
        let amax = a.max(b);
        if amin == amax {
            return Ok(self.tau * amin);
        }
        let g = |x: f64| self.eval(x, a, b);
        let lo = self.tau * amin * (1.0 - 1e-9);
        let hi = self.tau * amax * (1.0 + 1e-9);
        match roots::solve_level(g, 1.0, lo, hi) {
            Ok(r) => Ok(r.root),
            Err(Error::BracketFailure { .. }) => Err(Error::BracketFailure {
                lo: self.tau * amin,
                hi: self.tau * amax,
                g_lo: g(self.tau * amin),
                g_hi: g(self.tau * amax),
            }),
            Err(e) => Err(e),
        }
    }

    /// Direction-independent ratio when `L = λ·K`:
    /// `α·φ₁(τ₁) + β·φ₂(τ₁/λ) = 1`.
    pub fn dilate_ratio(&self, lambda: f64) -> Result<f64> {
        self.solve(1.0, lambda)
    }
}

/// Star body defined by `α·φ₁(ρ/ρ_K) + β·φ₂(ρ/ρ_L) = 1`.
pub fn linear_orlicz_sum(spec: &LinearOrliczSpec, k: &StarBody, l: &StarBody) -> Result<StarBody> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    let dilate_ratio = match detect_dilate(k, l) {
        Some(lambda) => Some(spec.dilate_ratio(lambda)?),
        None => None,
    };
    Ok(StarBody::linear_orlicz_sum_node(
        k.dim(),
        spec.clone(),
        k.clone(),
        l.clone(),
        dilate_ratio,
    ))
}

/// The `α = 1, β = ε` perturbation sum feeding the first-variation
/// limit. For `ε ≤ 1` it is sandwiched between the `ε = 1` sum and `K`
/// itself (inclusions reversed for decreasing-class parts).
pub fn epsilon_sum(
    phi1: &OrliczUnivariate,
    phi2: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    eps: f64,
) -> Result<StarBody> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {eps}"
        )));
    }
    let spec = LinearOrliczSpec::new(1.0, eps, phi1.clone(), phi2.clone())?;
    linear_orlicz_sum(&spec, k, l)
}
