//! Dual functionals built on the radial quadrature: the `L_φ`-dual
//! mixed volume
//!
//! ```text
//! Ṽ_φ(K, L) = (1/n) ∫ φ(ρ_K/ρ_L) ρ_K^n dσ
//! ```
//!
//! its specializations (dual surface area `S̃_φ(K) = n·Ṽ_φ(K, B)`, the
//! harmonic mean radius `ω̃_φ(K) = Ṽ_φ(B, K)/ω_n`), and the one-sided
//! first variation of volume along the ε-perturbation sum, whose limit
//! recovers `Ṽ_{φ₂}(K, L)/φ₁'(1)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::orlicz_functions::{DerivativeEstimate, OrliczUnivariate, Side, UnivariateClass};
use crate::radial_addition::epsilon_sum;
use crate::spherical_quadrature::{
    integrate, unit_ball_volume, volume, FunctionalValue, QuadratureRule,
};
use crate::star_bodies::StarBody;

/// Step schedule for the first variation; halved twice from 1e-2.
pub const DEFAULT_EPSILONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `Ṽ_φ(K, L)` by quadrature. `φ` only needs to be continuous and
/// positive on the range of `ρ_K/ρ_L`.
pub fn dual_mixed_volume(
    phi: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
) -> Result<FunctionalValue> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    let n = k.dim();
    let fv = integrate(
        |u| {
            let rk = k.radius(u)?;
            let rl = l.radius(u)?;
            let ratio = rk / rl;
            let v = phi.eval(ratio);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "dual mixed volume integrand".into(),
                    detail: format!("φ({ratio}) = {v}"),
                });
            }
            Ok(v * rk.powi(n as i32))
        },
        rule,
    )?;
    Ok(FunctionalValue {
        value: fv.value / n as f64,
        error_estimate: fv.error_estimate / n as f64,
        rule: fv.rule,
    })
}

/// `S̃_φ(K) = n · Ṽ_φ(K, B^n)`.
pub fn dual_surface_area(
    phi: &OrliczUnivariate,
    k: &StarBody,
    rule: &QuadratureRule,
) -> Result<FunctionalValue> {
    let ball = StarBody::unit_ball(k.dim())?;
    let fv = dual_mixed_volume(phi, k, &ball, rule)?;
    Ok(FunctionalValue {
        value: fv.value * k.dim() as f64,
        error_estimate: fv.error_estimate * k.dim() as f64,
        rule: fv.rule,
    })
}

/// `ω̃_φ(K) = (1/(n·ω_n)) ∫ φ(1/ρ_K) dσ`, cross-checked against its
/// equivalent form `Ṽ_φ(B, K)/ω_n`.
pub fn harmonic_mean_radius(
    phi: &OrliczUnivariate,
    k: &StarBody,
    rule: &QuadratureRule,
) -> Result<FunctionalValue> {
    let n = k.dim();
    let omega = unit_ball_volume(n);
    let fv = integrate(
        |u| {
            let rk = k.radius(u)?;
            let v = phi.eval(1.0 / rk);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "harmonic mean radius integrand".into(),
                    detail: format!("φ(1/ρ) = φ({}) = {v}", 1.0 / rk),
                });
            }
            Ok(v)
        },
        rule,
    )?;
    let value = fv.value / (n as f64 * omega);
    let error_estimate = fv.error_estimate / (n as f64 * omega);

    let ball = StarBody::unit_ball(n)?;
    let cross = dual_mixed_volume(phi, &ball, k, rule)?.value / omega;
    if (value - cross).abs() > 1e-10 * value.abs().max(1.0) {
        return Err(Error::InternalCheck(format!(
            "harmonic mean radius forms disagree: integral {value} vs mixed-volume {cross}"
        )));
    }
    Ok(FunctionalValue {
        value,
        error_estimate,
        rule: fv.rule,
    })
}

/// Difference quotients of `|K| − |K +̃_ε L|` over a step schedule,
/// extrapolated to `ε → 0`. The limit times `φ₁'(1)` recovers
/// `Ṽ_{φ₂}(K, L)`; `target` stores the side-specific value
/// `Ṽ_{φ₂}(K, L)/φ₁'(1)` the extrapolation should reach.
#[derive(Debug, Clone)]
pub struct VariationEstimate {
    pub epsilons: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolated_limit: f64,
    pub target: f64,
    pub derivative: DerivativeEstimate,
    pub side: Side,
    /// `Ṽ_{φ₂}(K, L)` used to form the target.
    pub dual_mixed_volume: FunctionalValue,
}

impl VariationEstimate {
    /// Relative gap between the extrapolated limit and the target.
    pub fn relative_error(&self) -> f64 {
        (self.extrapolated_limit - self.target).abs() / self.target.abs().max(1e-300)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "epsilons": self.epsilons,
            "quotients": self.quotients,
            "extrapolated_limit": self.extrapolated_limit,
            // the limit theorem gives no rate; polynomial behavior in ε
            // is an assumption of this estimator
            "extrapolation": "neville_polynomial_in_epsilon_assumed",
            "target": self.target,
            "derivative": {
                "value": self.derivative.value,
                "error_estimate": self.derivative.error_estimate,
                "analytic": self.derivative.analytic,
                "side": self.side.to_string(),
            },
            "dual_mixed_volume": self.dual_mixed_volume.to_json(),
        })
    }
}

/// First variation of volume along `ε ↦ K +̃_{ε,φ₁,φ₂} L`.
///
/// Both parts must share a tilde class: the increasing class uses the
/// left derivative of `φ₁` at 1, the decreasing class the right
/// derivative.
pub fn first_variation(
    phi1: &OrliczUnivariate,
    phi2: &OrliczUnivariate,
    k: &StarBody,
    l: &StarBody,
    rule: &QuadratureRule,
    epsilons: &[f64],
) -> Result<VariationEstimate> {
    let side = match (phi1.class(), phi2.class()) {
        (UnivariateClass::PhiTilde1, UnivariateClass::PhiTilde1) => Side::Left,
        (UnivariateClass::PsiTilde1, UnivariateClass::PsiTilde1) => Side::Right,
        (c1, c2) => {
            return Err(Error::ClassViolation(format!(
                "first variation needs matching tilde classes, got {c1:?} and {c2:?}"
            )))
        }
    };
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("epsilon schedule is empty".into()));
    }
    for pair in epsilons.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidParameter(
                "epsilon schedule must be strictly decreasing".into(),
            ));
        }
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidParameter(
            "epsilon schedule must be positive".into(),
        ));
    }

    let derivative = phi1.derivative_at_one(side)?;
    if !derivative.value.is_finite() || derivative.value == 0.0 {
        return Err(Error::DerivativeUnavailable {
            side: side.to_string(),
            detail: format!("derivative {} cannot scale the limit", derivative.value),
        });
    }

    let n = k.dim() as f64;
    let vol_k = volume(k, rule)?;
    let mut quotients = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let body = epsilon_sum(phi1, phi2, k, l, eps)?;
        let vol_eps = volume(&body, rule)?;
        let q = (vol_k.value - vol_eps.value) / (n * eps);
        if !q.is_finite() {
            return Err(Error::NonFinite {
                context: "first variation quotient".into(),
                detail: format!("quotient at ε = {eps} is {q}"),
            });
        }
        quotients.push(q);
    }

    let extrapolated_limit = extrapolate_to_zero(epsilons, &quotients);
    let mixed = dual_mixed_volume(phi2, k, l, rule)?;
    let target = mixed.value / derivative.value;

    Ok(VariationEstimate {
        epsilons: epsilons.to_vec(),
        quotients,
        extrapolated_limit,
        target,
        derivative,
        side,
        dual_mixed_volume: mixed,
    })
}

/// Neville polynomial extrapolation of `(x_i, y_i)` to `x = 0`.
fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut t = ys.to_vec();
    let n = t.len();
    for j in 1..n {
        for i in 0..n - j {
            t[i] = (xs[i + j] * t[i] - xs[i] * t[i + 1]) / (xs[i + j] - xs[i]);
        }
    }
    t[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_rule() -> QuadratureRule {
        QuadratureRule::circle(2048).unwrap()
    }

    /// Independent dense trapezoid oracle for planar angular integrals.
    fn dense_angular_integral<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n).map(|i| f(h * i as f64) * h).sum()
    }

    fn ellipse_radius(a: f64, b: f64, theta: f64) -> f64 {
        ((theta.cos() / a).powi(2) + (theta.sin() / b).powi(2))
            .sqrt()
            .recip()
    }

    #[test]
    fn constant_weight_recovers_first_volume() {
        let rule = circle_rule();
        let one = OrliczUnivariate::constant(1.0).unwrap();
        let k = StarBody::ellipsoid(vec![1.7, 0.6]).unwrap();
        let l = StarBody::lp_ball(2, 3.0, 1.1).unwrap();
        let mv = dual_mixed_volume(&one, &k, &l, &rule).unwrap();
        let vk = volume(&k, &rule).unwrap();
        assert!((mv.value - vk.value).abs() <= 1e-12 * vk.value);
    }

    #[test]
    fn inverse_nth_power_recovers_second_volume() {
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(-2.0).unwrap();
        let k = StarBody::ellipsoid(vec![1.7, 0.6]).unwrap();
        let l = StarBody::lp_ball(2, 3.0, 1.1).unwrap();
        let mv = dual_mixed_volume(&phi, &k, &l, &rule).unwrap();
        let vl = volume(&l, &rule).unwrap();
        assert!((mv.value - vl.value).abs() <= 1e-12 * vl.value);
    }

    #[test]
    fn ball_pair_closed_form() {
        // Ṽ_φ(rB, sB) = φ(r/s)·rⁿ·ω_n
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(1.0).unwrap();
        let k = StarBody::ball(2, 2.0).unwrap();
        let l = StarBody::ball(2, 1.0).unwrap();
        let mv = dual_mixed_volume(&phi, &k, &l, &rule).unwrap();
        assert!((mv.value - 8.0 * PI).abs() <= 1e-12 * 8.0 * PI);
    }

    #[test]
    fn surface_area_of_ball() {
        // S̃_φ(rB) = φ(r)·n·|rB|
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(1.0).unwrap();
        let k = StarBody::ball(2, 2.0).unwrap();
        let s = dual_surface_area(&phi, &k, &rule).unwrap();
        assert!((s.value - 2.0 * 2.0 * 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn surface_area_of_ellipse_against_dense_oracle() {
        // φ = t²: S̃(K) = ∫ ρ⁴ dθ, which is 10π for semi-axes (2, 1)
        let oracle = dense_angular_integral(|t| ellipse_radius(2.0, 1.0, t).powi(4), 1_000_000);
        assert!((oracle - 10.0 * PI).abs() < 1e-9, "oracle {oracle}");

        let rule = circle_rule();
        let phi = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ellipsoid(vec![2.0, 1.0]).unwrap();
        let s = dual_surface_area(&phi, &k, &rule).unwrap();
        assert!((s.value - 10.0 * PI).abs() < 1e-9, "value {}", s.value);
    }

    #[test]
    fn surface_area_homogeneity() {
        // S̃_p(λK) = λ^{n+p}·S̃_p(K)
        let rule = circle_rule();
        let k = StarBody::ellipsoid(vec![1.3, 0.7]).unwrap();
        for p in [-1.0, 1.0, 2.0] {
            let phi = OrliczUnivariate::power(p).unwrap();
            let base = dual_surface_area(&phi, &k, &rule).unwrap();
            for lambda in [0.5, 1.7] {
                let scaled = dual_surface_area(&phi, &k.dilate(lambda).unwrap(), &rule).unwrap();
                let predicted = lambda.powf(2.0 + p) * base.value;
                assert!(
                    (scaled.value - predicted).abs() <= 1e-9 * predicted.abs(),
                    "p = {p}, λ = {lambda}"
                );
            }
        }
    }

    #[test]
    fn harmonic_mean_radius_of_ball() {
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ball(2, 4.0).unwrap();
        let w = harmonic_mean_radius(&phi, &k, &rule).unwrap();
        assert!((w.value - phi.eval(0.25)).abs() < 1e-12);
    }

    #[test]
    fn ball_pair_closed_form_on_sphere_and_monte_carlo() {
        // same anchor through the other two rule kinds
        let phi = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ball(3, 1.5).unwrap();
        let l = StarBody::ball(3, 0.8).unwrap();
        let predicted =
            phi.eval(1.5 / 0.8) * 1.5f64.powi(3) * crate::spherical_quadrature::unit_ball_volume(3);
        let rule = QuadratureRule::sphere_product(32, 64).unwrap();
        let mv = dual_mixed_volume(&phi, &k, &l, &rule).unwrap();
        assert!((mv.value - predicted).abs() < 1e-10 * predicted);

        let k4 = StarBody::ball(4, 1.5).unwrap();
        let l4 = StarBody::ball(4, 0.8).unwrap();
        let predicted =
            phi.eval(1.5 / 0.8) * 1.5f64.powi(4) * crate::spherical_quadrature::unit_ball_volume(4);
        let mc = QuadratureRule::monte_carlo(4, 20_000, 9).unwrap();
        let mv = dual_mixed_volume(&phi, &k4, &l4, &mc).unwrap();
        // constant integrand: exact regardless of sample placement
        assert!((mv.value - predicted).abs() < 1e-12 * predicted);
    }

    #[test]
    fn ellipsoid_mixed_volume_in_dimension_three() {
        // Ṽ_1(K, L) = |K| = (4π/3)·abc for an ellipsoid
        let rule = QuadratureRule::sphere_product(64, 128).unwrap();
        let one = OrliczUnivariate::constant(1.0).unwrap();
        let k = StarBody::ellipsoid(vec![1.5, 1.0, 0.5]).unwrap();
        let l = StarBody::ball(3, 1.0).unwrap();
        let mv = dual_mixed_volume(&one, &k, &l, &rule).unwrap();
        let predicted = 4.0 * PI / 3.0 * 1.5 * 1.0 * 0.5;
        assert!(
            (mv.value - predicted).abs() < 1e-6,
            "{} vs {predicted}",
            mv.value
        );
    }

    #[test]
    fn mean_radius_of_equal_volume_ball() {
        // ω̃_φ(B_K) = φ(ω_n^{1/n}·|K|^{-1/n})
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ellipsoid(vec![2.0, 1.0]).unwrap();
        let bk = k.ball_equivalent(&rule).unwrap();
        let w = harmonic_mean_radius(&phi, &bk, &rule).unwrap();
        let vk = volume(&k, &rule).unwrap().value;
        let predicted = phi.eval((crate::spherical_quadrature::unit_ball_volume(2) / vk).sqrt());
        assert!((w.value - predicted).abs() < 1e-10);
    }

    #[test]
    fn mean_radius_via_reciprocal_transform() {
        // the plain mean radius (1/(nω_n))∫φ(ρ) dσ is the harmonic mean
        // radius of the reciprocal transform of φ
        let rule = circle_rule();
        let phi = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ball(2, 2.0).unwrap();
        let w = harmonic_mean_radius(&phi.tilde(), &k, &rule).unwrap();
        assert!((w.value - phi.eval(2.0)).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_radius_of_ellipse_against_dense_oracle() {
        // (1/2π) ∫ ρ⁻¹ dθ for semi-axes (2, 1/2); frozen from the oracle
        let frozen = 1.365_298_229_443_361_7;
        let oracle =
            dense_angular_integral(|t| 1.0 / ellipse_radius(2.0, 0.5, t), 1_000_000) / (2.0 * PI);
        assert!((oracle - frozen).abs() < 1e-9, "oracle {oracle}");

        let rule = circle_rule();
        let phi = OrliczUnivariate::power(1.0).unwrap();
        let k = StarBody::ellipsoid(vec![2.0, 0.5]).unwrap();
        let w = harmonic_mean_radius(&phi, &k, &rule).unwrap();
        assert!((w.value - frozen).abs() < 1e-9, "value {}", w.value);
    }

    #[test]
    fn mixed_volume_of_eccentric_pair_against_dense_oracle() {
        // Ṽ_t(ellipse(2, 1/2), B) = (1/2) ∫ ρ³ dθ; frozen from the oracle
        let frozen = 4.289_210_887_578_417;
        let oracle =
            dense_angular_integral(|t| ellipse_radius(2.0, 0.5, t).powi(3), 1_000_000) / 2.0;
        assert!((oracle - frozen).abs() < 1e-9, "oracle {oracle}");

        let rule = circle_rule();
        let phi = OrliczUnivariate::power(1.0).unwrap();
        let k = StarBody::ellipsoid(vec![2.0, 0.5]).unwrap();
        let l = StarBody::unit_ball(2).unwrap();
        let mv = dual_mixed_volume(&phi, &k, &l, &rule).unwrap();
        assert!((mv.value - frozen).abs() < 1e-9, "value {}", mv.value);
    }

    #[test]
    fn first_variation_on_unit_balls() {
        // analytic ε-sum of unit balls: ρ = 1/(1+ε), so the quotient
        // tends to π and the target is Ṽ_t(B,B) = π
        let rule = circle_rule();
        let t = OrliczUnivariate::power(1.0).unwrap();
        let b = StarBody::unit_ball(2).unwrap();
        let est = first_variation(&t, &t, &b, &b, &rule, &DEFAULT_EPSILONS).unwrap();
        assert_eq!(est.side, Side::Left);
        assert!((est.target - PI).abs() < 1e-10);
        assert!(
            (est.derivative.value * est.extrapolated_limit - PI).abs() < 1e-5 * PI,
            "extrapolated {}",
            est.extrapolated_limit
        );
    }

    #[test]
    fn first_variation_decreasing_class() {
        // 1/ρ + ε/ρ = 1 gives ρ = 1 + ε: the quotient tends to -π and
        // the right derivative -1 recovers Ṽ = π
        let rule = circle_rule();
        let inv = OrliczUnivariate::power(-1.0).unwrap();
        let b = StarBody::unit_ball(2).unwrap();
        let est = first_variation(&inv, &inv, &b, &b, &rule, &DEFAULT_EPSILONS).unwrap();
        assert_eq!(est.side, Side::Right);
        assert_eq!(est.derivative.value, -1.0);
        assert!((est.target + PI).abs() < 1e-10);
        assert!((est.extrapolated_limit + PI).abs() < 1e-5 * PI);
        assert!((est.derivative.value * est.extrapolated_limit - PI).abs() < 1e-5 * PI);
    }

    #[test]
    fn first_variation_scaled_balls() {
        // K = 2B, L = B with φ = t²: target Ṽ_{t²}(K, L)/φ'(1) = 16π/2
        let rule = circle_rule();
        let sq = OrliczUnivariate::power(2.0).unwrap();
        let k = StarBody::ball(2, 2.0).unwrap();
        let l = StarBody::unit_ball(2).unwrap();
        let est = first_variation(&sq, &sq, &k, &l, &rule, &DEFAULT_EPSILONS).unwrap();
        assert!((est.dual_mixed_volume.value - 16.0 * PI).abs() < 1e-9);
        assert!(est.relative_error() < 1e-5);
    }

    #[test]
    fn first_variation_rejects_mismatched_classes() {
        let rule = circle_rule();
        let up = OrliczUnivariate::power(1.0).unwrap();
        let down = OrliczUnivariate::power(-1.0).unwrap();
        let b = StarBody::unit_ball(2).unwrap();
        assert!(first_variation(&up, &down, &b, &b, &rule, &DEFAULT_EPSILONS).is_err());
    }

    #[test]
    fn first_variation_rejects_bad_schedule() {
        let rule = circle_rule();
        let t = OrliczUnivariate::power(1.0).unwrap();
        let b = StarBody::unit_ball(2).unwrap();
        assert!(first_variation(&t, &t, &b, &b, &rule, &[]).is_err());
        assert!(first_variation(&t, &t, &b, &b, &rule, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn extrapolation_is_exact_on_polynomials() {
        let xs = [0.01, 0.005, 0.0025];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 7.0 * x * x).collect();
        let v = extrapolate_to_zero(&xs, &ys);
        assert!((v - 3.0).abs() < 1e-12);
    }
}
