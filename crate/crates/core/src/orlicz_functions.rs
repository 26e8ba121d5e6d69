//! Orlicz function classes: multivariate generators of radial additions
//! and univariate generators of dual mixed volumes.
//!
//! A bivariate (more generally m-variate) generator is either strictly
//! increasing in every coordinate with `φ(0) = 0` and `φ(e_i) = 1`
//! (class `PhiTilde`), or its coordinate-reciprocal transform is
//! (class `PsiTilde`). Univariate generators additionally carry the
//! classes `Phi` / `Psi`, decided by the shape of `F(t) = φ(t^{-1/n})`:
//! convex-or-constant for `Phi`, increasing concave-or-constant for
//! `Psi`.
//!
//! Class membership of user-supplied functions is not decidable from a
//! black box, so it is checked by deterministic sampling probes on a
//! log-spaced grid and otherwise taken on declaration. Built-in
//! descriptors (power functions, power sums, `arctan(t^-n)`,
//! `ln(1+t^-n)`, weighted sums) carry exact class tags and analytic
//! one-sided derivatives at 1.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::roots;

/// Side of a one-sided limit or derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BivariateClass {
    /// Strictly increasing in each coordinate, `φ(0) = 0`, `φ(e_i) = 1`.
    PhiTilde,
    /// Coordinate-reciprocal transform lies in `PhiTilde`.
    PsiTilde,
}

impl BivariateClass {
    pub fn flipped(self) -> Self {
        match self {
            BivariateClass::PhiTilde => BivariateClass::PsiTilde,
            BivariateClass::PsiTilde => BivariateClass::PhiTilde,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnivariateClass {
    /// `F(t) = φ(t^{-1/n})` constant or convex.
    Phi,
    /// `F(t)` constant or increasing concave.
    Psi,
    /// Univariate member of the increasing tilde class.
    PhiTilde1,
    /// Univariate member of the decreasing tilde class.
    PsiTilde1,
    Unclassified,
}

// ---------------------------------------------------------------------------
// univariate functions
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum UnivariateKind {
    /// `t^p`
    Power {
        p: f64,
    },
    /// `arctan(t^{-n})`
    ArctanInv {
        n: f64,
    },
    /// `ln(1 + t^{-n})`
    Log1pInv {
        n: f64,
    },
    Constant {
        c: f64,
    },
    /// `t ↦ source(1/t)`
    Tilde {
        source: Box<OrliczUnivariate>,
    },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

#[derive(Clone)]
pub struct OrliczUnivariate {
    kind: UnivariateKind,
    class: UnivariateClass,
}

impl fmt::Debug for OrliczUnivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrliczUnivariate({}, {:?})", self.describe(), self.class)
    }
}

/// Result of a one-sided derivative query at 1.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub analytic: bool,
}

impl OrliczUnivariate {
    /// `t^p`; increasing powers default to the increasing tilde class,
    /// decreasing powers to its reciprocal class.
    pub fn power(p: f64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be finite and nonzero, got {p}"
            )));
        }
        let class = if p > 0.0 {
            UnivariateClass::PhiTilde1
        } else {
            UnivariateClass::PsiTilde1
        };
        Ok(Self {
            kind: UnivariateKind::Power { p },
            class,
        })
    }

    /// `arctan(t^{-n})`. With `n` equal to the ambient dimension this is
    /// the canonical increasing-concave-shape example, hence class `Psi`.
    pub fn arctan_inv(n: f64) -> Self {
        Self {
            kind: UnivariateKind::ArctanInv { n },
            class: UnivariateClass::Psi,
        }
    }

    /// `ln(1 + t^{-n})`; class `Psi` for the same reason as `arctan_inv`.
    pub fn log1p_inv(n: f64) -> Self {
        Self {
            kind: UnivariateKind::Log1pInv { n },
            class: UnivariateClass::Psi,
        }
    }

    /// Constant positive function; its shape transform is constant, so it
    /// belongs to both shape classes and is tagged `Phi` by convention.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "constant value must be finite and positive, got {c}"
            )));
        }
        Ok(Self {
            kind: UnivariateKind::Constant { c },
            class: UnivariateClass::Phi,
        })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: UnivariateKind::Custom { f: Arc::new(f) },
            class: UnivariateClass::Unclassified,
        }
    }

    /// Replaces the class tag. Tags are declarations; `validate` checks
    /// them against sampling probes.
    pub fn with_class(mut self, class: UnivariateClass) -> Self {
        self.class = class;
        self
    }

    pub fn class(&self) -> UnivariateClass {
        self.class
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            UnivariateKind::Power { p } => t.powf(*p),
            UnivariateKind::ArctanInv { n } => t.powf(-n).atan(),
            UnivariateKind::Log1pInv { n } => t.powf(-n).ln_1p(),
            UnivariateKind::Constant { c } => *c,
            UnivariateKind::Tilde { source } => source.eval(1.0 / t),
            UnivariateKind::Custom { f } => f(t),
        }
    }

    /// Coordinate-reciprocal transform `t ↦ φ(1/t)`. Built-in power-like
    /// descriptors flip exactly; applying the transform twice restores
    /// the original function.
    pub fn tilde(&self) -> Self {
        if let UnivariateKind::Tilde { source } = &self.kind {
            return (**source).clone();
        }
        let class = match self.class {
            UnivariateClass::PhiTilde1 => UnivariateClass::PsiTilde1,
            UnivariateClass::PsiTilde1 => UnivariateClass::PhiTilde1,
            _ => match &self.kind {
                UnivariateKind::Constant { .. } => self.class,
                _ => UnivariateClass::Unclassified,
            },
        };
        let kind = match &self.kind {
            UnivariateKind::Power { p } => UnivariateKind::Power { p: -p },
            UnivariateKind::ArctanInv { n } => UnivariateKind::ArctanInv { n: -n },
            UnivariateKind::Log1pInv { n } => UnivariateKind::Log1pInv { n: -n },
            UnivariateKind::Constant { c } => UnivariateKind::Constant { c: *c },
            UnivariateKind::Tilde { .. } => unreachable!(),
            UnivariateKind::Custom { .. } => UnivariateKind::Tilde {
                source: Box::new(self.clone()),
            },
        };
        Self { kind, class }
    }

    /// One-sided derivative at 1: analytic for built-in descriptors, a
    /// one-sided difference quotient with one Richardson step otherwise.
    pub fn derivative_at_one(&self, side: Side) -> Result<DerivativeEstimate> {
        let analytic = match &self.kind {
            UnivariateKind::Power { p } => Some(*p),
            UnivariateKind::ArctanInv { n } => Some(-n / 2.0),
            UnivariateKind::Log1pInv { n } => Some(-n / 2.0),
            UnivariateKind::Constant { .. } => Some(0.0),
            UnivariateKind::Tilde { source } => {
                // d/dt source(1/t) at 1 is -source'(1), with sides swapped
                let inner = source.derivative_at_one(side.flipped())?;
                return Ok(DerivativeEstimate {
                    value: -inner.value,
                    error_estimate: inner.error_estimate,
                    analytic: inner.analytic,
                });
            }
            UnivariateKind::Custom { .. } => None,
        };
        if let Some(value) = analytic {
            return Ok(DerivativeEstimate {
                value,
                error_estimate: 0.0,
                analytic: true,
            });
        }

        let h0 = 1e-4;
        let quotient = |h: f64| match side {
            Side::Left => (self.eval(1.0) - self.eval(1.0 - h)) / h,
            Side::Right => (self.eval(1.0 + h) - self.eval(1.0)) / h,
        };
        let d1 = quotient(h0);
        let d2 = quotient(h0 / 2.0);
        let value = 2.0 * d2 - d1;
        let error_estimate = (d2 - d1).abs();
        if !value.is_finite() {
            return Err(Error::DerivativeUnavailable {
                side: side.to_string(),
                detail: format!("difference quotients {d1}, {d2} do not yield a finite estimate"),
            });
        }
        Ok(DerivativeEstimate {
            value,
            error_estimate,
            analytic: false,
        })
    }

    /// Checks the declared class against sampling probes; `dim` supplies
    /// the exponent of the shape transform for the `Phi` / `Psi` tags.
    pub fn validate(&self, grid: &ProbeGrid, dim: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        match self.class {
            UnivariateClass::PhiTilde1 => {
                self.check_phi_tilde_1(grid, &mut report, "");
            }
            UnivariateClass::PsiTilde1 => {
                self.tilde().check_phi_tilde_1(grid, &mut report, "tilde: ");
            }
            UnivariateClass::Phi => {
                self.check_positive(grid, &mut report);
                let f = |t: f64| self.eval(t.powf(-1.0 / dim as f64));
                let probe = probe_shape_1d(f, &grid.points);
                if !probe.convex {
                    report.push(
                        ViolationKind::Shape,
                        format!(
                            "shape transform fails convexity probe (worst chord gap {:.3e})",
                            probe.min_gap
                        ),
                    );
                }
            }
            UnivariateClass::Psi => {
                self.check_positive(grid, &mut report);
                let f = |t: f64| self.eval(t.powf(-1.0 / dim as f64));
                let probe = probe_shape_1d(f, &grid.points);
                if !probe.concave {
                    report.push(
                        ViolationKind::Shape,
                        format!(
                            "shape transform fails concavity probe (worst chord gap {:.3e})",
                            probe.max_gap
                        ),
                    );
                }
                let (incr, _) = probe_increasing_1d(f, &grid.points);
                if !incr && !probe.constant {
                    report.push(
                        ViolationKind::Monotonicity,
                        "shape transform is not increasing on the probe grid".into(),
                    );
                }
            }
            UnivariateClass::Unclassified => {
                self.check_positive(grid, &mut report);
            }
        }
        report
    }

    fn check_positive(&self, grid: &ProbeGrid, report: &mut ValidationReport) {
        for &t in &grid.points {
            let v = self.eval(t);
            if !v.is_finite() {
                report.push(ViolationKind::NonFinite, format!("f({t}) = {v}"));
            } else if v <= 0.0 {
                report.push(ViolationKind::Sign, format!("f({t}) = {v} is not positive"));
            }
        }
    }

    fn check_phi_tilde_1(&self, grid: &ProbeGrid, report: &mut ValidationReport, prefix: &str) {
        let at0 = self.eval(0.0);
        if !(at0.abs() <= 1e-12) {
            report.push(
                ViolationKind::Normalization,
                format!("{prefix}f(0) = {at0}, expected 0"),
            );
        }
        let at1 = self.eval(1.0);
        if !((at1 - 1.0).abs() <= 1e-12) {
            report.push(
                ViolationKind::Normalization,
                format!("{prefix}f(1) = {at1}, expected 1"),
            );
        }
        let mut prev: Option<(f64, f64)> = None;
        let mut first: Option<f64> = None;
        let mut last: Option<f64> = None;
        for &t in &grid.points {
            let v = self.eval(t);
            if !v.is_finite() {
                report.push(ViolationKind::NonFinite, format!("{prefix}f({t}) = {v}"));
                prev = None;
                continue;
            }
            if v < 0.0 {
                report.push(
                    ViolationKind::Sign,
                    format!("{prefix}f({t}) = {v} is negative"),
                );
            }
            if let Some((tp, vp)) = prev {
                // ties at rounding scale are absorption, not violations
                if v < vp - increase_slack(v, vp) {
                    report.push(
                        ViolationKind::Monotonicity,
                        format!("{prefix}f({t}) = {v} drops below f({tp}) = {vp}"),
                    );
                }
            }
            prev = Some((t, v));
            if first.is_none() {
                first = Some(v);
            }
            last = Some(v);
        }
        if let (Some(a), Some(b)) = (first, last) {
            if b <= a + increase_slack(a, b) {
                report.push(
                    ViolationKind::Monotonicity,
                    format!("{prefix}not strictly increasing over the probe segment: f ranges {a} to {b}"),
                );
            }
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            UnivariateKind::Power { p } => format!("t^{p}"),
            UnivariateKind::ArctanInv { n } => format!("arctan(t^-{n})"),
            UnivariateKind::Log1pInv { n } => format!("ln(1+t^-{n})"),
            UnivariateKind::Constant { c } => format!("const {c}"),
            UnivariateKind::Tilde { source } => format!("tilde({})", source.describe()),
            UnivariateKind::Custom { .. } => "custom".into(),
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        let mut v = match &self.kind {
            UnivariateKind::Power { p } => json!({"kind": "power", "p": p}),
            UnivariateKind::ArctanInv { n } => json!({"kind": "arctan_inv", "n": n}),
            UnivariateKind::Log1pInv { n } => json!({"kind": "log1p_inv", "n": n}),
            UnivariateKind::Constant { c } => json!({"kind": "constant", "c": c}),
            UnivariateKind::Tilde { source } => {
                json!({"kind": "tilde", "source": source.to_json()?})
            }
            UnivariateKind::Custom { .. } => {
                return Err(Error::Json(
                    "custom functions have no serializable descriptor".into(),
                ))
            }
        };
        v["class"] = Value::String(class_name(self.class).into());
        Ok(v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = str_field(v, "kind")?;
        let mut f = match kind {
            "power" => OrliczUnivariate::power(f64_field(v, "p")?)?,
            "arctan_inv" => OrliczUnivariate::arctan_inv(f64_field(v, "n")?),
            "log1p_inv" => OrliczUnivariate::log1p_inv(f64_field(v, "n")?),
            "constant" => OrliczUnivariate::constant(f64_field(v, "c")?)?,
            "tilde" => {
                let source = v
                    .get("source")
                    .ok_or_else(|| Error::Json("tilde descriptor requires `source`".into()))?;
                OrliczUnivariate::from_json(source)?.tilde()
            }
            other => {
                return Err(Error::Json(format!("unknown univariate kind `{other}`")));
            }
        };
        if let Some(c) = v.get("class") {
            let name = c
                .as_str()
                .ok_or_else(|| Error::Json("`class` must be a string".into()))?;
            f = f.with_class(class_from_name(name)?);
        }
        Ok(f)
    }
}

fn class_name(c: UnivariateClass) -> &'static str {
    match c {
        UnivariateClass::Phi => "phi",
        UnivariateClass::Psi => "psi",
        UnivariateClass::PhiTilde1 => "phi_tilde",
        UnivariateClass::PsiTilde1 => "psi_tilde",
        UnivariateClass::Unclassified => "unclassified",
    }
}

fn class_from_name(s: &str) -> Result<UnivariateClass> {
    Ok(match s {
        "phi" => UnivariateClass::Phi,
        "psi" => UnivariateClass::Psi,
        "phi_tilde" => UnivariateClass::PhiTilde1,
        "psi_tilde" => UnivariateClass::PsiTilde1,
        "unclassified" => UnivariateClass::Unclassified,
        other => return Err(Error::Json(format!("unknown class `{other}`"))),
    })
}

// ---------------------------------------------------------------------------
// multivariate functions
// ---------------------------------------------------------------------------

type MultivariateFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum BivariateKind {
    /// `Σ x_i^exponent` with a signed exponent.
    PowerSum {
        exponent: f64,
    },
    /// `α·φ₁(x) + β·φ₂(y)`
    WeightedSum {
        alpha: f64,
        beta: f64,
        phi1: OrliczUnivariate,
        phi2: OrliczUnivariate,
    },
    Tilde {
        source: Box<OrliczBivariate>,
    },
    Custom {
        f: MultivariateFn,
    },
}

#[derive(Clone)]
pub struct OrliczBivariate {
    arity: usize,
    class: BivariateClass,
    kind: BivariateKind,
}

impl fmt::Debug for OrliczBivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "OrliczBivariate(m={}, {:?}, {})",
            self.arity,
            self.class,
            self.describe()
        )
    }
}

impl OrliczBivariate {
    /// `Σ x_i^exponent` with signed exponent: positive exponents give the
    /// increasing class, negative ones the decreasing class. Zero is
    /// rejected.
    pub fn power_sum(exponent: f64, m: usize) -> Result<Self> {
        if exponent == 0.0 || !exponent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power-sum exponent must be finite and nonzero, got {exponent}"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "power-sum arity must be at least 2, got {m}"
            )));
        }
        let class = if exponent > 0.0 {
            BivariateClass::PhiTilde
        } else {
            BivariateClass::PsiTilde
        };
        Ok(Self {
            arity: m,
            class,
            kind: BivariateKind::PowerSum { exponent },
        })
    }

    /// Increasing form `Σ x_i^p`, `p > 0`.
    pub fn power_sum_increasing(p: f64, m: usize) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "increasing power sum needs p > 0, got {p}"
            )));
        }
        Self::power_sum(p, m)
    }

    /// Decreasing form `Σ x_i^{-p}`, `p > 0`; the generator of the
    /// p-radial addition.
    pub fn power_sum_decreasing(p: f64, m: usize) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decreasing power sum needs p > 0, got {p}"
            )));
        }
        Self::power_sum(-p, m)
    }

    /// `α·φ₁(x) + β·φ₂(y)` with `α, β > 0`, `α + β ≥ 1`, and matching
    /// univariate tilde classes.
    pub fn weighted_sum(
        alpha: f64,
        beta: f64,
        phi1: OrliczUnivariate,
        phi2: OrliczUnivariate,
    ) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weights must be positive and finite, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if alpha + beta < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "weights must satisfy alpha + beta >= 1, got {}",
                alpha + beta
            )));
        }
        let class = match (phi1.class(), phi2.class()) {
            (UnivariateClass::PhiTilde1, UnivariateClass::PhiTilde1) => BivariateClass::PhiTilde,
            (UnivariateClass::PsiTilde1, UnivariateClass::PsiTilde1) => BivariateClass::PsiTilde,
            (c1, c2) => {
                return Err(Error::ClassViolation(format!(
                    "weighted-sum parts must share a tilde class, got {c1:?} and {c2:?}"
                )))
            }
        };
        Ok(Self {
            arity: 2,
            class,
            kind: BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            },
        })
    }

    pub fn custom<F>(m: usize, class: BivariateClass, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            arity: m,
            class,
            kind: BivariateKind::Custom { f: Arc::new(f) },
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn class(&self) -> BivariateClass {
        self.class
    }

    /// Weight/part view for linear combinations; `None` for other kinds.
    pub fn as_weighted_sum(&self) -> Option<(f64, f64, &OrliczUnivariate, &OrliczUnivariate)> {
        match &self.kind {
            BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            } => Some((*alpha, *beta, phi1, phi2)),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        match &self.kind {
            BivariateKind::PowerSum { exponent } => x.iter().map(|&xi| xi.powf(*exponent)).sum(),
            BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            } => alpha * phi1.eval(x[0]) + beta * phi2.eval(x[1]),
            BivariateKind::Tilde { source } => {
                let recip: Vec<f64> = x.iter().map(|&xi| 1.0 / xi).collect();
                source.eval(&recip)
            }
            BivariateKind::Custom { f } => f(x),
        }
    }

    fn eval_diagonal(&self, t: f64) -> f64 {
        let x = vec![t; self.arity];
        self.eval(&x)
    }

    /// Coordinate-reciprocal transform. Power sums flip their exponent
    /// exactly and a double application restores the source, so the
    /// transform is an involution by construction.
    pub fn tilde(&self) -> Self {
        match &self.kind {
            BivariateKind::PowerSum { exponent } => Self {
                arity: self.arity,
                class: self.class.flipped(),
                kind: BivariateKind::PowerSum {
                    exponent: -exponent,
                },
            },
            BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            } => Self {
                arity: self.arity,
                class: self.class.flipped(),
                kind: BivariateKind::WeightedSum {
                    alpha: *alpha,
                    beta: *beta,
                    phi1: phi1.tilde(),
                    phi2: phi2.tilde(),
                },
            },
            BivariateKind::Tilde { source } => (**source).clone(),
            BivariateKind::Custom { .. } => Self {
                arity: self.arity,
                class: self.class.flipped(),
                kind: BivariateKind::Tilde {
                    source: Box::new(self.clone()),
                },
            },
        }
    }

    /// The shape transform `(x₁, x₂) ↦ φ(x₁^{-1/n}, x₂^{-1/n})` whose
    /// convexity or concavity decides the Brunn–Minkowski direction.
    pub fn f_transform(&self, n: usize) -> TransformedBivariate {
        TransformedBivariate {
            source: self.clone(),
            kind: TransformKind::FSubPhi { n },
        }
    }

    /// Reciprocal transform packaged as a value, for probing against the
    /// defining identity.
    pub fn tilde_transform(&self) -> TransformedBivariate {
        TransformedBivariate {
            source: self.clone(),
            kind: TransformKind::Tilde,
        }
    }

    /// Root `τ` of the diagonal equation `φ(τ, …, τ) = 1`. Lies in
    /// `(0, 1]` for the increasing class and `[1, ∞)` for the decreasing
    /// class; strictly normalized members keep away from 1.
    pub fn solve_tau(&self) -> Result<f64> {
        let g = |t: f64| self.eval_diagonal(t);
        match self.class {
            BivariateClass::PhiTilde => {
                let hi = roots::expand_upward(g, 1.0, |v| v >= 1.0)?;
                let r = roots::solve_level(g, 1.0, 0.0, hi)?;
                Ok(r.root)
            }
            BivariateClass::PsiTilde => {
                let lo = roots::expand_downward(g, 1.0, |v| v >= 1.0)?;
                let hi = roots::expand_upward(g, lo.max(1.0), |v| v <= 1.0)?;
                let r = roots::solve_level(g, 1.0, lo, hi)?;
                Ok(r.root)
            }
        }
    }

    /// Checks the declared class against normalization and axis-scan
    /// monotonicity probes.
    pub fn validate(&self, grid: &ProbeGrid) -> ValidationReport {
        let mut report = ValidationReport::default();
        match self.class {
            BivariateClass::PhiTilde => self.check_phi_tilde(grid, &mut report, ""),
            BivariateClass::PsiTilde => {
                // defining property: the reciprocal transform is PhiTilde
                self.tilde().check_phi_tilde(grid, &mut report, "tilde: ");
                for &t in grid.points.iter().step_by(8) {
                    let v = self.eval_diagonal(t);
                    if !v.is_finite() {
                        report.push(ViolationKind::NonFinite, format!("f({t},…) = {v}"));
                    } else if v <= 0.0 {
                        report.push(
                            ViolationKind::Sign,
                            format!("f({t},…) = {v} is not positive"),
                        );
                    }
                }
            }
        }
        report
    }

    fn check_phi_tilde(&self, grid: &ProbeGrid, report: &mut ValidationReport, prefix: &str) {
        let m = self.arity;
        let zero = vec![0.0; m];
        let at0 = self.eval(&zero);
        if !(at0.abs() <= 1e-12) {
            report.push(
                ViolationKind::Normalization,
                format!("{prefix}f(0,…,0) = {at0}, expected 0"),
            );
        }
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            let v = self.eval(&e);
            if !((v - 1.0).abs() <= 1e-12) {
                report.push(
                    ViolationKind::Normalization,
                    format!("{prefix}f(e_{}) = {v}, expected 1", i + 1),
                );
            }
        }

        // axis-aligned scans at moderate base levels, where increments of
        // the scanned coordinate stay representable
        for i in 0..m {
            for &b in &[0.5, 1.0, 2.0] {
                let mut prev: Option<(f64, f64)> = None;
                let mut first: Option<f64> = None;
                let mut last: Option<f64> = None;
                for &t in &grid.points {
                    let mut x = vec![b; m];
                    x[i] = t;
                    let v = self.eval(&x);
                    if !v.is_finite() {
                        report.push(
                            ViolationKind::NonFinite,
                            format!("{prefix}f at coordinate {} = {t} (base {b}) is {v}", i + 1),
                        );
                        prev = None;
                        continue;
                    }
                    if v < 0.0 {
                        report.push(
                            ViolationKind::Sign,
                            format!(
                                "{prefix}f at coordinate {} = {t} (base {b}) is negative: {v}",
                                i + 1
                            ),
                        );
                    }
                    if let Some((tp, vp)) = prev {
                        if v < vp - increase_slack(v, vp) {
                            report.push(
                                ViolationKind::Monotonicity,
                                format!(
                                    "{prefix}coordinate {}: f({t}) = {v} drops below f({tp}) = {vp} (base {b})",
                                    i + 1
                                ),
                            );
                        }
                    }
                    prev = Some((t, v));
                    if first.is_none() {
                        first = Some(v);
                    }
                    last = Some(v);
                }
                if let (Some(a), Some(z)) = (first, last) {
                    if z <= a + increase_slack(a, z) {
                        report.push(
                            ViolationKind::Monotonicity,
                            format!(
                                "{prefix}coordinate {}: not strictly increasing over the probe segment (base {b})",
                                i + 1
                            ),
                        );
                    }
                }
            }
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            BivariateKind::PowerSum { exponent } => format!("sum x^{exponent}"),
            BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            } => {
                format!("{alpha}*{} + {beta}*{}", phi1.describe(), phi2.describe())
            }
            BivariateKind::Tilde { source } => format!("tilde({})", source.describe()),
            BivariateKind::Custom { .. } => "custom".into(),
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(match &self.kind {
            BivariateKind::PowerSum { exponent } => json!({
                "kind": "power_sum",
                "p": exponent.abs(),
                "sign": if *exponent > 0.0 { "increasing" } else { "decreasing" },
                "m": self.arity,
            }),
            BivariateKind::WeightedSum {
                alpha,
                beta,
                phi1,
                phi2,
            } => json!({
                "kind": "weighted_sum",
                "alpha": alpha,
                "beta": beta,
                "phi1": phi1.to_json()?,
                "phi2": phi2.to_json()?,
            }),
            BivariateKind::Tilde { source } => json!({
                "kind": "tilde",
                "source": source.to_json()?,
            }),
            BivariateKind::Custom { .. } => {
                return Err(Error::Json(
                    "custom functions have no serializable descriptor".into(),
                ))
            }
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match str_field(v, "kind")? {
            "power_sum" => {
                let p = f64_field(v, "p")?;
                let m = v.get("m").and_then(Value::as_u64).unwrap_or(2) as usize;
                match v
                    .get("sign")
                    .and_then(Value::as_str)
                    .unwrap_or("increasing")
                {
                    "increasing" => Self::power_sum_increasing(p, m),
                    "decreasing" => Self::power_sum_decreasing(p, m),
                    other => Err(Error::Json(format!("unknown power-sum sign `{other}`"))),
                }
            }
            "weighted_sum" => {
                let alpha = f64_field(v, "alpha")?;
                let beta = f64_field(v, "beta")?;
                let phi1 = OrliczUnivariate::from_json(
                    v.get("phi1")
                        .ok_or_else(|| Error::Json("weighted_sum requires `phi1`".into()))?,
                )?;
                let phi2 = OrliczUnivariate::from_json(
                    v.get("phi2")
                        .ok_or_else(|| Error::Json("weighted_sum requires `phi2`".into()))?,
                )?;
                Self::weighted_sum(alpha, beta, phi1, phi2)
            }
            "tilde" => {
                let source = v
                    .get("source")
                    .ok_or_else(|| Error::Json("tilde descriptor requires `source`".into()))?;
                Ok(Self::from_json(source)?.tilde())
            }
            other => Err(Error::Json(format!("unknown bivariate kind `{other}`"))),
        }
    }
}

/// Tolerated backward step in a monotonicity scan: rounding noise of
/// the larger magnitude involved.
fn increase_slack(a: f64, b: f64) -> f64 {
    64.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300)
}

// ---------------------------------------------------------------------------
// transforms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `x ↦ source(1/x₁, …, 1/x_m)`
    Tilde,
    /// `(x₁, x₂) ↦ source(x₁^{-1/n}, x₂^{-1/n})`
    FSubPhi { n: usize },
}

/// A bivariate function viewed through one of the two standard variable
/// changes of the theory.
#[derive(Clone)]
pub struct TransformedBivariate {
    source: OrliczBivariate,
    kind: TransformKind,
}

impl TransformedBivariate {
    pub fn source(&self) -> &OrliczBivariate {
        &self.source
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind {
            TransformKind::Tilde => {
                let recip: Vec<f64> = x.iter().map(|&xi| 1.0 / xi).collect();
                self.source.eval(&recip)
            }
            TransformKind::FSubPhi { n } => {
                debug_assert_eq!(x.len(), 2);
                let e = -1.0 / n as f64;
                self.source.eval(&[x[0].powf(e), x[1].powf(e)])
            }
        }
    }
}

// ---------------------------------------------------------------------------
// probes and validation reports
// ---------------------------------------------------------------------------

/// Deterministic sample grid used by all class probes.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    pub points: Vec<f64>,
}

impl ProbeGrid {
    /// 64 log-spaced points on `[1e-3, 1e3]`, the default probe range.
    pub fn log_default() -> Self {
        Self::log_spaced(64, 1e-3, 1e3)
    }

    pub fn log_spaced(count: usize, lo: f64, hi: f64) -> Self {
        assert!(count >= 2 && lo > 0.0 && hi > lo);
        let (llo, lhi) = (lo.ln(), hi.ln());
        let points = (0..count)
            .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
            .collect();
        Self { points }
    }

    pub fn linear(count: usize, lo: f64, hi: f64) -> Self {
        assert!(count >= 2 && hi > lo);
        let points = (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect();
        Self { points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Monotonicity,
    Normalization,
    Sign,
    Shape,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

/// Outcome of a midpoint chord probe. `min_gap`/`max_gap` are extremes
/// of `(g(s)+g(t))/2 − g((s+t)/2)` over all sampled pairs: all
/// nonnegative means convex on the samples, all nonpositive concave.
#[derive(Debug, Clone, Copy)]
pub struct ShapeProbe {
    pub convex: bool,
    pub concave: bool,
    pub strictly_convex: bool,
    pub strictly_concave: bool,
    pub constant: bool,
    pub min_gap: f64,
    pub max_gap: f64,
}

/// Minimum chord gap that counts as strict curvature.
pub const STRICT_GAP: f64 = 1e-8;

fn classify_gaps(min_gap: f64, max_gap: f64, scale: f64, nonfinite: bool) -> ShapeProbe {
    // slack absorbs rounding on affine functions evaluated at large values
    let slack = 1e-12 * scale + 1e-13;
    ShapeProbe {
        convex: !nonfinite && min_gap >= -slack,
        concave: !nonfinite && max_gap <= slack,
        strictly_convex: !nonfinite && min_gap > STRICT_GAP,
        strictly_concave: !nonfinite && max_gap < -STRICT_GAP,
        constant: !nonfinite && min_gap.abs() <= slack && max_gap.abs() <= slack,
        min_gap,
        max_gap,
    }
}

/// Midpoint convexity probe of a scalar function on the given points.
pub fn probe_shape_1d<F: Fn(f64) -> f64>(g: F, points: &[f64]) -> ShapeProbe {
    let values: Vec<f64> = points.iter().map(|&t| g(t)).collect();
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    let mut nonfinite = false;
    let mut consider = |s: f64, t: f64, gs: f64, gt: f64| {
        let mid = g(0.5 * (s + t));
        if !(gs.is_finite() && gt.is_finite() && mid.is_finite()) {
            nonfinite = true;
            return;
        }
        let gap = 0.5 * (gs + gt) - mid;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        scale = scale.max(gs.abs()).max(gt.abs());
    };
    let n = points.len();
    for stride in [8usize, 21, 63] {
        for i in 0..n.saturating_sub(stride) {
            consider(points[i], points[i + stride], values[i], values[i + stride]);
        }
    }
    if n >= 2 {
        consider(points[0], points[n - 1], values[0], values[n - 1]);
    }
    classify_gaps(min_gap, max_gap, scale, nonfinite)
}

/// Monotonicity probe; returns `(increasing, strictly)` on the samples.
pub fn probe_increasing_1d<F: Fn(f64) -> f64>(g: F, points: &[f64]) -> (bool, bool) {
    let mut increasing = true;
    let mut strictly = true;
    let mut prev: Option<f64> = None;
    for &t in points {
        let v = g(t);
        if !v.is_finite() {
            return (false, false);
        }
        if let Some(vp) = prev {
            if v < vp {
                increasing = false;
            }
            if v <= vp {
                strictly = false;
            }
        }
        prev = Some(v);
    }
    (increasing, strictly)
}

/// Midpoint convexity probe of a bivariate function over a deterministic
/// log-spaced point cloud on `[1e-3, 1e3]²`, pairing points along axes
/// and along pseudo-random cross directions.
pub fn probe_shape_2d<F: Fn(f64, f64) -> f64>(g: F, per_axis: usize) -> ShapeProbe {
    let grid = ProbeGrid::log_spaced(per_axis, 1e-3, 1e3);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(per_axis * per_axis);
    for &x in &grid.points {
        for &y in &grid.points {
            pts.push((x, y));
        }
    }
    let values: Vec<f64> = pts.iter().map(|&(x, y)| g(x, y)).collect();

    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    let mut nonfinite = false;
    let mut consider = |a: usize, b: usize| {
        let (xa, ya) = pts[a];
        let (xb, yb) = pts[b];
        let (ga, gb) = (values[a], values[b]);
        let mid = g(0.5 * (xa + xb), 0.5 * (ya + yb));
        if !(ga.is_finite() && gb.is_finite() && mid.is_finite()) {
            nonfinite = true;
            return;
        }
        let gap = 0.5 * (ga + gb) - mid;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        scale = scale.max(ga.abs()).max(gb.abs());
    };

    let m = pts.len();
    // axis-aligned pairs
    for row in 0..per_axis {
        for col in 0..per_axis.saturating_sub(per_axis / 4) {
            let a = row * per_axis + col;
            consider(a, a + per_axis / 4);
        }
    }
    for col in 0..per_axis {
        for row in 0..per_axis.saturating_sub(per_axis / 4) {
            let a = row * per_axis + col;
            consider(a, a + (per_axis / 4) * per_axis);
        }
    }
    // deterministic cross pairs
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..4 * m {
        let a = (next() % m as u64) as usize;
        let b = (next() % m as u64) as usize;
        if a != b {
            consider(a, b);
        }
    }
    classify_gaps(min_gap, max_gap, scale, nonfinite)
}

/// Shape probe of the transform `F_φ` attached to a bivariate generator.
pub fn shape_of_f_transform(phi: &OrliczBivariate, n: usize) -> ShapeProbe {
    let tf = phi.f_transform(n);
    probe_shape_2d(move |x, y| tf.eval(&[x, y]), 24)
}

/// Shape probe of `F(t) = φ(t^{-1/n})` for a univariate generator.
pub fn shape_of_univariate_f(phi: &OrliczUnivariate, n: usize) -> ShapeProbe {
    let e = -1.0 / n as f64;
    let grid = ProbeGrid::log_default();
    probe_shape_1d(|t| phi.eval(t.powf(e)), &grid.points)
}

// ---------------------------------------------------------------------------
// json helpers
// ---------------------------------------------------------------------------

pub(crate) fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Json(format!("missing or non-string field `{key}`")))
}

pub(crate) fn f64_field(v: &Value, key: &str) -> Result<f64> {
    v.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Json(format!("missing or non-numeric field `{key}`")))
}
