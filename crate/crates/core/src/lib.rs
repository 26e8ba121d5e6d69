//! Dual Orlicz–Brunn–Minkowski calculus for star bodies.
//!
//! A star body about the origin is described by a continuous, strictly
//! positive radial function on the unit sphere. This crate builds such
//! bodies as lazy expression trees, combines them with the Orlicz
//! radial addition (the per-direction root of
//! `φ(ρ/ρ_K, ρ/ρ_L) = 1`), and evaluates the dual functionals of the
//! theory — volume, the `L_φ`-dual mixed volume, dual surface area and
//! the harmonic mean radius — by spherical quadrature.
//!
//! On top of the functionals sits a verification layer that checks the
//! dual Brunn–Minkowski, Minkowski, isoperimetric, Urysohn and Jensen
//! comparison inequalities numerically, reports signed margins against
//! quadrature-derived tolerances, and diagnoses equality cases by
//! dilate detection.
//!
//! Everything is immutable after construction; radii, integrals and
//! verification reports are pure functions of their inputs and safe to
//! evaluate concurrently.

pub mod dual_functionals;
pub mod error;
pub mod inequality_lab;
pub mod orlicz_functions;
pub mod radial_addition;
mod roots;
pub mod spherical_quadrature;
pub mod star_bodies;

pub use error::{Error, Result};
pub use orlicz_functions::{
    BivariateClass, OrliczBivariate, OrliczUnivariate, ProbeGrid, Side, UnivariateClass,
};
pub use radial_addition::{
    epsilon_sum, linear_orlicz_sum, orlicz_radial_sum, p_radial_sum_closed_form, LinearOrliczSpec,
    RadialSolveProblem,
};
pub use spherical_quadrature::{unit_ball_volume, FunctionalValue, QuadratureRule, RuleKind};
pub use star_bodies::{Direction, LinearMap, StarBody};
