//! Bracketed scalar root finding for monotone level equations.
//!
//! Every implicit equation in this crate has the form `g(x) = 1` with g
//! continuous and strictly monotone on a known bracket, so a hybrid of
//! bisection and secant steps converges unconditionally. Secant steps
//! are accepted only while they stay inside the current bracket; a
//! bisection step is forced whenever two consecutive secant steps fail
//! to shrink the bracket enough, which keeps the iteration count within
//! a small multiple of pure bisection.

use crate::error::{Error, Result};

pub(crate) const MAX_ITERATIONS: usize = 200;
const MAX_EXPANSIONS: usize = 120;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RootResult {
    pub root: f64,
    #[allow(dead_code)]
    pub residual: f64,
    #[allow(dead_code)]
    pub iterations: usize,
}

/// Solves `g(x) = target` on `[lo, hi]`.
///
/// The endpoint values may already sit on the target within `level_slack`
/// (relative to the target scale); genuine sign agreement beyond that
/// slack is reported as a bracket failure with both endpoint values.
pub(crate) fn solve_level<F: Fn(f64) -> f64>(
    g: F,
    target: f64,
    lo: f64,
    hi: f64,
) -> Result<RootResult> {
    debug_assert!(lo <= hi);
    let f = |x: f64| g(x) - target;
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite {
            context: "root bracket".into(),
            detail: format!("g({a}) - t = {fa}, g({b}) - t = {fb}"),
        });
    }

    let level_slack = 1e-9 * target.abs().max(1.0);
    if fa.abs() <= level_slack && fa.abs() <= fb.abs() && fa * fb > 0.0 {
        return Ok(refine_endpoint(a, fa));
    }
    if fb.abs() <= level_slack && fa * fb > 0.0 {
        return Ok(refine_endpoint(b, fb));
    }
    if fa == 0.0 {
        return Ok(refine_endpoint(a, fa));
    }
    if fb == 0.0 {
        return Ok(refine_endpoint(b, fb));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure {
            lo: a,
            hi: b,
            g_lo: fa + target,
            g_hi: fb + target,
        });
    }

    let mut iterations = 0usize;
    let mut force_bisect = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mid = 0.5 * (a + b);
        let width = b - a;
        // stop once the bracket is at floating-point resolution
        if width <= 4.0 * f64::EPSILON * mid.abs() + f64::MIN_POSITIVE {
            break;
        }

        let mut x = if force_bisect {
            mid
        } else {
            let denom = fb - fa;
            let secant = if denom != 0.0 {
                b - fb * (b - a) / denom
            } else {
                mid
            };
            // reject secant steps that leave or hug the bracket boundary
            let guard = 0.01 * width;
            if !secant.is_finite() || secant <= a + guard || secant >= b - guard {
                mid
            } else {
                secant
            }
        };
        if !(x > a && x < b) {
            x = mid;
        }

        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFinite {
                context: "root iteration".into(),
                detail: format!("g({x}) - t = {fx}"),
            });
        }
        if fx == 0.0 {
            return Ok(RootResult {
                root: x,
                residual: 0.0,
                iterations,
            });
        }

        let old_width = width;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // force a bisection whenever progress stalls
        force_bisect = (b - a) > 0.5 * old_width;
    }

    let (root, residual) = if fa.abs() <= fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    Ok(RootResult {
        root,
        residual,
        iterations,
    })
}

fn refine_endpoint(x: f64, fx: f64) -> RootResult {
    RootResult {
        root: x,
        residual: fx,
        iterations: 0,
    }
}

/// Expands `hi` geometrically from `start` until `pred(g(hi))` flips,
/// recording the probe trace for the error path.
pub(crate) fn expand_upward<F: Fn(f64) -> f64, P: Fn(f64) -> bool>(
    g: F,
    start: f64,
    crossed: P,
) -> Result<f64> {
    let mut x = start;
    let mut trace = Vec::new();
    for _ in 0..MAX_EXPANSIONS {
        let gx = g(x);
        trace.push((x, gx));
        if !gx.is_finite() {
            return Err(Error::NonFinite {
                context: "bracket expansion".into(),
                detail: format!("g({x}) = {gx}"),
            });
        }
        if crossed(gx) {
            return Ok(x);
        }
        x *= 2.0;
    }
    Err(Error::BracketExpansion { trace })
}

/// As `expand_upward` but shrinking toward zero.
pub(crate) fn expand_downward<F: Fn(f64) -> f64, P: Fn(f64) -> bool>(
    g: F,
    start: f64,
    crossed: P,
) -> Result<f64> {
    let mut x = start;
    let mut trace = Vec::new();
    for _ in 0..MAX_EXPANSIONS {
        let gx = g(x);
        trace.push((x, gx));
        if !gx.is_finite() {
            return Err(Error::NonFinite {
                context: "bracket expansion".into(),
                detail: format!("g({x}) = {gx}"),
            });
        }
        if crossed(gx) {
            return Ok(x);
        }
        x *= 0.5;
    }
    Err(Error::BracketExpansion { trace })
}
