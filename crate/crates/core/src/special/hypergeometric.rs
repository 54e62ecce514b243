//! Gauss hypergeometric function `2F1(a, b; c; z)` for real `z < 1`.
//!
//! Negative arguments go through a Pfaff transformation onto `w = z/(z-1)`
//! in `[0, 1)`, picking the form whose series has only positive terms when
//! one exists. Partial sums are rescaled so very large values do not
//! overflow before the final exponentiation.

use super::SeriesControl;
use crate::error::{domain, Error, Result};

#[allow(unused_imports)]
use num_traits::Float;

/// Value as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    sign: f64,
    ln_abs: f64,
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Plain power series around zero, valid for `|z| < 1`.
fn series(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<Scaled> {
    const RESCALE: f64 = 1e250;
    let mut ln_scale = 0.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if ratio == 0.0 {
            return Ok(finish(sum, ln_scale));
        }
        term *= ratio;
        sum += term;
        if sum.abs() > RESCALE || term.abs() > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
        let next = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * z).abs();
        if next < 1.0 {
            let tail = term.abs() * next / (1.0 - next);
            if tail <= ctl.rel_tol * sum.abs() {
                return Ok(finish(sum, ln_scale));
            }
        }
    }
    Err(Error::NonConvergence { routine: "hyp2f1", terms: ctl.max_terms })
}

fn finish(sum: f64, ln_scale: f64) -> Scaled {
    Scaled { sign: sum.signum(), ln_abs: sum.abs().ln() + ln_scale }
}

fn all_positive(x: f64, y: f64, c: f64) -> bool {
    x > 0.0 && y > 0.0 && c > 0.0
}

fn evaluate(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<Scaled> {
    if [a, b, c, z].iter().any(|v| !v.is_finite()) {
        return Err(domain("hyp2f1", "non-finite argument"));
    }
    if is_nonpositive_integer(c) {
        return Err(domain("hyp2f1", alloc::format!("c = {c} is a non-positive integer")));
    }
    if z >= 1.0 {
        return Err(domain("hyp2f1", alloc::format!("z = {z} >= 1 is outside the supported range")));
    }
    if z == 0.0 {
        return Ok(Scaled { sign: 1.0, ln_abs: 0.0 });
    }
    if z > 0.0 {
        return series(a, b, c, z, ctl);
    }
    let w = z / (z - 1.0);
    let ln_one_minus_z = (-z).ln_1p();
    // (1-z)^{-b} F(c-a, b; c; w) and (1-z)^{-a} F(a, c-b; c; w).
    let pfaff_b = |ctl: &SeriesControl| {
        series(c - a, b, c, w, ctl).map(|s| Scaled { sign: s.sign, ln_abs: s.ln_abs - b * ln_one_minus_z })
    };
    let pfaff_a = |ctl: &SeriesControl| {
        series(a, c - b, c, w, ctl).map(|s| Scaled { sign: s.sign, ln_abs: s.ln_abs - a * ln_one_minus_z })
    };
    if all_positive(c - a, b, c) {
        pfaff_b(ctl)
    } else if all_positive(a, c - b, c) {
        pfaff_a(ctl)
    } else if z > -0.5 {
        series(a, b, c, z, ctl)
    } else {
        pfaff_b(ctl).or_else(|_| pfaff_a(ctl))
    }
}

/// `2F1(a, b; c; z)` for `z < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let s = evaluate(a, b, c, z, ctl)?;
    if s.ln_abs > f64::MAX.ln() {
        return Err(Error::Overflow { routine: "hyp2f1", detail: alloc::format!("ln|F| = {}", s.ln_abs) });
    }
    Ok(s.sign * s.ln_abs.exp())
}

/// `ln 2F1(a, b; c; z)` for parameter sets where the function is positive.
pub fn ln_hyp2f1(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let s = evaluate(a, b, c, z, ctl)?;
    if s.sign <= 0.0 {
        return Err(domain("ln_hyp2f1", "function value is not positive"));
    }
    Ok(s.ln_abs)
}
