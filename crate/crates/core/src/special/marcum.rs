//! First-order Marcum Q function.
//!
//! Uses the Poisson-mixture identity `Q1(a, b) = P(N_b <= N_a)` with
//! `N_a ~ Pois(a²/2)`, `N_b ~ Pois(b²/2)` independent, i.e.
//! `Q1 = Σ_j Pois(j; a²/2) · P(Pois(b²/2) <= j)`. Every term is positive, so the
//! sum is evaluated in the log domain over a window around its peak. Whichever
//! of `Q1` and `1 - Q1` is smaller is summed directly.

use super::gamma::{ln_factorial, ln_one_minus_exp, ln_regularized_gamma};
use super::{log_add_exp, LogSum, SeriesControl};
use crate::error::{domain, Error, Result};

#[allow(unused_imports)]
use num_traits::Float;

/// `Q1(a, b)` for `a, b >= 0`.
pub fn marcum_q1(a: f64, b: f64, ctl: &SeriesControl) -> Result<f64> {
    ln_marcum_pair(a, b, ctl).map(|(lq, _)| lq.exp())
}

/// `1 - Q1(a, b)`, accurate when `Q1` is close to one.
pub fn marcum_q1_complement(a: f64, b: f64, ctl: &SeriesControl) -> Result<f64> {
    ln_marcum_pair(a, b, ctl).map(|(_, lc)| lc.exp())
}

/// Returns `(ln Q1(a, b), ln(1 - Q1(a, b)))`.
pub(crate) fn ln_marcum_pair(a: f64, b: f64, ctl: &SeriesControl) -> Result<(f64, f64)> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain("marcum_q1", alloc::format!("a = {a}, b = {b}")));
    }
    let lam = 0.5 * a * a;
    let y = 0.5 * b * b;
    if y == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    if lam == 0.0 {
        return Ok((-y, ln_one_minus_exp(-y)));
    }
    let half = -core::f64::consts::LN_2;
    if b > a {
        let lq = tail_sum(lam, y, Tail::Upper, ctl)?;
        if lq <= half {
            return Ok((lq, ln_one_minus_exp(lq)));
        }
        let lc = tail_sum(lam, y, Tail::Lower, ctl)?;
        Ok((ln_one_minus_exp(lc), lc))
    } else {
        let lc = tail_sum(lam, y, Tail::Lower, ctl)?;
        if lc <= half {
            return Ok((ln_one_minus_exp(lc), lc));
        }
        let lq = tail_sum(lam, y, Tail::Upper, ctl)?;
        Ok((lq, ln_one_minus_exp(lq)))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Tail {
    /// Terms `P(Pois(y) <= j)`: sums to `Q1`.
    Upper,
    /// Terms `P(Pois(y) > j)`: sums to `1 - Q1`.
    Lower,
}

/// `ln P(Pois(y) <= j)` or `ln P(Pois(y) > j)` evaluated directly.
fn ln_tail_direct(j: usize, y: f64, tail: Tail) -> Result<f64> {
    let (lp, lq) = ln_regularized_gamma(j as f64 + 1.0, y)?;
    Ok(match tail {
        Tail::Upper => lq,
        Tail::Lower => lp,
    })
}

fn tail_sum(lam: f64, y: f64, tail: Tail, ctl: &SeriesControl) -> Result<f64> {
    let ln_lam = lam.ln();
    let ln_y = y.ln();
    let ln_w = |j: usize| j as f64 * ln_lam - lam - ln_factorial(j);
    let ln_pois_y = |j: usize| j as f64 * ln_y - y - ln_factorial(j);
    let cut = ctl.rel_tol.ln() - 7.0;

    let geo = (lam * y).sqrt();
    let start = match tail {
        Tail::Upper => lam.max(geo),
        Tail::Lower => lam.min(geo),
    }
    .floor() as usize;

    let mut acc = LogSum::new();
    let mut peak = f64::NEG_INFINITY;
    let mut terms = 0usize;

    // Upward from the start index.
    let mut ln_t = ln_tail_direct(start, y, tail)?;
    let mut prev = f64::NEG_INFINITY;
    let mut j = start;
    loop {
        let t = ln_w(j) + ln_t;
        acc.add(t);
        peak = peak.max(t);
        terms += 1;
        if terms > ctl.max_terms {
            return Err(Error::NonConvergence { routine: "marcum_q1", terms });
        }
        if t < peak + cut && t < prev {
            break;
        }
        prev = t;
        j += 1;
        ln_t = match tail {
            Tail::Upper => log_add_exp(ln_t, ln_pois_y(j)),
            Tail::Lower => ln_tail_direct(j, y, tail)?,
        };
        if ln_t == f64::NEG_INFINITY && tail == Tail::Lower {
            break;
        }
    }

    // Downward from just below the start index.
    if start > 0 {
        let mut j = start - 1;
        let mut ln_t = ln_tail_direct(j, y, tail)?;
        let mut prev = f64::NEG_INFINITY;
        loop {
            let t = ln_w(j) + ln_t;
            acc.add(t);
            peak = peak.max(t);
            terms += 1;
            if terms > ctl.max_terms {
                return Err(Error::NonConvergence { routine: "marcum_q1", terms });
            }
            if (t < peak + cut && t < prev) || j == 0 {
                break;
            }
            prev = t;
            ln_t = match tail {
                Tail::Lower => log_add_exp(ln_t, ln_pois_y(j)),
                Tail::Upper => ln_tail_direct(j - 1, y, tail)?,
            };
            j -= 1;
        }
    }
    Ok(acc.ln().min(0.0))
}
