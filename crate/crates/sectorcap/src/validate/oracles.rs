//! Reference computations for the validation suite.
//!
//! These only use the crate's generic adaptive quadrature and textbook
//! formulas; none of the closed-form series under test.

use sectorcap_core::quadrature::{integrate, integrate_to_infinity, QuadControl};
use sectorcap_core::Result;
use std::f64::consts::PI;

/// Tight settings for reference integrals.
pub fn reference_quad() -> QuadControl {
    QuadControl { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 20_000 }
}

/// Settings for the inner integral of a nested pair.
fn inner_quad() -> QuadControl {
    QuadControl { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 4000 }
}

/// `e^{-x} I0(x)`: power series below 30, Hankel expansion above.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    if x < 30.0 {
        let q = 0.25 * x * x;
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..400 {
            term *= q / (k * k) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return (-x).exp() * sum;
    }
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * 8.0 * x);
        sum += term;
        if term < 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Bivariate exponential density of `(ν1, ν2)` with means `δ1, δ2` and
/// correlation `ρ²` between the gains.
pub fn joint_density(d1: f64, d2: f64, rho: f64, y1: f64, y2: f64) -> f64 {
    let c = 1.0 - rho * rho;
    let (a1, a2) = (1.0 / (d1 * c), 1.0 / (d2 * c));
    let z = 2.0 * rho * (a1 * a2 * y1 * y2).sqrt();
    (z - a1 * y1 - a2 * y2).exp() * bessel_i0_scaled(z) / (d1 * d2 * c)
}

/// `∫∫_{y2 <= y1} f(y1, y2)` for a density `f` of two exponential-like
/// gains, as nested adaptive integrals. The region is parametrized by
/// `y2 = u² y1`, `u ∈ [0, 1]`; the outer integrand peaks at `u = ρ√(a1/a2)`,
/// where the decay rate along the ray is smallest.
pub fn lower_wedge_mass<F: Fn(f64, f64) -> f64>(f: F, d1: f64, d2: f64, rho: f64) -> Result<f64> {
    let c = 1.0 - rho * rho;
    let (a1, a2) = (1.0 / (d1 * c), 1.0 / (d2 * c));
    let mut inner_err = None;
    let outer = |u: f64| {
        let t = u * u;
        let decay = (a1 + a2 * t - 2.0 * rho * (a1 * a2 * t).sqrt()).max(1e-300);
        match integrate_to_infinity(|y| y * f(y, t * y), 0.0, 1.0 / decay, &inner_quad()) {
            Ok(q) => 2.0 * u * q.value,
            Err(e) => {
                inner_err.get_or_insert(e);
                0.0
            }
        }
    };
    let peak = rho * (a1 / a2).sqrt();
    let ctl = QuadControl { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 2000 };
    let q = integrate(outer, 0.0, 1.0, &[peak], &ctl)?;
    match inner_err {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// `P(ν1 >= ν2)` from the reference density.
pub fn delta1_reference(d1: f64, d2: f64, rho: f64) -> Result<f64> {
    lower_wedge_mass(|a, b| joint_density(d1, d2, rho, a, b), d1, d2, rho)
}

/// `∫_a^∞ f` to reference accuracy, with `scale` the decay length.
pub fn tail_integral<F: FnMut(f64) -> f64>(f: F, a: f64, scale: f64) -> Result<f64> {
    Ok(integrate_to_infinity(f, a, scale, &reference_quad())?.value)
}

/// `V(n, ω, S, ζ)` by direct quadrature.
pub fn v_reference(n: usize, omega: f64, s: f64, zeta: f64) -> Result<f64> {
    let scale = (n as f64 + 1.0) / omega;
    tail_integral(|x| x.powi(n as i32) * (-omega * x).exp() * (s * x).ln_1p(), zeta, scale)
}

/// `G(δ, S, ζ)` by direct quadrature.
pub fn g_reference(delta: f64, s: f64, zeta: f64) -> Result<f64> {
    tail_integral(|x| (s * x).ln_1p() * (-x / delta).exp() / delta, zeta, delta)
}
