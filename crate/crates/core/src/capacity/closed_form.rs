//! `G`, `V` and `H` integrals of `ln(1 + S x)` against exponential and
//! gamma-shaped weights on `[ζ, ∞)`.
//!
//! `V(n, ω, S, ζ) = ∫_ζ^∞ xⁿ e^{-ωx} ln(1+Sx) dx` grows like `n!/ω^{n+1}`, so
//! the evaluator works with `v̂(n) = V(n) ω^{n+1}/n!`, the truncated mean of
//! `ln(1+SX)` for `X ~ Gamma(n+1, ω)`. Its recursion has only positive terms:
//!
//! `v̂(n) = v̂(n-1) + π_n ln(1+Sζ) + Σ_{j=0}^{n} π_{n-j} e^{y} E_{j+1}(y)`
//!
//! with `π_k = Pois(k; ωζ)` and `y = ω(ζ + 1/S)`.

use crate::error::{domain, Error, Result};
use crate::special::{exp_integral_ei, ln_factorial, scaled_expint_en, upper_incomplete_gamma};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// `G(δ, S, ζ) = ∫_ζ^∞ ln(1+Sx) e^{-x/δ}/δ dx`.
pub fn g_func(delta: f64, s: f64, zeta: f64) -> Result<f64> {
    if !(delta > 0.0) || !(s >= 0.0) || !(zeta >= 0.0) {
        return Err(domain("g_func", alloc::format!("δ = {delta}, S = {s}, ζ = {zeta}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s.is_infinite() {
        return Err(domain("g_func", "infinite SNR"));
    }
    let y = (1.0 + s * zeta) / (delta * s);
    Ok((-zeta / delta).exp() * ((s * zeta).ln_1p() + scaled_expint_en(1, y)?))
}

/// `e^{y} E_j(y)` for `j = 1..=n_max + 1`, via the recurrence run away from `j ≈ y`
/// in both directions (each direction contracts rounding error).
fn scaled_en_table(y: f64, top: usize) -> Result<Vec<f64>> {
    let mut eps = alloc::vec![0.0; top + 1];
    let pivot = (y.round() as usize).clamp(1, top);
    eps[pivot] = scaled_expint_en(pivot, y)?;
    for j in pivot..top {
        eps[j + 1] = (1.0 - y * eps[j]) / j as f64;
    }
    for j in (1..pivot).rev() {
        eps[j] = (1.0 - j as f64 * eps[j + 1]) / y;
    }
    Ok(eps)
}

/// Scaled values `v̂(0..=n_max)` at fixed `(ω, S, ζ)`.
#[derive(Debug, Clone)]
pub struct VTable {
    scaled: Vec<f64>,
    ln_omega: f64,
}

impl VTable {
    pub fn new(omega: f64, s: f64, zeta: f64, n_max: usize) -> Result<Self> {
        if !(omega > 0.0) || !(s >= 0.0) || !(zeta >= 0.0) || s.is_infinite() {
            return Err(domain("v_func", alloc::format!("ω = {omega}, S = {s}, ζ = {zeta}")));
        }
        if s == 0.0 {
            return Ok(Self { scaled: alloc::vec![0.0; n_max + 1], ln_omega: omega.ln() });
        }
        let lz = omega * zeta;
        let y = omega * (zeta + 1.0 / s);
        let log_term = (s * zeta).ln_1p();
        let eps = scaled_en_table(y, n_max + 1)?;
        let pois: Vec<f64> = (0..=n_max)
            .map(|k| {
                if lz == 0.0 {
                    if k == 0 { 1.0 } else { 0.0 }
                } else {
                    (k as f64 * lz.ln() - lz - ln_factorial(k)).exp()
                }
            })
            .collect();
        let mut scaled = Vec::with_capacity(n_max + 1);
        let mut prev = 0.0;
        for n in 0..=n_max {
            let conv: f64 = (0..=n).map(|j| pois[n - j] * eps[j + 1]).sum();
            prev += pois[n] * log_term + conv;
            scaled.push(prev);
        }
        Ok(Self { scaled, ln_omega: omega.ln() })
    }

    pub fn n_max(&self) -> usize {
        self.scaled.len() - 1
    }

    /// `v̂(n) = E[ln(1+SX); X >= ζ]`, `X ~ Gamma(n+1, ω)`.
    pub fn scaled(&self, n: usize) -> f64 {
        self.scaled[n]
    }

    /// Unscaled `V(n)`; errors if it exceeds double range.
    pub fn value(&self, n: usize) -> Result<f64> {
        let v = self.scaled[n];
        if v == 0.0 {
            return Ok(0.0);
        }
        let l = v.ln() + ln_factorial(n) - (n as f64 + 1.0) * self.ln_omega;
        if l > f64::MAX.ln() {
            return Err(Error::Overflow { routine: "v_func", detail: alloc::format!("ln V({n}) = {l}") });
        }
        Ok(l.exp())
    }
}

/// `V(n, ω, S, ζ) = ∫_ζ^∞ xⁿ e^{-ωx} ln(1+Sx) dx`.
pub fn v_func(n: usize, omega: f64, s: f64, zeta: f64) -> Result<f64> {
    VTable::new(omega, s, zeta, n)?.value(n)
}

/// `H(k, ω, S, ζ) = ∫_ζ^∞ x^k E1(ω(x + 1/S)) dx`, as a sum of positive terms
/// `Σ_{j=1}^{k+1} k!/(k+1-j)! ζ^{k+1-j} ω^{-j} E_{j+1}(ω(ζ + 1/S))`.
pub fn h_func(k: usize, omega: f64, s: f64, zeta: f64) -> Result<f64> {
    if !(omega > 0.0) || !(s > 0.0) || !(zeta >= 0.0) {
        return Err(domain("h_func", alloc::format!("ω = {omega}, S = {s}, ζ = {zeta}")));
    }
    let y = omega * (zeta + 1.0 / s);
    let eps = scaled_en_table(y, k + 2)?;
    let mut sum = 0.0;
    for j in 1..=k + 1 {
        let p = k + 1 - j;
        let zp = if p == 0 { 1.0 } else { zeta.powi(p as i32) };
        let coef = (ln_factorial(k) - ln_factorial(p) - j as f64 * omega.ln()).exp();
        sum += coef * zp * eps[j + 1];
    }
    Ok(sum * (-y).exp())
}

/// The same `H` through the alternating binomial expansion in `Ei` and `Γ`.
///
/// Algebraically identical to [`h_func`] but loses digits to cancellation
/// once `S` or `k` grow; kept as an independent cross-check.
pub fn h_func_binomial(k: usize, omega: f64, s: f64, zeta: f64) -> Result<f64> {
    if !(omega > 0.0) || !(s > 0.0) || !(zeta >= 0.0) {
        return Err(domain("h_func", alloc::format!("ω = {omega}, S = {s}, ζ = {zeta}")));
    }
    let u = omega * zeta + omega / s;
    let ei = exp_integral_ei(-u)?;
    let mut sum = 0.0;
    for j in 0..=k {
        let binom = (ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j)).exp();
        let sign_pow = (-s).powi(j as i32 - k as i32);
        let bracket = u.powi(j as i32 + 1) * ei + upper_incomplete_gamma(j as f64 + 1.0, u)?;
        sum += binom * sign_pow / ((j + 1) as f64 * omega.powi(j as i32 + 1)) * bracket;
    }
    Ok(sum)
}
