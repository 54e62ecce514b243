use crate::error::{domain, Error, Result};

#[allow(unused_imports)]
use num_traits::Float;

const EULER: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// `e^x E_n(x)` for `x > 0` (or `x = 0`, `n >= 2`).
///
/// Series below `x = 1`, continued fraction above. The scaling keeps the
/// value O(1/(x + n)) for large arguments.
pub fn scaled_expint_en(n: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0) || (x == 0.0 && n <= 1) {
        return Err(domain("expint_en", alloc::format!("n = {n}, x = {x}")));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0 / x);
    }
    if x == 0.0 {
        return Ok(1.0 / (n as f64 - 1.0));
    }
    let nm1 = n - 1;
    if x > 1.0 {
        let mut b = x + n as f64;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let a = -(i as f64) * (nm1 as f64 + i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                return Ok(h);
            }
        }
        Err(Error::NonConvergence { routine: "expint continued fraction", terms: MAX_ITER })
    } else {
        let mut ans = if nm1 != 0 { 1.0 / nm1 as f64 } else { -x.ln() - EULER };
        let mut fact = 1.0;
        for i in 1..MAX_ITER {
            fact *= -x / i as f64;
            let del = if i != nm1 {
                -fact / (i as f64 - nm1 as f64)
            } else {
                let psi = -EULER + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-x.ln() + psi)
            };
            ans += del;
            if del.abs() < ans.abs() * EPS {
                return Ok(ans * x.exp());
            }
        }
        Err(Error::NonConvergence { routine: "expint series", terms: MAX_ITER })
    }
}

/// Generalized exponential integral `E_n(x) = ∫_1^∞ e^{-xt} t^{-n} dt`.
pub fn expint_en(n: usize, x: f64) -> Result<f64> {
    let s = scaled_expint_en(n, x)?;
    Ok(if x == 0.0 { s } else { s * (-x).exp() })
}

/// `E_1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    expint_en(1, x)
}

/// Exponential integral `Ei(x)` (principal value) for `x != 0`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x.is_nan() || x == 0.0 {
        return Err(domain("exp_integral_ei", alloc::format!("x = {x}")));
    }
    if x < 0.0 {
        return exp_integral_e1(-x).map(|v| -v);
    }
    if x > 700.0 {
        return Err(Error::Overflow {
            routine: "exp_integral_ei",
            detail: alloc::format!("x = {x}"),
        });
    }
    if x < 40.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_ITER {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < EPS * sum {
                return Ok(EULER + x.ln() + sum);
            }
        }
        Err(Error::NonConvergence { routine: "Ei series", terms: MAX_ITER })
    } else {
        // Asymptotic expansion, truncated at its smallest term.
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..MAX_ITER {
            let next = term * k as f64 / x;
            if next >= term {
                break;
            }
            term = next;
            sum += term;
            if term < EPS * sum {
                break;
            }
        }
        Ok(x.exp() / x * sum)
    }
}
