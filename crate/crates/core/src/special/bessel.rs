use crate::error::{domain, Error, Result};
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// Largest argument whose `I0` is representable.
const I0_OVERFLOW: f64 = 713.98;

/// `e^{-x} I0(x)` for `x >= 0`; never overflows.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 20.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Hankel expansion; terms shrink until k ~ 2x, far past double precision.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let r = (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
            if r >= 1.0 {
                break;
            }
            term *= r;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(domain("bessel_i0", alloc::format!("x = {x}")));
    }
    if x > I0_OVERFLOW {
        return Err(Error::Overflow { routine: "bessel_i0", detail: alloc::format!("x = {x}") });
    }
    let s = bessel_i0_scaled(x);
    // Split the exponential so e^x itself never overflows before scaling.
    Ok(s * (0.5 * x).exp() * (0.5 * x).exp())
}
