//! Special functions used by the analytic model.
//!
//! All routines work on `f64` and report failure through [`crate::Error`]
//! rather than returning NaN. Series evaluations take a [`SeriesControl`].

mod bessel;
mod expint;
mod gamma;
mod hypergeometric;
mod marcum;
mod normal;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use expint::{exp_integral_e1, exp_integral_ei, expint_en, scaled_expint_en};
pub use gamma::{
    ln_factorial, ln_gamma, ln_regularized_gamma, ln_upper_incomplete_gamma, regularized_gamma_p,
    regularized_gamma_q, upper_incomplete_gamma,
};
pub use hypergeometric::{hyp2f1, ln_hyp2f1};
pub use marcum::{marcum_q1, marcum_q1_complement};
pub use normal::{gaussian_q, gaussian_q_inv, normal_pdf};

pub(crate) use marcum::ln_marcum_pair;

/// Truncation policy for power series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once the next term (or tail bound) is below `rel_tol * |sum|`.
    pub rel_tol: f64,
    /// Hard cap on the number of terms before reporting non-convergence.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 500 }
    }
}

impl SeriesControl {
    pub const fn new(rel_tol: f64, max_terms: usize) -> Self {
        Self { rel_tol, max_terms }
    }
}

#[allow(unused_imports)]
use num_traits::Float;

/// `ln(e^a + e^b)` without overflow; `-inf` acts as the additive identity.
#[inline]
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp of positive terms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) const fn new() -> Self {
        Self { max: f64::NEG_INFINITY, scaled: 0.0 }
    }

    #[inline]
    pub(crate) fn add(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term <= self.max {
            self.scaled += (ln_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        }
    }

    pub(crate) fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}
