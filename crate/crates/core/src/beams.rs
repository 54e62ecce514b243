//! Two correlated exponential beam gains and the selected (larger) gain.
//!
//! `ν1, ν2` are the powers of jointly circular-Gaussian amplitudes with means
//! `δ1, δ2` and amplitude correlation magnitude `ρ`. With
//! `α_m = 1/(δ_m(1-ρ²))` and `ω = α1 + α2`, the density of `ν* = max(ν1, ν2)`
//! expands as
//!
//! `f(x) = Σ_m e^{-x/δ_m}/δ_m - e^{-ωx} Σ_{j>=0} Σ_{i<=j} D_ij x^{i+j}`,
//!
//! and its survival function as `e^{-x/δ2} - e^{-ωx} Σ Σ E_ij x^{i+j}`.
//! Both double sums are held in the log domain by [`SeriesCoefficients`].

use crate::antenna::RadiationPattern;
use crate::error::{invalid, Error, Result};
use crate::special::{
    bessel_i0_scaled, ln_factorial, ln_hyp2f1, ln_marcum_pair, log_add_exp, LogSum,
    SeriesControl,
};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Control used for every internal Marcum evaluation.
pub(crate) const MARCUM_CTL: SeriesControl = SeriesControl::new(1e-15, 200_000);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamChannelModel {
    pub delta1: f64,
    pub delta2: f64,
    pub rho: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega: f64,
}

impl BeamChannelModel {
    pub fn new(delta1: f64, delta2: f64, rho: f64) -> Result<Self> {
        for (name, d) in [("delta1", delta1), ("delta2", delta2)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid(name, alloc::format!("mean gain must be positive, got {d}")));
            }
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid("rho", alloc::format!("{rho} not in [0, 1)")));
        }
        let c = 1.0 - rho * rho;
        let alpha1 = 1.0 / (delta1 * c);
        let alpha2 = 1.0 / (delta2 * c);
        Ok(Self { delta1, delta2, rho, alpha1, alpha2, omega: alpha1 + alpha2 })
    }

    /// Mean gains induced by the receiver direction: `δ_m = γ_ss p_m(φ_SR)`
    /// for the first two sectors.
    pub fn from_pattern(pattern: &RadiationPattern, phi_sr: f64, gamma_ss: f64, rho: f64) -> Result<Self> {
        if pattern.sectors() < 2 {
            return Err(invalid("sectors", "beam selection needs at least two sectors"));
        }
        Self::new(gamma_ss * pattern.gain(0, phi_sr)?, gamma_ss * pattern.gain(1, phi_sr)?, rho)
    }

    /// Same channel with the beam labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            delta1: self.delta2,
            delta2: self.delta1,
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            ..*self
        }
    }

    /// Joint density of `(ν1, ν2)`.
    ///
    /// The normalizer `α1/δ2` equals `1/(δ1 δ2 (1-ρ²))` and is symmetric
    /// under relabeling.
    pub fn joint_pdf(&self, y1: f64, y2: f64) -> f64 {
        if y1 < 0.0 || y2 < 0.0 {
            return 0.0;
        }
        let z = 2.0 * self.rho * (self.alpha1 * self.alpha2 * y1 * y2).sqrt();
        self.alpha1 / self.delta2 * (z - self.alpha1 * y1 - self.alpha2 * y2).exp() * bessel_i0_scaled(z)
    }

    /// Joint CDF `P(ν1 <= y1, ν2 <= y2)`.
    pub fn joint_cdf(&self, y1: f64, y2: f64) -> Result<f64> {
        if y1 <= 0.0 || y2 <= 0.0 {
            return Ok(0.0);
        }
        let r2 = self.rho * self.rho;
        let (lq_a, _) = ln_marcum_pair((2.0 * self.alpha2 * y2).sqrt(), (2.0 * r2 * self.alpha1 * y1).sqrt(), &MARCUM_CTL)?;
        let (_, lc_b) = ln_marcum_pair((2.0 * r2 * self.alpha2 * y2).sqrt(), (2.0 * self.alpha1 * y1).sqrt(), &MARCUM_CTL)?;
        let v = 1.0 - (lq_a - y1 / self.delta1).exp() - (lc_b - y2 / self.delta2).exp();
        Ok(v.clamp(0.0, 1.0))
    }

    /// `P(ν* > x)`, evaluated without cancellation.
    pub fn selected_gain_survival(&self, x: f64) -> Result<f64> {
        self.ln_selected_gain_survival(x).map(f64::exp)
    }

    pub(crate) fn ln_selected_gain_survival(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let r2 = self.rho * self.rho;
        let (lq_a, _) = ln_marcum_pair((2.0 * self.alpha2 * x).sqrt(), (2.0 * r2 * self.alpha1 * x).sqrt(), &MARCUM_CTL)?;
        let (_, lc_b) = ln_marcum_pair((2.0 * r2 * self.alpha2 * x).sqrt(), (2.0 * self.alpha1 * x).sqrt(), &MARCUM_CTL)?;
        Ok(log_add_exp(lq_a - x / self.delta1, lc_b - x / self.delta2).min(0.0))
    }

    /// `F_{ν*}(x) = F_{ν1ν2}(x, x)`.
    pub fn selected_gain_cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(-self.ln_selected_gain_survival(x)?.exp_m1())
    }

    /// Density of `ν*` from the Marcum form.
    pub fn selected_gain_pdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let (a, b) = self.selected_gain_pdf_parts(x)?;
        Ok(a + b)
    }

    /// The two beam contributions to the selected-gain density:
    /// `f_m(x) = d/dx P(ν_m = ν* <= x)`.
    pub fn selected_gain_pdf_parts(&self, x: f64) -> Result<(f64, f64)> {
        if x < 0.0 {
            return Ok((0.0, 0.0));
        }
        let r2 = self.rho * self.rho;
        let (_, c1) = ln_marcum_pair((2.0 * r2 * self.alpha1 * x).sqrt(), (2.0 * self.alpha2 * x).sqrt(), &MARCUM_CTL)?;
        let (_, c2) = ln_marcum_pair((2.0 * r2 * self.alpha2 * x).sqrt(), (2.0 * self.alpha1 * x).sqrt(), &MARCUM_CTL)?;
        Ok(((c1 - x / self.delta1).exp() / self.delta1, (c2 - x / self.delta2).exp() / self.delta2))
    }

    /// `Δ1 = P(ν1 > ν2)` from the ₂F₁ series over `k`.
    ///
    /// When `α1/ω > 1/2` the complementary probability is computed with the
    /// labels exchanged, which keeps the hypergeometric series fast.
    pub fn beam1_selection_prob(&self, ctl: &SeriesControl) -> Result<f64> {
        if self.delta1 == self.delta2 {
            return Ok(0.5);
        }
        if self.alpha1 / self.omega > 0.5 {
            return Ok(1.0 - self.swapped().beam1_selection_prob(ctl)?);
        }
        let r2 = self.rho * self.rho;
        let ratio = self.alpha1 / self.alpha2;
        let z = -ratio;
        let mut acc = 0.0;
        let mut r2k = 1.0;
        for k in 0..ctl.max_terms {
            let kf = k as f64;
            let ln_f = ln_hyp2f1(kf + 1.0, 2.0 * kf + 2.0, kf + 2.0, z, ctl)?;
            let ln_t = (kf + 1.0) * ratio.ln() + ln_factorial(2 * k + 1) - (kf + 1.0).ln() - 2.0 * ln_factorial(k) + ln_f;
            let t = ln_t.exp();
            acc += r2k * (1.0 - t);
            let next = r2k * r2;
            // The remaining terms of Σ ρ^{2k}(1 - T_k) are bounded by the geometric tail.
            if next / (1.0 - r2) * t < ctl.rel_tol * acc.abs().max(1e-300) || next == 0.0 {
                let tail = next / (1.0 - r2);
                return Ok((1.0 - r2) * (acc + tail));
            }
            r2k = next;
        }
        Err(Error::NonConvergence { routine: "beam1_selection_prob", terms: ctl.max_terms })
    }
}

/// Triangular index for `0 <= i <= j`.
#[inline]
fn tri(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

/// Truncated `D_ij` and `E_ij` arrays with derived weights.
#[derive(Debug, Clone)]
pub struct SeriesCoefficients {
    model: BeamChannelModel,
    j_max: usize,
    /// Last row carrying non-negligible `D` mass.
    d_rows: usize,
    ln_d1: Vec<f64>,
    ln_d2: Vec<f64>,
    /// `ln(D_ij (i+j)! / ω^{i+j+1})`.
    ln_mass: Vec<f64>,
    ln_mass1: Vec<f64>,
    ln_mass2: Vec<f64>,
    mass_deficit: f64,
    /// E series in the orientation where it converges fastest.
    e_model: BeamChannelModel,
    e_rows: usize,
    ln_e_abs: Vec<f64>,
}

/// Starting truncation order and the first re-check order.
pub const J_MAX_DEFAULT: usize = 80;
pub const J_MAX_RECHECK: usize = 120;
const J_MAX_CAP: usize = 2000;
const MASS_TOL: f64 = 1e-12;
const ROW_TOL: f64 = 1e-15;

impl SeriesCoefficients {
    /// Builds the arrays, growing `j_max` from the default until both the
    /// `D` mass and the `E` row bound have converged.
    pub fn new(model: &BeamChannelModel) -> Result<Self> {
        let mut j_max = J_MAX_DEFAULT;
        loop {
            let c = Self::with_order(model, j_max);
            if c.converged() {
                return Ok(c);
            }
            j_max = match j_max {
                J_MAX_DEFAULT => J_MAX_RECHECK,
                j if j >= J_MAX_CAP => {
                    return Err(Error::NonConvergence { routine: "beam series coefficients", terms: j })
                }
                j => (j * 3 / 2).min(J_MAX_CAP),
            };
        }
    }

    /// Builds the arrays at a fixed truncation order.
    pub fn with_order(model: &BeamChannelModel, j_max: usize) -> Self {
        let n = tri(j_max, j_max) + 1;
        let ln_rho2 = if model.rho > 0.0 { 2.0 * model.rho.ln() } else { f64::NEG_INFINITY };
        let pow_rho = |k: usize| if k == 0 { 0.0 } else { k as f64 * ln_rho2 };
        let (la1, la2) = (model.alpha1.ln(), model.alpha2.ln());
        let ln_omega = model.omega.ln();

        let mut ln_d1 = Vec::with_capacity(n);
        let mut ln_d2 = Vec::with_capacity(n);
        let mut ln_mass = Vec::with_capacity(n);
        let mut ln_mass1 = Vec::with_capacity(n);
        let mut ln_mass2 = Vec::with_capacity(n);
        let mut total = LogSum::new();
        let mut d_rows = 0;
        for j in 0..=j_max {
            let mut row = LogSum::new();
            for i in 0..=j {
                let base = pow_rho(j) - ln_factorial(i) - ln_factorial(j);
                let d1 = base + j as f64 * la1 + i as f64 * la2 - model.delta1.ln();
                let d2 = base + i as f64 * la1 + j as f64 * la2 - model.delta2.ln();
                let w = ln_factorial(i + j) - (i + j + 1) as f64 * ln_omega;
                ln_d1.push(d1);
                ln_d2.push(d2);
                ln_mass.push(log_add_exp(d1, d2) + w);
                ln_mass1.push(d1 + w);
                ln_mass2.push(d2 + w);
                row.add(log_add_exp(d1, d2) + w);
            }
            total.add(row.ln());
            if row.ln() > ROW_TOL.ln() - 10.0 {
                d_rows = j;
            }
        }
        let mass_deficit = 1.0 - total.ln().exp();

        let e_model = if model.alpha2 > model.alpha1 { model.swapped() } else { *model };
        let (ea1, ea2) = (e_model.alpha1.ln(), e_model.alpha2.ln());
        let mut ln_e_abs = Vec::with_capacity(n);
        let mut e_rows = 0;
        for j in 0..=j_max {
            let mut bound = LogSum::new();
            for i in 0..=j {
                let l = if i == j {
                    f64::NEG_INFINITY
                } else {
                    let diff = if model.rho > 0.0 {
                        pow_rho(i) + (-((j - i) as f64 * ln_rho2).exp()).ln_1p()
                    } else if i == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    };
                    i as f64 * ea1 + j as f64 * ea2 - ln_factorial(i) - ln_factorial(j) + diff
                };
                ln_e_abs.push(l);
                let n = (i + j) as f64;
                bound.add(l + libm::lgamma(n + 0.5) - n * ln_omega);
            }
            if bound.ln() > ROW_TOL.ln() - 10.0 {
                e_rows = j;
            }
        }
        Self { model: *model, j_max, d_rows, ln_d1, ln_d2, ln_mass, ln_mass1, ln_mass2, mass_deficit, e_model, e_rows, ln_e_abs }
    }

    fn converged(&self) -> bool {
        self.mass_deficit.abs() < MASS_TOL && self.d_rows < self.j_max && self.e_rows < self.j_max
    }

    pub fn model(&self) -> &BeamChannelModel {
        &self.model
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// `1 - Σ D_ij (i+j)!/ω^{i+j+1}`; zero for the untruncated series.
    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    /// `D_ij` for `0 <= i <= j <= j_max`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let k = tri(i, j);
        log_add_exp(self.ln_d1[k], self.ln_d2[k]).exp()
    }

    /// `E_ij = α1^i α2^j (ρ^{2j} - ρ^{2i}) / (i! j!)` in the model's own labels.
    pub fn e(&self, i: usize, j: usize) -> f64 {
        let m = &self.model;
        let p = |k: usize| if k == 0 { 1.0 } else { m.rho.powi(2 * k as i32) };
        (i as f64 * m.alpha1.ln() + j as f64 * m.alpha2.ln() - ln_factorial(i) - ln_factorial(j)).exp() * (p(j) - p(i))
    }

    pub(crate) fn d_rows(&self) -> usize {
        self.d_rows
    }

    /// `ln` of the `(i, j)` weight `D_ij (i+j)!/ω^{i+j+1}`.
    pub(crate) fn ln_mass(&self, i: usize, j: usize) -> f64 {
        self.ln_mass[tri(i, j)]
    }

    /// Selected-gain density from the series form.
    pub fn selected_gain_pdf_series(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let m = &self.model;
        let head = (-x / m.delta1).exp() / m.delta1 + (-x / m.delta2).exp() / m.delta2;
        let lx = x.ln();
        let mut sum = LogSum::new();
        let mut last_row = f64::NEG_INFINITY;
        for j in 0..=self.j_max {
            let mut row = LogSum::new();
            for i in 0..=j {
                let k = tri(i, j);
                let pw = if i + j == 0 { 0.0 } else { (i + j) as f64 * lx };
                row.add(log_add_exp(self.ln_d1[k], self.ln_d2[k]) + pw - m.omega * x);
            }
            sum.add(row.ln());
            last_row = row.ln();
        }
        if last_row.exp() > 1e-10 * head.max(f64::MIN_POSITIVE) {
            return Err(Error::NonConvergence { routine: "selected-gain density series", terms: self.j_max });
        }
        Ok(head - sum.ln().exp())
    }

    /// Selected-gain survival `P(ν* > x)` from the `E` series.
    pub fn selected_gain_survival_series(&self, x: f64) -> f64 {
        let m = &self.e_model;
        let lx = x.ln();
        let mut sum = LogSum::new();
        for j in 0..=self.j_max {
            for i in 0..j {
                let pw = if i + j == 0 { 0.0 } else { (i + j) as f64 * lx };
                sum.add(self.ln_e_abs[tri(i, j)] + pw - m.omega * x);
            }
        }
        // E_ij <= 0, so the double sum adds to the leading exponential.
        (-x / m.delta2).exp() + sum.ln().exp()
    }

    /// Orientation used by the `E` arrays: `(model, ln|E_ij|)`, `E_ij <= 0`.
    pub(crate) fn e_series(&self) -> (&BeamChannelModel, &[f64], usize) {
        (&self.e_model, &self.ln_e_abs, self.e_rows.min(self.j_max))
    }

    /// `P(ν1 >= ν2, ν* >= ζ)` and `P(ν2 > ν1, ν* >= ζ)`.
    ///
    /// At `ζ = 0` the first entry is `Δ1`.
    pub fn selection_probs_above(&self, zeta: f64) -> (f64, f64) {
        let m = &self.model;
        let y = m.omega * zeta;
        let rows = self.d_rows.min(self.j_max);
        let max_n = 2 * rows + 1;
        // ln P(Pois(y) <= n) for n = 0..=max_n, accumulated upward.
        let mut ln_cdf = Vec::with_capacity(max_n + 1);
        if y == 0.0 {
            ln_cdf.resize(max_n + 1, 0.0);
        } else {
            let ly = y.ln();
            let mut acc = f64::NEG_INFINITY;
            for n in 0..=max_n {
                acc = log_add_exp(acc, n as f64 * ly - y - ln_factorial(n));
                ln_cdf.push(acc.min(0.0));
            }
        }
        let mut s1 = LogSum::new();
        let mut s2 = LogSum::new();
        for j in 0..=rows {
            for i in 0..=j {
                let k = tri(i, j);
                s1.add(self.ln_mass1[k] + ln_cdf[i + j]);
                s2.add(self.ln_mass2[k] + ln_cdf[i + j]);
            }
        }
        // Beam m contributes ∫_ζ^∞ [e^{-x/δ_m}/δ_m - Σ D^{(m)}_ij x^{i+j} e^{-ωx}] dx.
        let p1 = ((-zeta / m.delta1).exp() - s1.ln().exp()).max(0.0);
        let p2 = ((-zeta / m.delta2).exp() - s2.ln().exp()).max(0.0);
        (p1, p2)
    }
}
