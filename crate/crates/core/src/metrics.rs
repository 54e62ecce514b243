//! Outage and symbol error probability of the truncated policy.
//!
//! The SEP uses the `Q(√(Ψ·SNR))` abstraction. For one branch with received
//! SNR `S ν*`, integrating by parts against the selected-gain survival
//! function gives
//!
//! `E[Q(√(SΨν*)); ν* >= ζ] = [J(0,S,Ψ,0,ζ)(1-F(ζ)) - J(0,S,Ψ,1/δ2,ζ)
//!     + Σ_j Σ_i E_ij Ψ^{-(i+j)} J(i+j,S,Ψ,ω,ζ)] / (2√(2π))`
//!
//! where `E_ij` and `δ2` are taken in the orientation with `α2 <= α1`.

use crate::beams::BeamChannelModel;
use crate::capacity::{Diversity, ScenarioAnalysis, TransmissionPolicy};
use crate::error::{invalid, Result};
use crate::special::{ln_upper_incomplete_gamma, LogSum};
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// `P_out = P(ν* < ζ) = F_{ν*}(ζ)`.
pub fn outage_probability(model: &BeamChannelModel, zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0) {
        return Err(invalid("zeta", alloc::format!("{zeta} must be non-negative")));
    }
    model.selected_gain_cdf(zeta)
}

/// `ln J(k, S, Ψ, ω, ζ)`.
fn ln_j(k: usize, s: f64, psi: f64, omega: f64, zeta: f64) -> Result<f64> {
    let a = k as f64 + 0.5;
    Ok(-(k as f64) * s.ln() - a * (omega / (s * psi) + 0.5).ln()
        + ln_upper_incomplete_gamma(a, (0.5 * s * psi + omega) * zeta)?)
}

/// `J(k,S,Ψ,ω,ζ) = S^{-k} (ω/(SΨ) + 1/2)^{-k-1/2} Γ(k+1/2, (SΨ/2 + ω)ζ)`,
/// i.e. `√S Ψ^{k+1/2} ∫_ζ^∞ x^{k-1/2} e^{-(SΨ/2+ω)x} dx`.
pub fn j_func(k: usize, s: f64, psi: f64, omega: f64, zeta: f64) -> Result<f64> {
    if !(s > 0.0) || !(psi > 0.0) || !(omega >= 0.0) || !(zeta >= 0.0) {
        return Err(invalid("j_func", alloc::format!("S = {s}, Ψ = {psi}, ω = {omega}, ζ = {zeta}")));
    }
    ln_j(k, s, psi, omega, zeta).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    /// `Ψ` in `Q(√(Ψ·SNR))`.
    pub psi: f64,
}

impl ModulationSpec {
    pub fn new(psi: f64) -> Result<Self> {
        if !(psi > 0.0 && psi.is_finite()) {
            return Err(invalid("psi", alloc::format!("{psi} must be positive")));
        }
        Ok(Self { psi })
    }
}

/// Symbol error probability in both conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepReport {
    /// Averaged over all frames; frames without transmission count as zero.
    pub unconditional: f64,
    /// Averaged over frames that carry data.
    pub conditional: f64,
}

/// `E[Q(√(SΨν*)); ν* >= ζ]` for a single SNR branch.
pub fn truncated_sep_branch(analysis: &ScenarioAnalysis, s: f64, psi: f64, zeta: f64) -> Result<f64> {
    if s == 0.0 {
        // Q(0) on every transmitted frame.
        return Ok(0.5 * analysis.gain_survival(zeta)?);
    }
    let norm = 2.0 * (2.0 * PI).sqrt();
    if analysis.diversity == Diversity::Single {
        let d = analysis.model().delta1;
        let v = (j_func(0, s, psi, 0.0, zeta)? * (-zeta / d).exp() - j_func(0, s, psi, 1.0 / d, zeta)?) / norm;
        return Ok(v.clamp(0.0, 0.5));
    }
    let (m, ln_e, rows) = analysis.coeffs.e_series();
    let survival = m.selected_gain_survival(zeta)?;
    let head = j_func(0, s, psi, 0.0, zeta)? * survival;
    let lead = j_func(0, s, psi, 1.0 / m.delta2, zeta)?;
    let mut tail = LogSum::new();
    let ln_psi = psi.ln();
    for j in 1..=rows {
        for i in 0..j {
            let le = ln_e[j * (j + 1) / 2 + i];
            if le == f64::NEG_INFINITY {
                continue;
            }
            let n = i + j;
            tail.add(le - n as f64 * ln_psi + ln_j(n, s, psi, m.omega, zeta)?);
        }
    }
    // `tail` holds Σ |E_ij| J / Ψ^{i+j}; every E_ij is non-positive.
    let v = (head - lead - tail.ln().exp()) / norm;
    Ok(v.clamp(0.0, 0.5))
}

/// SEP of a policy: `α0` and `β0` branches at `SNR⁽⁰⁾`, `SNR⁽¹⁾`.
pub fn symbol_error_probability(
    analysis: &ScenarioAnalysis,
    pol: &TransmissionPolicy,
    modulation: &ModulationSpec,
) -> Result<SepReport> {
    if pol.phi_power == 0.0 {
        return Ok(SepReport { unconditional: 0.0, conditional: 0.0 });
    }
    let psi = modulation.psi;
    let b0 = truncated_sep_branch(analysis, pol.snr0, psi, pol.zeta)?;
    let b1 = if pol.snr1 == pol.snr0 { b0 } else { truncated_sep_branch(analysis, pol.snr1, psi, pol.zeta)? };
    let unconditional = pol.alpha0 * b0 + pol.beta0 * b1;
    let carrying = (pol.alpha0 + pol.beta0) * pol.p_above;
    let conditional = if carrying > 0.0 { unconditional / carrying } else { 0.0 };
    Ok(SepReport { unconditional, conditional })
}

/// Analytic figures of merit of one policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub c_lb: f64,
    pub p_out: f64,
    pub sep: SepReport,
}

pub fn evaluate_metrics(
    analysis: &ScenarioAnalysis,
    pol: &TransmissionPolicy,
    modulation: &ModulationSpec,
) -> Result<MetricsReport> {
    Ok(MetricsReport {
        c_lb: analysis.capacity_lb(pol)?.c_lb,
        p_out: analysis.gain_cdf(pol.zeta)?,
        sep: symbol_error_probability(analysis, pol, modulation)?,
    })
}
