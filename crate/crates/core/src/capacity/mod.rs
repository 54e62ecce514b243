//! Truncated constant-power transmission: the optimal power for a given
//! `(ζ, T_sen)`, the closed-form capacity lower bound, and the search over
//! `(ζ, T_sen)`.

mod closed_form;
mod search;

pub use closed_form::{g_func, h_func, h_func_binomial, v_func, VTable};
pub use search::{optimize_policy, scan_grid, sensing_grid, OptimizedPolicy, SearchControl};

use crate::antenna::{PatternIntegrals, RadiationPattern};
use crate::beams::{BeamChannelModel, SeriesCoefficients};
use crate::error::{invalid, Error, Result};
use crate::sensing::{DetectorStats, SensingConfig};
use crate::special::SeriesControl;

#[allow(unused_imports)]
use num_traits::Float;

/// How the expected beam gain toward the primary user enters the
/// interference constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceModel {
    /// `Δ1 p(κ1 - φ_PU) + Δ2 p(κ2 - φ_PU)`: beam choice treated as
    /// independent of whether the frame is transmitted. Exact only at `ζ = 0`.
    Marginal,
    /// `Σ_m p(κ_m - φ_PU) P(m* = m | ν* >= ζ)`: exact for every `ζ`.
    #[default]
    Conditional,
}

/// Everything needed to evaluate one link geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub sensing: SensingConfig,
    pub pattern: RadiationPattern,
    pub beams: BeamChannelModel,
    /// Mean SU-Tx ↔ PU gain `γ_sp`.
    pub gamma_sp: f64,
    /// PU direction (rad).
    pub phi_pu: f64,
    /// SU-Rx direction (rad).
    pub phi_sr: f64,
    /// Average interference budget `Ī` (W).
    pub i_bar: f64,
    /// Average power budget `P̄` (W).
    pub p_bar: f64,
    pub interference: InterferenceModel,
}

impl ScenarioParams {
    /// Interference power at the SU receiver when the PU is active, `P_p γ_sp`.
    pub fn sigma_p2(&self) -> f64 {
        self.sensing.p_pu * self.gamma_sp
    }

    pub fn validate(&self) -> Result<()> {
        self.sensing.validate(self.pattern.sectors())?;
        for (name, v) in [("gamma_sp", self.gamma_sp), ("i_bar", self.i_bar), ("p_bar", self.p_bar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, alloc::format!("must be positive and finite, got {v}")));
            }
        }
        if !self.phi_pu.is_finite() || !self.phi_sr.is_finite() {
            return Err(invalid("phi", "orientations must be finite"));
        }
        Ok(())
    }
}

/// Which budget limits `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveConstraint {
    Power,
    Interference,
}

/// A fully specified policy with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionPolicy {
    /// Transmit power `Φ` when `ν* >= ζ` and the channel is declared idle.
    pub phi_power: f64,
    pub zeta: f64,
    pub t_sense: f64,
    pub d_t: f64,
    /// `π0 (1 - P_fa)`.
    pub alpha0: f64,
    /// `π1 (1 - P̄_d)`.
    pub beta0: f64,
    /// `β0 γ_sp (Δ1 p(κ1 - φ_PU) + Δ2 p(κ2 - φ_PU))`.
    pub b0: f64,
    pub snr0: f64,
    pub snr1: f64,
    /// `1 - F_{ν*}(ζ)`.
    pub p_above: f64,
    /// `E[β0 γ_sp p(κ* - φ_PU); ν* >= ζ]`: expected interference per unit
    /// power and data fraction.
    pub interference_weight: f64,
    pub detector: DetectorStats,
}

impl TransmissionPolicy {
    /// `D_t π̂0 Φ (1 - F(ζ))`.
    pub fn average_power(&self) -> f64 {
        self.d_t * self.detector.pi_hat0 * self.phi_power * self.p_above
    }

    /// `D_t Φ E[β0 g_sp p(κ* - φ_PU); ν* >= ζ]`.
    pub fn average_interference(&self) -> f64 {
        self.d_t * self.phi_power * self.interference_weight
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    /// Lower bound on the ergodic capacity (bit/s/Hz).
    pub c_lb: f64,
    /// `P̄ - average power`.
    pub apc_slack: f64,
    /// `Ī - average interference`.
    pub aic_slack: f64,
    pub active_constraint: ActiveConstraint,
}

/// How the link gain `ν*` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diversity {
    /// Best of the two sectors around the receiver.
    Selection,
    /// Omnidirectional transmitter: one antenna, `ν* = ν1 ~ Exp(δ1)`.
    Single,
}

/// Scenario with its policy-independent quantities precomputed.
#[derive(Debug, Clone)]
pub struct ScenarioAnalysis {
    pub params: ScenarioParams,
    pub diversity: Diversity,
    pub integrals: PatternIntegrals,
    pub coeffs: SeriesCoefficients,
    /// `Δ1`.
    pub delta1_prob: f64,
    /// `p(κ_m - φ_PU)` for the two candidate beams.
    pub gain_to_pu: [f64; 2],
}

impl ScenarioAnalysis {
    pub fn new(params: ScenarioParams) -> Result<Self> {
        params.validate()?;
        let integrals = params.pattern.compute_integrals()?;
        let coeffs = SeriesCoefficients::new(&params.beams)?;
        let (diversity, delta1_prob) = if params.pattern.is_omni() {
            (Diversity::Single, 1.0)
        } else {
            (Diversity::Selection, params.beams.beam1_selection_prob(&SeriesControl::new(1e-14, 2000))?)
        };
        let gain_to_pu = [params.pattern.gain(0, params.phi_pu)?, params.pattern.gain(1, params.phi_pu)?];
        Ok(Self { params, diversity, integrals, coeffs, delta1_prob, gain_to_pu })
    }

    pub fn model(&self) -> &BeamChannelModel {
        &self.params.beams
    }

    pub fn detector(&self, t_sense: f64) -> Result<DetectorStats> {
        let cfg = self.params.sensing.with_t_sense(t_sense);
        cfg.validate(self.params.pattern.sectors())?;
        DetectorStats::evaluate(&cfg, &self.integrals)
    }

    /// `P(ν* >= x)`.
    pub fn gain_survival(&self, x: f64) -> Result<f64> {
        match self.diversity {
            Diversity::Selection => self.params.beams.selected_gain_survival(x),
            Diversity::Single => Ok((-x / self.params.beams.delta1).exp()),
        }
    }

    /// `P(ν* < x)`.
    pub fn gain_cdf(&self, x: f64) -> Result<f64> {
        match self.diversity {
            Diversity::Selection => self.params.beams.selected_gain_cdf(x),
            Diversity::Single => Ok(-(-x / self.params.beams.delta1).exp_m1()),
        }
    }

    /// Largest admissible truncation threshold.
    pub fn zeta_max(&self) -> f64 {
        10.0 * self.params.beams.delta1.max(self.params.beams.delta2)
    }

    /// Builds the policy for `(ζ, T_sen)` at a given power.
    pub fn policy_with_power(&self, zeta: f64, t_sense: f64, phi_power: f64) -> Result<TransmissionPolicy> {
        if !(zeta >= 0.0) {
            return Err(invalid("zeta", alloc::format!("{zeta} must be non-negative")));
        }
        if !(phi_power >= 0.0) {
            return Err(invalid("phi_power", alloc::format!("{phi_power} must be non-negative")));
        }
        let p = &self.params;
        let detector = self.detector(t_sense)?;
        let d_t = p.sensing.with_t_sense(t_sense).data_fraction();
        let alpha0 = p.sensing.pi0() * (1.0 - detector.p_fa);
        let beta0 = p.sensing.pi1 * (1.0 - p.sensing.pd_target);
        let b0 = beta0 * p.gamma_sp * (self.delta1_prob * self.gain_to_pu[0] + (1.0 - self.delta1_prob) * self.gain_to_pu[1]);
        let p_above = self.gain_survival(zeta)?;
        let interference_weight = match (p.interference, self.diversity) {
            (InterferenceModel::Marginal, _) | (_, Diversity::Single) => b0 * p_above,
            (InterferenceModel::Conditional, Diversity::Selection) => {
                let (p1, p2) = self.coeffs.selection_probs_above(zeta);
                beta0 * p.gamma_sp * (self.gain_to_pu[0] * p1 + self.gain_to_pu[1] * p2)
            }
        };
        Ok(TransmissionPolicy {
            phi_power,
            zeta,
            t_sense,
            d_t,
            alpha0,
            beta0,
            b0,
            snr0: phi_power / p.sensing.sigma_w2,
            snr1: phi_power / (p.sensing.sigma_w2 + p.sigma_p2()),
            p_above,
            interference_weight,
            detector,
        })
    }

    /// Largest `Φ` meeting both budgets for `(ζ, T_sen)`.
    pub fn optimal_phi(&self, zeta: f64, t_sense: f64) -> Result<f64> {
        self.policy(zeta, t_sense).map(|p| p.phi_power)
    }

    /// Policy at `(ζ, T_sen)` with `Φ` set by the tighter budget.
    pub fn policy(&self, zeta: f64, t_sense: f64) -> Result<TransmissionPolicy> {
        let probe = self.policy_with_power(zeta, t_sense, 0.0)?;
        if probe.d_t <= 0.0 {
            return Err(invalid("t_sense", "no data time left in the frame"));
        }
        if !(probe.p_above > 1e-300) {
            return Err(Error::Degenerate(alloc::format!(
                "P(ν* >= ζ) underflows at ζ = {zeta}; no transmission is possible"
            )));
        }
        let by_power = self.params.p_bar / (probe.d_t * probe.detector.pi_hat0 * probe.p_above);
        let by_interference = if probe.interference_weight > 0.0 {
            self.params.i_bar / (probe.d_t * probe.interference_weight)
        } else {
            f64::INFINITY
        };
        let phi = by_power.min(by_interference);
        self.policy_with_power(zeta, t_sense, phi)
    }

    /// Closed-form capacity lower bound for a policy.
    pub fn capacity_lb(&self, pol: &TransmissionPolicy) -> Result<CapacityReport> {
        let c = if pol.phi_power == 0.0 || pol.d_t <= 0.0 {
            0.0
        } else {
            let nats = pol.alpha0 * self.truncated_log_mean(pol.snr0, pol.zeta)?
                + pol.beta0 * self.truncated_log_mean(pol.snr1, pol.zeta)?;
            (pol.d_t / crate::LN_2 * nats).max(0.0)
        };
        let apc_slack = self.params.p_bar - pol.average_power();
        let aic_slack = self.params.i_bar - pol.average_interference();
        let active_constraint = if apc_slack / self.params.p_bar <= aic_slack / self.params.i_bar {
            ActiveConstraint::Power
        } else {
            ActiveConstraint::Interference
        };
        Ok(CapacityReport { c_lb: c, apc_slack, aic_slack, active_constraint })
    }

    /// `E[ln(1 + S ν*); ν* >= ζ]` from the `G` and `V` closed forms.
    pub fn truncated_log_mean(&self, s: f64, zeta: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let m = &self.params.beams;
        if self.diversity == Diversity::Single {
            return g_func(m.delta1, s, zeta);
        }
        let head = g_func(m.delta1, s, zeta)? + g_func(m.delta2, s, zeta)?;
        let rows = self.coeffs.d_rows().min(self.coeffs.j_max());
        let table = VTable::new(m.omega, s, zeta, 2 * rows)?;
        let mut series = 0.0;
        for j in 0..=rows {
            for i in 0..=j {
                series += self.coeffs.ln_mass(i, j).exp() * table.scaled(i + j);
            }
        }
        Ok(head - series)
    }
}
