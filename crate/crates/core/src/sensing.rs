//! Sector-sweep energy detection.
//!
//! The sensing window is split evenly over the `M` sectors with `N` samples
//! each. The test statistic `T` is the average of `|y_m(n)|²` over all `MN`
//! samples and is treated as Gaussian under both hypotheses.

use crate::antenna::PatternIntegrals;
use crate::error::{invalid, Error, Result};
use crate::special::{gaussian_q, gaussian_q_inv};

#[allow(unused_imports)]
use num_traits::Float;

/// Frame timing and primary-user link parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingConfig {
    pub t_frame: f64,
    pub t_train: f64,
    pub t_sample: f64,
    pub t_sense: f64,
    /// PU transmit power `P_p`.
    pub p_pu: f64,
    /// Noise power `σ_w²`.
    pub sigma_w2: f64,
    /// Mean PU→SU gain `γ`.
    pub gamma_pu: f64,
    /// Prior probability that the PU is active.
    pub pi1: f64,
    /// Target detection probability `P̄_d`.
    pub pd_target: f64,
}

impl SensingConfig {
    pub fn pi0(&self) -> f64 {
        1.0 - self.pi1
    }

    /// Checks the static invariants; `sectors` is needed for `N >= 1`.
    pub fn validate(&self, sectors: usize) -> Result<()> {
        let pos = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, alloc::format!("must be positive, got {v}")))
            }
        };
        pos("t_frame", self.t_frame)?;
        pos("t_sample", self.t_sample)?;
        pos("t_sense", self.t_sense)?;
        pos("sigma_w2", self.sigma_w2)?;
        pos("gamma_pu", self.gamma_pu)?;
        if !(self.t_train >= 0.0) {
            return Err(invalid("t_train", "must be non-negative"));
        }
        if !(self.p_pu >= 0.0 && self.p_pu.is_finite()) {
            return Err(invalid("p_pu", "must be non-negative"));
        }
        if self.t_sense >= self.t_frame - self.t_train {
            return Err(invalid(
                "t_sense",
                alloc::format!("{} s leaves no data time in a {} s frame", self.t_sense, self.t_frame),
            ));
        }
        if !(self.pi1 >= 0.0 && self.pi1 < 1.0) {
            return Err(invalid("pi1", alloc::format!("{} not in [0, 1)", self.pi1)));
        }
        if !(self.pd_target > 0.0 && self.pd_target < 1.0) {
            return Err(invalid("pd_target", alloc::format!("{} not in (0, 1)", self.pd_target)));
        }
        self.samples_per_sector(sectors).map(|_| ())
    }

    /// `N = floor(T_sen / (M T_s))`, robust to representation error in the
    /// ratio (e.g. 1.28 ms / 80 µs).
    pub fn samples_per_sector(&self, sectors: usize) -> Result<usize> {
        let ratio = self.t_sense / (sectors as f64 * self.t_sample);
        let n = (ratio * (1.0 + 1e-12)).floor();
        if !(n >= 1.0) {
            return Err(invalid(
                "t_sense",
                alloc::format!("yields N = {n} samples per sector; at least one is required"),
            ));
        }
        Ok(n as usize)
    }

    /// Fraction of the frame left for data, `D_t`.
    pub fn data_fraction(&self) -> f64 {
        (self.t_frame - self.t_sense - self.t_train) / self.t_frame
    }

    pub fn with_t_sense(&self, t_sense: f64) -> Self {
        Self { t_sense, ..*self }
    }
}

/// `σ²_{T|H0} = σ_w⁴ / (MN)`.
pub fn variance_h0(cfg: &SensingConfig, sectors: usize) -> Result<f64> {
    let n = cfg.samples_per_sector(sectors)?;
    Ok(cfg.sigma_w2 * cfg.sigma_w2 / (sectors * n) as f64)
}

/// `μ = P_p γ E_A + σ_w²`.
pub fn mean_h1(cfg: &SensingConfig, ints: &PatternIntegrals) -> f64 {
    cfg.p_pu * cfg.gamma_pu * ints.e_a + cfg.sigma_w2
}

/// `σ²_{T|H1}` including the between-sector cross term.
///
/// Errors if the combination is not strictly positive instead of clamping.
pub fn variance_h1(cfg: &SensingConfig, ints: &PatternIntegrals) -> Result<f64> {
    let m = ints.sectors();
    let n = cfg.samples_per_sector(m)?;
    let mn = (m * n) as f64;
    let s2 = cfg.sigma_w2;
    let gp = cfg.gamma_pu * cfg.p_pu;
    let first = (s2 * s2 + 2.0 * gp * ints.e_a * s2 + gp * gp * (3.0 * ints.e_b - mn * ints.e_a * ints.e_a)) / mn;
    let second = gp * gp / (m * m) as f64 * ints.cross_sum();
    let v = first + second;
    if !(v > 0.0) {
        return Err(Error::Degenerate(alloc::format!(
            "H1 variance evaluates to {v} (N = {n}, M = {m}); the parameter set is outside the model's validity"
        )));
    }
    Ok(v)
}

/// `P_fa = Q((σ1 Q⁻¹(P̄_d) + μ − σ_w²) / σ0)`.
pub fn false_alarm_at_pd(cfg: &SensingConfig, mu1: f64, var_h0: f64, var_h1: f64) -> Result<f64> {
    let z = gaussian_q_inv(cfg.pd_target)?;
    Ok(gaussian_q((var_h1.sqrt() * z + mu1 - cfg.sigma_w2) / var_h0.sqrt()))
}

/// Detection probability at a given false-alarm rate (inverse of the above).
pub fn detection_at_pfa(cfg: &SensingConfig, p_fa: f64, mu1: f64, var_h0: f64, var_h1: f64) -> Result<f64> {
    let z = gaussian_q_inv(p_fa)?;
    Ok(gaussian_q((var_h0.sqrt() * z + cfg.sigma_w2 - mu1) / var_h1.sqrt()))
}

/// `(π̂0, π̂1)`: probabilities of declaring the channel idle / busy.
pub fn outcome_probabilities(cfg: &SensingConfig, p_fa: f64) -> (f64, f64) {
    let pi_hat0 = cfg.pi1 * (1.0 - cfg.pd_target) + cfg.pi0() * (1.0 - p_fa);
    let pi_hat1 = cfg.pi1 * cfg.pd_target + cfg.pi0() * p_fa;
    (pi_hat0, pi_hat1)
}

/// Detector moments and operating point for one sensing duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorStats {
    pub n_samples: usize,
    pub mu1: f64,
    pub var_h0: f64,
    pub var_h1: f64,
    pub p_fa: f64,
    pub pi_hat0: f64,
    pub pi_hat1: f64,
}

impl DetectorStats {
    pub fn evaluate(cfg: &SensingConfig, ints: &PatternIntegrals) -> Result<Self> {
        let m = ints.sectors();
        let n_samples = cfg.samples_per_sector(m)?;
        let mu1 = mean_h1(cfg, ints);
        let var_h0 = variance_h0(cfg, m)?;
        let var_h1 = variance_h1(cfg, ints)?;
        let p_fa = false_alarm_at_pd(cfg, mu1, var_h0, var_h1)?;
        let (pi_hat0, pi_hat1) = outcome_probabilities(cfg, p_fa);
        Ok(Self { n_samples, mu1, var_h0, var_h1, p_fa, pi_hat0, pi_hat1 })
    }

    /// Threshold `η = μ + σ1 Q⁻¹(P̄_d)` that realizes the detection target.
    pub fn threshold(&self, pd_target: f64) -> Result<f64> {
        Ok(self.mu1 + self.var_h1.sqrt() * gaussian_q_inv(pd_target)?)
    }
}
