//! Frame-level simulation of the whole link, used as ground truth for the
//! analytic model.
//!
//! Random numbers come from ChaCha8. A [`RandomStream`] fixes the key (from
//! the seed) and the ChaCha stream id; work is cut into blocks of
//! [`BLOCK_LEN`] draws and block `b` starts at word offset `b << 32`, so any
//! block can be generated independently. Block results are combined with
//! [`merge_tree`] in block order, which makes the outcome independent of how
//! blocks are scheduled across threads.

use crate::antenna::RadiationPattern;
use crate::beams::BeamChannelModel;
use crate::capacity::{Diversity, ScenarioAnalysis, TransmissionPolicy};
use crate::error::{invalid, Result};
use crate::sensing::{DetectorStats, SensingConfig};
use crate::antenna::PatternIntegrals;
use crate::special::gaussian_q;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StandardUniform};

#[allow(unused_imports)]
use num_traits::Float;

/// Draws per block.
pub const BLOCK_LEN: u64 = 4096;

/// Reproducible, independently seekable random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Generator positioned at the start of block `block`.
    pub fn rng_at(&self, block: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng.set_word_pos((block as u128) << 32);
        rng
    }
}

/// Number of blocks needed for `n` draws.
pub fn block_count(n: u64) -> u64 {
    n.div_ceil(BLOCK_LEN)
}

/// Draw count in block `b` out of `n` total.
pub fn block_len(b: u64, n: u64) -> u64 {
    (n - b * BLOCK_LEN).min(BLOCK_LEN)
}

/// Associative combination of partial results.
pub trait Merge {
    fn merge(&mut self, other: &Self);
}

/// Pairwise reduction in index order: `((0,1),(2,3)),...`.
pub fn merge_tree<T: Merge + Default>(mut items: Vec<T>) -> T {
    if items.is_empty() {
        return T::default();
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.merge(&b);
            }
            next.push(a);
        }
        items = next;
    }
    items.pop().unwrap_or_default()
}

/// Runs `f(block, len)` over all blocks sequentially and merges the results.
pub fn run_blocks<T: Merge + Default, F: FnMut(u64, u64) -> T>(n: u64, mut f: F) -> T {
    merge_tree((0..block_count(n)).map(|b| f(b, block_len(b, n))).collect())
}

/// Streaming central moments up to order four.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.merge(&Moments { n: 1, mean: x, m2: 0.0, m3: 0.0, m4: 0.0 });
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn mean_estimate(&self) -> Estimate {
        let se = if self.n < 2 { f64::INFINITY } else { (self.variance() / self.n as f64).sqrt() };
        Estimate { value: self.mean, se, n: self.n }
    }

    /// Sample variance with its large-sample standard error
    /// `√((μ4 - σ⁴(n-3)/(n-1))/n)`.
    pub fn variance_estimate(&self) -> Estimate {
        if self.n < 4 {
            return Estimate { value: self.variance(), se: f64::INFINITY, n: self.n };
        }
        let n = self.n as f64;
        let s2 = self.variance();
        let mu4 = self.m4 / n;
        let v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
        Estimate { value: s2, se: v.max(0.0).sqrt(), n: self.n }
    }
}

impl Merge for Moments {
    fn merge(&mut self, o: &Self) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n as f64, o.n as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d_n = d / n;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3 + o.m3 + d2 * d * na * nb * (na - nb) / (n * n) + 3.0 * d_n * (na * o.m2 - nb * self.m2);
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d_n * d_n * (na * na * o.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * o.m3 - nb * self.m3);
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n += o.n;
    }
}

/// Point estimate with standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub n: u64,
}

impl Estimate {
    /// `|value - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.se > 0.0 {
            (self.value - target).abs() / self.se
        } else if self.value == target {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

#[inline]
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform draw on `[0, 1)`.
#[inline]
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    StandardUniform.sample(rng)
}

/// Circular complex Gaussian with variance `var`.
#[inline]
fn complex_normal(rng: &mut ChaCha8Rng, var: f64) -> (f64, f64) {
    let s = (0.5 * var).sqrt();
    (s * normal(rng), s * normal(rng))
}

/// One draw of `(ν1, ν2)` from the correlated construction
/// `h2 = ρ√(δ2/δ1) h1 + √(1-ρ²) e`.
#[inline]
pub fn draw_beam_gains(model: &BeamChannelModel, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let h1 = complex_normal(rng, model.delta1);
    let e = complex_normal(rng, model.delta2);
    let a = model.rho * (model.delta2 / model.delta1).sqrt();
    let b = (1.0 - model.rho * model.rho).sqrt();
    let h2 = (a * h1.0 + b * e.0, a * h1.1 + b * e.1);
    (h1.0 * h1.0 + h1.1 * h1.1, h2.0 * h2.0 + h2.1 * h2.1)
}

/// Counts from independent draws of the beam pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BeamPairCounts {
    pub n: u64,
    /// Draws with `ν1 >= ν2`.
    pub beam1: u64,
    /// Draws with `ν* < thresholds[k]`.
    pub below: Vec<u64>,
}

impl Merge for BeamPairCounts {
    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.beam1 += o.beam1;
        if self.below.len() < o.below.len() {
            self.below.resize(o.below.len(), 0);
        }
        for (a, b) in self.below.iter_mut().zip(&o.below) {
            *a += b;
        }
    }
}

impl BeamPairCounts {
    pub fn beam1_frequency(&self) -> Estimate {
        proportion(self.beam1, self.n)
    }

    pub fn below_frequency(&self, k: usize) -> Estimate {
        proportion(self.below[k], self.n)
    }

    /// Frequency of `lo <= ν* < hi` for thresholds `k_lo < k_hi`.
    pub fn bin_frequency(&self, k_lo: usize, k_hi: usize) -> Estimate {
        proportion(self.below[k_hi] - self.below[k_lo], self.n)
    }
}

fn proportion(k: u64, n: u64) -> Estimate {
    let p = k as f64 / n as f64;
    Estimate { value: p, se: (p * (1.0 - p) / n as f64).sqrt(), n }
}

pub fn simulate_beam_pairs_block(
    model: &BeamChannelModel,
    thresholds: &[f64],
    stream: &RandomStream,
    block: u64,
    len: u64,
) -> BeamPairCounts {
    let mut rng = stream.rng_at(block);
    let mut out = BeamPairCounts { n: len, beam1: 0, below: alloc::vec![0; thresholds.len()] };
    for _ in 0..len {
        let (v1, v2) = draw_beam_gains(model, &mut rng);
        if v1 >= v2 {
            out.beam1 += 1;
        }
        let best = v1.max(v2);
        for (c, &t) in out.below.iter_mut().zip(thresholds) {
            if best < t {
                *c += 1;
            }
        }
    }
    out
}

pub fn simulate_beam_pairs(model: &BeamChannelModel, n: u64, thresholds: &[f64], stream: &RandomStream) -> BeamPairCounts {
    run_blocks(n, |b, len| simulate_beam_pairs_block(model, thresholds, stream, b, len))
}

/// Sample-level sector sweep: `M N` samples of `y = ψ s + w`.
#[derive(Debug, Clone, Copy)]
pub struct SensingSampler {
    pattern: RadiationPattern,
    n_samples: usize,
    sigma_w2: f64,
    p_pu: f64,
    gamma_pu: f64,
}

impl SensingSampler {
    pub fn new(cfg: &SensingConfig, pattern: &RadiationPattern) -> Result<Self> {
        Ok(Self {
            pattern: *pattern,
            n_samples: cfg.samples_per_sector(pattern.sectors())?,
            sigma_w2: cfg.sigma_w2,
            p_pu: cfg.p_pu,
            gamma_pu: cfg.gamma_pu,
        })
    }

    /// Energy statistic `T` for one sensing window. Under `H1` the PU
    /// direction is drawn uniformly for the window.
    pub fn statistic(&self, active: bool, rng: &mut ChaCha8Rng) -> f64 {
        let m = self.pattern.sectors();
        let phi = if active { TAU * uniform(rng) } else { 0.0 };
        let mut acc = 0.0;
        for sector in 0..m {
            let g = if active { self.gamma_pu * self.pattern.base_gain(phi - self.pattern.sector_axis(sector)) } else { 0.0 };
            for _ in 0..self.n_samples {
                let w = complex_normal(rng, self.sigma_w2);
                let y = if active {
                    let psi = complex_normal(rng, g);
                    let s = complex_normal(rng, self.p_pu);
                    (psi.0 * s.0 - psi.1 * s.1 + w.0, psi.0 * s.1 + psi.1 * s.0 + w.1)
                } else {
                    w
                };
                acc += y.0 * y.0 + y.1 * y.1;
            }
        }
        acc / (m * self.n_samples) as f64
    }
}

/// `η = μ + σ_{T|H1} Q⁻¹(P̄_d)`.
pub fn detector_threshold_from_pd(cfg: &SensingConfig, ints: &PatternIntegrals) -> Result<f64> {
    DetectorStats::evaluate(cfg, ints)?.threshold(cfg.pd_target)
}

/// Paired `H0`/`H1` sensing trials.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SensingCounts {
    pub t_h0: Moments,
    pub t_h1: Moments,
    pub false_alarm: Moments,
    pub detection: Moments,
}

impl Merge for SensingCounts {
    fn merge(&mut self, o: &Self) {
        self.t_h0.merge(&o.t_h0);
        self.t_h1.merge(&o.t_h1);
        self.false_alarm.merge(&o.false_alarm);
        self.detection.merge(&o.detection);
    }
}

pub fn simulate_sensing_block(sampler: &SensingSampler, eta: f64, stream: &RandomStream, block: u64, len: u64) -> SensingCounts {
    let mut rng = stream.rng_at(block);
    let mut out = SensingCounts::default();
    for _ in 0..len {
        let t0 = sampler.statistic(false, &mut rng);
        let t1 = sampler.statistic(true, &mut rng);
        out.t_h0.push(t0);
        out.t_h1.push(t1);
        out.false_alarm.push(if t0 > eta { 1.0 } else { 0.0 });
        out.detection.push(if t1 > eta { 1.0 } else { 0.0 });
    }
    out
}

pub fn simulate_sensing(sampler: &SensingSampler, eta: f64, n_trials: u64, stream: &RandomStream) -> SensingCounts {
    run_blocks(n_trials, |b, len| simulate_sensing_block(sampler, eta, stream, b, len))
}

/// How the energy statistic is produced in frame simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SensingModel {
    /// Gaussian `T` with the analytic moments.
    #[default]
    Clt,
    /// Full sample-level sector sweep.
    Samples,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOptions {
    pub sensing: SensingModel,
    /// `Ψ` for the per-frame `Q(√(Ψ·SNR))`.
    pub psi: f64,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { sensing: SensingModel::Clt, psi: 4.0 }
    }
}

/// Running sums for every per-frame quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameAccumulator {
    pub false_alarm: Moments,
    pub detection: Moments,
    pub declared_idle: Moments,
    pub beam1: Moments,
    pub t_h0: Moments,
    pub t_h1: Moments,
    pub capacity: Moments,
    pub capacity_lb: Moments,
    /// Per-frame `rate - rate_lb` on common draws.
    pub jensen_gap: Moments,
    pub aic: Moments,
    pub apc: Moments,
    pub outage: Moments,
    pub sep: Moments,
    pub sep_transmitted: Moments,
}

impl Merge for FrameAccumulator {
    fn merge(&mut self, o: &Self) {
        self.false_alarm.merge(&o.false_alarm);
        self.detection.merge(&o.detection);
        self.declared_idle.merge(&o.declared_idle);
        self.beam1.merge(&o.beam1);
        self.t_h0.merge(&o.t_h0);
        self.t_h1.merge(&o.t_h1);
        self.capacity.merge(&o.capacity);
        self.capacity_lb.merge(&o.capacity_lb);
        self.jensen_gap.merge(&o.jensen_gap);
        self.aic.merge(&o.aic);
        self.apc.merge(&o.apc);
        self.outage.merge(&o.outage);
        self.sep.merge(&o.sep);
        self.sep_transmitted.merge(&o.sep_transmitted);
    }
}

/// Empirical counterparts of the analytic quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameReport {
    pub frames: u64,
    pub p_fa: Estimate,
    pub p_d: Estimate,
    pub pi_hat0: Estimate,
    pub delta1: Estimate,
    pub t_mean_h0: Estimate,
    pub t_var_h0: Estimate,
    pub t_mean_h1: Estimate,
    pub t_var_h1: Estimate,
    /// Ergodic capacity with the sampled interference gain (bit/s/Hz).
    pub capacity: Estimate,
    /// Same with the interference gain replaced by its mean.
    pub capacity_lb: Estimate,
    /// `capacity - capacity_lb`, estimated from paired frames (much smaller
    /// standard error than the difference of the two estimates).
    pub jensen_gap: Estimate,
    /// Average interference at the PU.
    pub aic_lhs: Estimate,
    /// Average transmit power.
    pub apc_lhs: Estimate,
    pub p_out: Estimate,
    pub sep: Estimate,
    pub sep_conditional: Estimate,
}

impl FrameAccumulator {
    pub fn report(&self) -> FrameReport {
        FrameReport {
            frames: self.beam1.count(),
            p_fa: self.false_alarm.mean_estimate(),
            p_d: self.detection.mean_estimate(),
            pi_hat0: self.declared_idle.mean_estimate(),
            delta1: self.beam1.mean_estimate(),
            t_mean_h0: self.t_h0.mean_estimate(),
            t_var_h0: self.t_h0.variance_estimate(),
            t_mean_h1: self.t_h1.mean_estimate(),
            t_var_h1: self.t_h1.variance_estimate(),
            capacity: self.capacity.mean_estimate(),
            capacity_lb: self.capacity_lb.mean_estimate(),
            jensen_gap: self.jensen_gap.mean_estimate(),
            aic_lhs: self.aic.mean_estimate(),
            apc_lhs: self.apc.mean_estimate(),
            p_out: self.outage.mean_estimate(),
            sep: self.sep.mean_estimate(),
            sep_conditional: self.sep_transmitted.mean_estimate(),
        }
    }
}

/// Per-frame simulator for one scenario and policy.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    options: FrameOptions,
    sampler: SensingSampler,
    model: BeamChannelModel,
    single: bool,
    pi1: f64,
    eta: f64,
    mu0: f64,
    sd_h0: f64,
    mu1: f64,
    sd_h1: f64,
    sigma_w2: f64,
    p_pu: f64,
    sigma_p2: f64,
    gamma_sp: f64,
    gain_to_pu: [f64; 2],
    zeta: f64,
    phi_power: f64,
    d_t: f64,
}

impl FrameSimulator {
    pub fn new(analysis: &ScenarioAnalysis, pol: &TransmissionPolicy, options: FrameOptions) -> Result<Self> {
        if !(options.psi > 0.0) {
            return Err(invalid("psi", "must be positive"));
        }
        let p = &analysis.params;
        let cfg = p.sensing.with_t_sense(pol.t_sense);
        let det = DetectorStats::evaluate(&cfg, &analysis.integrals)?;
        Ok(Self {
            options,
            sampler: SensingSampler::new(&cfg, &p.pattern)?,
            model: p.beams,
            single: analysis.diversity == Diversity::Single,
            pi1: cfg.pi1,
            eta: det.threshold(cfg.pd_target)?,
            mu0: cfg.sigma_w2,
            sd_h0: det.var_h0.sqrt(),
            mu1: det.mu1,
            sd_h1: det.var_h1.sqrt(),
            sigma_w2: cfg.sigma_w2,
            p_pu: cfg.p_pu,
            sigma_p2: p.sigma_p2(),
            gamma_sp: p.gamma_sp,
            gain_to_pu: analysis.gain_to_pu,
            zeta: pol.zeta,
            phi_power: pol.phi_power,
            d_t: pol.d_t,
        })
    }

    pub fn simulate_block(&self, stream: &RandomStream, block: u64, len: u64) -> FrameAccumulator {
        let mut rng = stream.rng_at(block);
        let mut acc = FrameAccumulator::default();
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        for _ in 0..len {
            let active = uniform(&mut rng) < self.pi1;
            let t = match self.options.sensing {
                SensingModel::Clt => {
                    let z = normal(&mut rng);
                    if active { self.mu1 + self.sd_h1 * z } else { self.mu0 + self.sd_h0 * z }
                }
                SensingModel::Samples => self.sampler.statistic(active, &mut rng),
            };
            let busy = t > self.eta;
            let (v1, v2) = if self.single {
                (self.model.delta1 * <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng), 0.0)
            } else {
                draw_beam_gains(&self.model, &mut rng)
            };
            let g_sp = self.gamma_sp * <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng);
            let beam = if v1 >= v2 { 0 } else { 1 };
            let best = v1.max(v2);
            let on = !busy && best >= self.zeta;

            if active {
                acc.t_h1.push(t);
                acc.detection.push(ind(busy));
            } else {
                acc.t_h0.push(t);
                acc.false_alarm.push(ind(busy));
            }
            acc.declared_idle.push(ind(!busy));
            acc.beam1.push(ind(beam == 0));
            acc.outage.push(ind(best < self.zeta));

            let power = if on { self.phi_power } else { 0.0 };
            acc.apc.push(self.d_t * power);
            acc.aic.push(if active { self.d_t * power * g_sp * self.gain_to_pu[beam] } else { 0.0 });

            let (rate, rate_lb, sep) = if on {
                let rx = self.phi_power * best;
                let (snr, snr_mean) = if active {
                    (rx / (self.sigma_w2 + self.p_pu * g_sp), rx / (self.sigma_w2 + self.sigma_p2))
                } else {
                    (rx / self.sigma_w2, rx / self.sigma_w2)
                };
                let q = gaussian_q((self.options.psi * snr_mean).sqrt());
                acc.sep_transmitted.push(q);
                (self.d_t * snr.ln_1p() / crate::LN_2, self.d_t * snr_mean.ln_1p() / crate::LN_2, q)
            } else {
                (0.0, 0.0, 0.0)
            };
            acc.capacity.push(rate);
            acc.capacity_lb.push(rate_lb);
            acc.jensen_gap.push(rate - rate_lb);
            acc.sep.push(sep);
        }
        acc
    }
}

/// Sequential frame simulation; the `std` companion crate runs the same
/// blocks in parallel.
pub fn simulate_frames(
    analysis: &ScenarioAnalysis,
    pol: &TransmissionPolicy,
    n_frames: u64,
    stream: &RandomStream,
    options: FrameOptions,
) -> Result<FrameReport> {
    if n_frames == 0 {
        return Err(invalid("n_frames", "must be at least 1"));
    }
    let sim = FrameSimulator::new(analysis, pol, options)?;
    Ok(run_blocks(n_frames, |b, len| sim.simulate_block(stream, b, len)).report())
}
