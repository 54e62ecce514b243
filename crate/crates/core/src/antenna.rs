//! Sectored azimuth beampattern and its overlap integrals.
//!
//! Each of the `M` sectors has the same shape rotated to its axis
//! `κ_m = 2π m / M` (0-based `m`):
//! `p(φ) = A1 + A0 exp(-ln2 · (wrap(φ)/φ3dB)²)`, with `A1 = L·A0`.

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadControl};
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

/// `x mod 2π` in `[0, 2π]` (the upper end only through rounding).
fn rem_tau(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// Maps an angle onto `[-π, π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let mut r = rem_tau(phi + PI);
    if r >= TAU {
        r -= TAU;
    }
    r - PI
}

/// Gaussian main lobe on a constant side-lobe floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    /// Offset (rad) at which the main lobe falls to half its peak.
    pub phi_3db: f64,
    /// Side-lobe level `L = A1/A0`.
    pub side_lobe: f64,
    /// Main-lobe amplitude `A0`.
    pub a0: f64,
}

impl GaussianBeam {
    fn a1(&self) -> f64 {
        self.side_lobe * self.a0
    }

    fn gain(&self, offset: f64) -> f64 {
        let u = wrap_angle(offset) / self.phi_3db;
        self.a1() + self.a0 * (-LN_2 * u * u).exp()
    }

    /// Circular mean of the pattern, in closed form.
    fn mean_gain(&self) -> f64 {
        let s = LN_2.sqrt() / self.phi_3db;
        self.a1() + self.a0 * (PI.sqrt() / (2.0 * PI * s)) * libm::erf(PI * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamShape {
    Gaussian(GaussianBeam),
    /// Isotropic reference, `p ≡ 1`.
    Omni,
}

/// `M` identical sector beams evenly spaced in azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationPattern {
    sectors: usize,
    shape: BeamShape,
}

impl RadiationPattern {
    pub fn gaussian(sectors: usize, phi_3db: f64, side_lobe: f64, a0: f64) -> Result<Self> {
        if sectors == 0 {
            return Err(invalid("sectors", "need at least one sector"));
        }
        if !(phi_3db > 0.0 && phi_3db < PI) {
            return Err(invalid("phi_3db", alloc::format!("{phi_3db} rad not in (0, π)")));
        }
        if !(side_lobe > 0.0 && side_lobe < 1.0) {
            return Err(invalid("side_lobe", alloc::format!("{side_lobe} not in (0, 1)")));
        }
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(invalid("a0", alloc::format!("{a0} must be positive")));
        }
        Ok(Self { sectors, shape: BeamShape::Gaussian(GaussianBeam { phi_3db, side_lobe, a0 }) })
    }

    pub fn omni(sectors: usize) -> Result<Self> {
        if sectors == 0 {
            return Err(invalid("sectors", "need at least one sector"));
        }
        Ok(Self { sectors, shape: BeamShape::Omni })
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn shape(&self) -> &BeamShape {
        &self.shape
    }

    pub fn is_omni(&self) -> bool {
        matches!(self.shape, BeamShape::Omni)
    }

    /// Axis of sector `m` (0-based).
    pub fn sector_axis(&self, m: usize) -> f64 {
        TAU * m as f64 / self.sectors as f64
    }

    /// Single-sector gain at angular offset `offset` from its own axis.
    pub fn base_gain(&self, offset: f64) -> f64 {
        match &self.shape {
            BeamShape::Gaussian(g) => g.gain(offset),
            BeamShape::Omni => 1.0,
        }
    }

    /// Gain of sector `m` (0-based) toward azimuth `phi`.
    pub fn gain(&self, m: usize, phi: f64) -> Result<f64> {
        if m >= self.sectors {
            return Err(Error::Index { index: m, len: self.sectors });
        }
        Ok(self.base_gain(phi - self.sector_axis(m)))
    }

    /// Mean gain over the circle, `E_A`.
    pub fn mean_gain(&self) -> f64 {
        match &self.shape {
            BeamShape::Gaussian(g) => g.mean_gain(),
            BeamShape::Omni => 1.0,
        }
    }

    /// Rescales `A0` so that `E_A = 1`. The shape is unchanged.
    pub fn normalize_for_unit_ea(&self) -> Self {
        match self.shape {
            BeamShape::Gaussian(g) => {
                let a0 = g.a0 / g.mean_gain();
                Self { sectors: self.sectors, shape: BeamShape::Gaussian(GaussianBeam { a0, ..g }) }
            }
            BeamShape::Omni => *self,
        }
    }

    /// `E_A`, `E_B` and the full `E_{mm'}` matrix by adaptive quadrature.
    pub fn compute_integrals(&self) -> Result<PatternIntegrals> {
        let m = self.sectors;
        if self.is_omni() {
            return Ok(PatternIntegrals { sectors: m, e_a: 1.0, e_b: 1.0, e_cross: alloc::vec![1.0; m * m] });
        }
        let ctl = QuadControl { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
        let e_a = self.circular_mean(|t| self.base_gain(t), &[0.0, PI], &ctl)?;
        let mut e_cross = alloc::vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let (ki, kj) = (self.sector_axis(i), self.sector_axis(j));
                let breaks = [ki, kj, rem_tau(ki + PI), rem_tau(kj + PI)];
                let v = self.circular_mean(
                    |t| self.base_gain(t - ki) * self.base_gain(t - kj),
                    &breaks,
                    &ctl,
                )?;
                e_cross[i * m + j] = v;
                e_cross[j * m + i] = v;
            }
        }
        let e_b = e_cross[0];
        Ok(PatternIntegrals { sectors: m, e_a, e_b, e_cross })
    }

    fn circular_mean<F: FnMut(f64) -> f64>(&self, f: F, breaks: &[f64], ctl: &QuadControl) -> Result<f64> {
        let mut cuts: Vec<f64> = breaks.iter().map(|&b| rem_tau(b)).collect();
        if let BeamShape::Gaussian(g) = &self.shape {
            // Resolve the main lobe: add cuts one beamwidth either side of each axis.
            let extra: Vec<f64> = cuts
                .iter()
                .flat_map(|&c| [rem_tau(c - 2.0 * g.phi_3db), rem_tau(c + 2.0 * g.phi_3db)])
                .collect();
            cuts.extend(extra);
        }
        Ok(integrate(f, 0.0, TAU, &cuts, ctl)?.value / TAU)
    }
}

/// Overlap integrals of the sector patterns over a uniform azimuth.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternIntegrals {
    sectors: usize,
    /// `(1/2π) ∫ p(θ) dθ`.
    pub e_a: f64,
    /// `(1/2π) ∫ p(θ)² dθ`.
    pub e_b: f64,
    e_cross: Vec<f64>,
}

impl PatternIntegrals {
    pub fn sectors(&self) -> usize {
        self.sectors
    }

    /// `E_{mm'} = (1/2π) ∫ p_m(θ) p_{m'}(θ) dθ`, 0-based indices.
    pub fn cross(&self, m: usize, mp: usize) -> f64 {
        self.e_cross[m * self.sectors + mp]
    }

    /// `Σ_m Σ_m' E_{mm'}`.
    pub fn cross_sum(&self) -> f64 {
        self.e_cross.iter().sum()
    }
}
