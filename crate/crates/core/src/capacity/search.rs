//! Search over the truncation threshold `ζ` and the sensing time.
//!
//! Sensing times are restricted to `T_sen = N M T_s` so that every candidate
//! uses all of its samples. A coarse grid picks the starting cell, then
//! golden-section steps alternate between `ζ` (continuous) and `N` (integer).

use super::{CapacityReport, ScenarioAnalysis, TransmissionPolicy};
use crate::error::{Error, Result};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchControl {
    pub zeta_points: usize,
    pub sensing_points: usize,
    /// Alternating refinement passes after the coarse grid.
    pub refine_rounds: usize,
    /// Golden-section stopping width in `ζ`, relative to `ζ_max`.
    pub zeta_tol: f64,
}

impl Default for SearchControl {
    fn default() -> Self {
        Self { zeta_points: 20, sensing_points: 20, refine_rounds: 6, zeta_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedPolicy {
    pub policy: TransmissionPolicy,
    pub report: CapacityReport,
    pub evaluations: usize,
}

/// Admissible sensing times `N M T_s`, `N = 1, 2, ...`, ascending.
pub fn sensing_grid(analysis: &ScenarioAnalysis) -> Vec<f64> {
    let cfg = &analysis.params.sensing;
    let unit = analysis.params.pattern.sectors() as f64 * cfg.t_sample;
    let limit = cfg.t_frame - cfg.t_train;
    (1..).map(|n| n as f64 * unit).take_while(|&t| t < limit).collect()
}

struct Objective<'a> {
    analysis: &'a ScenarioAnalysis,
    t_grid: Vec<f64>,
    best: Option<OptimizedPolicy>,
    last_error: Option<Error>,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    fn new(analysis: &'a ScenarioAnalysis) -> Result<Self> {
        let t_grid = sensing_grid(analysis);
        if t_grid.is_empty() {
            return Err(Error::Infeasible("no sensing time fits in the frame".into()));
        }
        Ok(Self { analysis, t_grid, best: None, last_error: None, evaluations: 0 })
    }

    /// Capacity at `(ζ, N)` with `N` 1-based; failures count as `-∞`.
    fn eval(&mut self, zeta: f64, n: usize) -> f64 {
        self.evaluations += 1;
        let t = self.t_grid[n - 1];
        let res = self
            .analysis
            .policy(zeta, t)
            .and_then(|pol| self.analysis.capacity_lb(&pol).map(|rep| (pol, rep)));
        match res {
            Ok((policy, report)) => {
                let c = report.c_lb;
                if self.best.map_or(true, |b| c > b.report.c_lb) {
                    self.best = Some(OptimizedPolicy { policy, report, evaluations: 0 });
                }
                c
            }
            Err(e) => {
                self.last_error = Some(e);
                f64::NEG_INFINITY
            }
        }
    }

    fn finish(self) -> Result<OptimizedPolicy> {
        match self.best {
            Some(b) if b.report.c_lb > 0.0 => Ok(OptimizedPolicy { evaluations: self.evaluations, ..b }),
            Some(b) => Err(Error::Infeasible(alloc::format!(
                "capacity bound is {} at every evaluated policy",
                b.report.c_lb
            ))),
            None => Err(self
                .last_error
                .unwrap_or_else(|| Error::Infeasible("no policy could be evaluated".into()))),
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` roughly even integers in `1..=n_max`, deduplicated, ascending.
fn integer_grid(n_max: usize, n: usize) -> Vec<usize> {
    if n >= n_max {
        return (1..=n_max).collect();
    }
    let mut v: Vec<usize> = linspace(1.0, n_max as f64, n).into_iter().map(|x| x.round() as usize).collect();
    v.dedup();
    v
}

/// Exhaustive evaluation on a `zeta_points × sensing_points` grid.
pub fn scan_grid(analysis: &ScenarioAnalysis, zeta_points: usize, sensing_points: usize) -> Result<OptimizedPolicy> {
    let mut obj = Objective::new(analysis)?;
    let zetas = linspace(0.0, analysis.zeta_max(), zeta_points.max(1));
    let ns = integer_grid(obj.t_grid.len(), sensing_points.max(1));
    for &n in &ns {
        for &z in &zetas {
            obj.eval(z, n);
        }
    }
    obj.finish()
}

/// Maximizes the capacity bound over `(ζ, T_sen)` with `Φ` from
/// [`ScenarioAnalysis::policy`].
pub fn optimize_policy(analysis: &ScenarioAnalysis, ctl: &SearchControl) -> Result<OptimizedPolicy> {
    let mut obj = Objective::new(analysis)?;
    let z_max = analysis.zeta_max();
    let n_max = obj.t_grid.len();
    let zetas = linspace(0.0, z_max, ctl.zeta_points.max(2));
    let ns = integer_grid(n_max, ctl.sensing_points.max(1));
    let z_step = z_max / (zetas.len() - 1) as f64;
    let n_step = if ns.len() > 1 { (n_max - 1).div_ceil(ns.len() - 1) } else { n_max };

    let mut best = (f64::NEG_INFINITY, 0.0, 1);
    for &n in &ns {
        for &z in &zetas {
            let c = obj.eval(z, n);
            if c > best.0 {
                best = (c, z, n);
            }
        }
    }
    if !best.0.is_finite() {
        return obj.finish();
    }

    let (mut z_half, mut n_half) = (z_step, n_step);
    for _ in 0..ctl.refine_rounds {
        let (_, z0, n0) = best;
        let (lo, hi) = ((z0 - z_half).max(0.0), (z0 + z_half).min(z_max));
        let (c, z) = golden_max(|z| obj.eval(z, n0), lo, hi, ctl.zeta_tol * z_max);
        if c > best.0 {
            best = (c, z, n0);
        }
        let (_, z1, _) = best;
        let (lo, hi) = (n0.saturating_sub(n_half).max(1), (n0 + n_half).min(n_max));
        let (c, n) = integer_golden_max(|n| obj.eval(z1, n), lo, hi);
        if c > best.0 {
            best = (c, z1, n);
        }
        z_half = (z_half * 0.5).max(ctl.zeta_tol * z_max);
        n_half = (n_half / 2).max(2);
    }
    obj.finish()
}

/// Golden-section maximization on `[lo, hi]`; returns the best value seen.
fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f1 >= f2 { (f1, x1) } else { (f2, x2) };
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best.0 {
                best = (f2, x2);
            }
        }
    }
    best
}

/// Golden-section search over the integers `lo..=hi`, finished by a scan
/// once the bracket is a few points wide.
fn integer_golden_max<F: FnMut(usize) -> f64>(mut f: F, mut lo: usize, mut hi: usize) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, lo);
    let mut probe = |n: usize, best: &mut (f64, usize)| {
        let v = f(n);
        if v > best.0 || (v == best.0 && n < best.1) {
            *best = (v, n);
        }
        v
    };
    while hi - lo > 3 {
        let span = (hi - lo) as f64;
        let a = hi - (INV_PHI * span).round() as usize;
        let b = lo + (INV_PHI * span).round() as usize;
        let (a, b) = if a < b { (a, b) } else { (lo + (hi - lo) / 3, hi - (hi - lo) / 3) };
        let (fa, fb) = (probe(a, &mut best), probe(b, &mut best));
        if fa >= fb {
            hi = b;
        } else {
            lo = a;
        }
    }
    for n in lo..=hi {
        probe(n, &mut best);
    }
    best
}
