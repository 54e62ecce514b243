//! Optimized capacity, outage and SEP averaged over link orientation.

use super::averaging_antennas;
use crate::config::{Antenna, ExperimentConfig};
use crate::error::AppResult;
use crate::orientation::draw_orientations;
use crate::parallel::simulate_frames;
use crate::streams;
use crate::table::{Audit, Cell, Table};
use rayon::prelude::*;
use sectorcap_core::capacity::{optimize_policy, SearchControl};
use sectorcap_core::metrics::{evaluate_metrics, ModulationSpec};
use sectorcap_core::montecarlo::{Estimate, FrameOptions, FrameReport, RandomStream};

/// Optimized policy and its figures of merit at one orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationResult {
    pub c_lb: f64,
    pub zeta: f64,
    pub t_sense: f64,
    pub phi_power: f64,
    pub p_out: f64,
    pub sep: f64,
    pub sep_conditional: f64,
    pub aic: f64,
    pub apc: f64,
    pub i_bar: f64,
    pub p_bar: f64,
    pub mc: Option<FrameReport>,
}

/// Orientation averages for one sweep value and antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedPoint {
    pub axis_value: f64,
    pub antenna: Antenna,
    pub per_orientation: Vec<OrientationResult>,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Equal-weight average of independent estimates.
fn mean_estimate(v: &[Estimate]) -> Estimate {
    let k = v.len() as f64;
    Estimate {
        value: v.iter().map(|e| e.value).sum::<f64>() / k,
        se: v.iter().map(|e| e.se * e.se).sum::<f64>().sqrt() / k,
        n: v.iter().map(|e| e.n).sum(),
    }
}

impl AveragedPoint {
    pub fn avg(&self, f: impl Fn(&OrientationResult) -> f64) -> f64 {
        mean(self.per_orientation.iter().map(f))
    }

    pub fn avg_mc(&self, f: impl Fn(&FrameReport) -> Estimate) -> Option<Estimate> {
        let v: Option<Vec<Estimate>> = self.per_orientation.iter().map(|o| o.mc.as_ref().map(&f)).collect();
        v.map(|v| mean_estimate(&v))
    }

    pub fn c_lb(&self) -> f64 {
        self.avg(|o| o.c_lb)
    }

    pub fn p_out(&self) -> f64 {
        self.avg(|o| o.p_out)
    }

    pub fn sep(&self) -> f64 {
        self.avg(|o| o.sep)
    }
}

/// Frames for orientation `k` of `count` when `total` are shared.
fn share(total: u64, count: usize, k: usize) -> u64 {
    let (q, r) = (total / count as u64, total % count as u64);
    q + u64::from((k as u64) < r)
}

/// Optimizes every (sweep value, antenna, orientation) triple; with
/// `frames = Some(n)`, also simulates `n` frames per sweep value and antenna,
/// split across the orientations.
pub fn run_orientation_sweep(cfg: &ExperimentConfig, seed: u64, frames: Option<u64>) -> AppResult<Vec<AveragedPoint>> {
    let antennas = averaging_antennas(cfg);
    let k_count = cfg.averaging.orientations;
    let orientations = draw_orientations(seed, k_count, cfg.scenario.sectors);
    let values = &cfg.sweep.values;

    let mut jobs = Vec::with_capacity(values.len() * antennas.len() * k_count);
    for (i, &v) in values.iter().enumerate() {
        for (j, &a) in antennas.iter().enumerate() {
            for k in 0..k_count {
                jobs.push((i, v, j, a, k));
            }
        }
    }
    let options = FrameOptions { sensing: cfg.mc.sensing.into(), psi: cfg.scenario.psi };
    let ctl = SearchControl::default();

    let results: Vec<AppResult<OrientationResult>> = jobs
        .par_iter()
        .map(|&(i, v, j, a, k)| {
            let scenario = cfg.sweep.axis.apply(&cfg.scenario, v).resolve()?;
            let o = orientations[k];
            let an = scenario.analysis(scenario.pattern(a)?, o.phi_sr, o.phi_pu)?;
            let opt = optimize_policy(&an, &ctl)?;
            let pol = &opt.policy;
            let m = evaluate_metrics(&an, pol, &ModulationSpec::new(scenario.psi)?)?;
            let mc = match frames {
                Some(total) => {
                    let n = share(total, k_count, k).max(1);
                    let index = ((i * antennas.len() + j) * k_count + k) as u64;
                    let stream = RandomStream::new(seed, streams::id(streams::FRAMES, index));
                    Some(simulate_frames(&an, pol, n, &stream, options)?)
                }
                None => None,
            };
            Ok(OrientationResult {
                c_lb: m.c_lb,
                zeta: pol.zeta,
                t_sense: pol.t_sense,
                phi_power: pol.phi_power,
                p_out: m.p_out,
                sep: m.sep.unconditional,
                sep_conditional: m.sep.conditional,
                aic: pol.average_interference(),
                apc: pol.average_power(),
                i_bar: scenario.i_bar,
                p_bar: scenario.p_bar,
                mc,
            })
        })
        .collect();

    let mut results = results.into_iter();
    let mut points = Vec::with_capacity(values.len() * antennas.len());
    for &v in values {
        for &a in &antennas {
            let per_orientation = results.by_ref().take(k_count).collect::<AppResult<Vec<_>>>()?;
            points.push(AveragedPoint { axis_value: v, antenna: a, per_orientation });
        }
    }
    Ok(points)
}

fn missing() -> Estimate {
    Estimate { value: f64::NAN, se: f64::NAN, n: 0 }
}

/// Averaged optimized capacity with constraint audit columns.
pub fn capacity_table(cfg: &ExperimentConfig, points: &[AveragedPoint]) -> Table {
    let mut t = Table::new(
        "capacity",
        &[
            cfg.sweep.axis.name(),
            "antenna",
            "orientations",
            "frames",
            "c_lb",
            "c_lb_mc",
            "c_lb_se",
            "capacity_mc",
            "capacity_se",
            "zeta",
            "t_sense_ms",
            "phi_w",
            "interference",
            "interference_mc",
            "interference_se",
            "power",
            "power_mc",
            "power_se",
            "audit_ok",
        ],
    );
    for (r, p) in points.iter().enumerate() {
        let lb = p.avg_mc(|m| m.capacity_lb).unwrap_or_else(missing);
        let cap = p.avg_mc(|m| m.capacity).unwrap_or_else(missing);
        let aic = p.avg_mc(|m| m.aic_lhs).unwrap_or_else(missing);
        let apc = p.avg_mc(|m| m.apc_lhs).unwrap_or_else(missing);
        let (c_lb, i_an, p_an) = (p.c_lb(), p.avg(|o| o.aic), p.avg(|o| o.apc));
        let mut audit = Audit::default();
        let ok = lb.n == 0
            || [("c_lb", c_lb, &lb), ("interference", i_an, &aic), ("power", p_an, &apc)]
                .into_iter()
                .map(|(q, a, e)| audit.check(r, q, a, e, 0.0))
                .fold(true, |acc, x| acc && x);
        t.audit.absorb(audit);
        t.push(vec![
            Cell::from(p.axis_value),
            Cell::from(p.antenna.label()),
            Cell::from(p.per_orientation.len()),
            Cell::from(lb.n),
            Cell::from(c_lb),
            Cell::from(lb.value),
            Cell::from(lb.se),
            Cell::from(cap.value),
            Cell::from(cap.se),
            Cell::from(p.avg(|o| o.zeta)),
            Cell::from(p.avg(|o| o.t_sense) * 1e3),
            Cell::from(p.avg(|o| o.phi_power)),
            Cell::from(i_an),
            Cell::from(aic.value),
            Cell::from(aic.se),
            Cell::from(p_an),
            Cell::from(apc.value),
            Cell::from(apc.se),
            Cell::from(ok),
        ]);
    }
    t
}

/// Averaged outage and SEP at the optimized policies.
pub fn reliability_table(cfg: &ExperimentConfig, points: &[AveragedPoint]) -> Table {
    let mut t = Table::new(
        "reliability",
        &[
            cfg.sweep.axis.name(),
            "antenna",
            "orientations",
            "frames",
            "p_out",
            "p_out_mc",
            "p_out_se",
            "sep",
            "sep_mc",
            "sep_se",
            "sep_conditional",
            "sep_conditional_mc",
            "sep_conditional_se",
            "audit_ok",
        ],
    );
    for (r, p) in points.iter().enumerate() {
        let out = p.avg_mc(|m| m.p_out).unwrap_or_else(missing);
        let sep = p.avg_mc(|m| m.sep).unwrap_or_else(missing);
        let sepc = p.avg_mc(|m| m.sep_conditional).unwrap_or_else(missing);
        let (p_out, s, sc) = (p.p_out(), p.sep(), p.avg(|o| o.sep_conditional));
        let mut audit = Audit::default();
        let ok = out.n == 0
            || [("p_out", p_out, &out), ("sep", s, &sep), ("sep_conditional", sc, &sepc)]
                .into_iter()
                .map(|(q, a, e)| audit.check(r, q, a, e, 0.0))
                .fold(true, |acc, x| acc && x);
        t.audit.absorb(audit);
        t.push(vec![
            Cell::from(p.axis_value),
            Cell::from(p.antenna.label()),
            Cell::from(p.per_orientation.len()),
            Cell::from(out.n),
            Cell::from(p_out),
            Cell::from(out.value),
            Cell::from(out.se),
            Cell::from(s),
            Cell::from(sep.value),
            Cell::from(sep.se),
            Cell::from(sc),
            Cell::from(sepc.value),
            Cell::from(sepc.se),
            Cell::from(ok),
        ]);
    }
    t
}
