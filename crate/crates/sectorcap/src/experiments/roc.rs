use crate::config::ExperimentConfig;
use crate::error::AppResult;
use crate::parallel::simulate_sensing;
use crate::streams;
use crate::table::{Cell, Table};
use rayon::prelude::*;
use sectorcap_core::montecarlo::{RandomStream, SensingSampler};
use sectorcap_core::sensing::{DetectorStats, SensingConfig};

/// Absolute slack on top of 3 SE for the sensing rates: the analytic rates
/// use a Gaussian model of the statistic, which is biased at small `N`.
pub const ROC_CLT_SLACK: f64 = 0.02;

/// `(P_fa, P_d)` pairs per beamwidth, one row per detection target.
pub fn run_roc(cfg: &ExperimentConfig, seed: u64, trials: u64) -> AppResult<Table> {
    let base = cfg.scenario.resolve()?;
    let jobs: Vec<(f64, f64)> = cfg
        .roc
        .phi_3db_deg
        .iter()
        .flat_map(|&w| cfg.roc.pd_targets.iter().map(move |&pd| (w, pd)))
        .collect();

    let rows: Vec<AppResult<(Vec<Cell>, [(f64, sectorcap_core::montecarlo::Estimate); 2])>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(w, pd))| {
            let sensing = SensingConfig { pd_target: pd, ..base.sensing };
            let pattern = base.pattern(crate::config::Antenna::Sectored { phi_3db_deg: w })?;
            let ints = pattern.compute_integrals()?;
            let stats = DetectorStats::evaluate(&sensing, &ints)?;
            let eta = stats.threshold(pd)?;
            let sampler = SensingSampler::new(&sensing, &pattern)?;
            let stream = RandomStream::new(seed, streams::id(streams::ROC, i as u64));
            let c = simulate_sensing(&sampler, eta, trials, &stream);
            let (fa, d) = (c.false_alarm.mean_estimate(), c.detection.mean_estimate());
            let row = vec![
                Cell::from(w),
                Cell::from(stats.n_samples),
                Cell::from(pd),
                Cell::from(eta),
                Cell::from(stats.p_fa),
                Cell::from(fa.value),
                Cell::from(fa.se),
                Cell::from(pd),
                Cell::from(d.value),
                Cell::from(d.se),
            ];
            Ok((row, [(stats.p_fa, fa), (pd, d)]))
        })
        .collect();

    let mut table = Table::new(
        "roc",
        &[
            "phi_3db_deg",
            "n_samples",
            "pd_target",
            "threshold",
            "p_fa",
            "p_fa_mc",
            "p_fa_se",
            "p_d",
            "p_d_mc",
            "p_d_se",
            "audit_ok",
        ],
    );
    for (i, r) in rows.into_iter().enumerate() {
        let (mut row, checks) = r?;
        let ok_fa = table.audit.check(i, "p_fa", checks[0].0, &checks[0].1, ROC_CLT_SLACK);
        let ok_d = table.audit.check(i, "p_d", checks[1].0, &checks[1].1, ROC_CLT_SLACK);
        row.push(Cell::from(ok_fa && ok_d));
        table.push(row);
    }
    Ok(table)
}
