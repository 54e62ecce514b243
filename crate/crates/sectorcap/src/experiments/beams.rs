use crate::config::{Antenna, ExperimentConfig};
use crate::error::AppResult;
use crate::parallel::simulate_beam_pairs;
use crate::streams;
use crate::table::{Cell, Table};
use rayon::prelude::*;
use sectorcap_core::beams::BeamChannelModel;
use sectorcap_core::montecarlo::{Estimate, RandomStream};
use sectorcap_core::special::SeriesControl;

/// `Δ1` over SU-Rx bearing and beamwidth, with the uncorrelated reference.
pub fn run_beam_selection_sweep(cfg: &ExperimentConfig, seed: u64, draws: u64) -> AppResult<Table> {
    let base = cfg.scenario.resolve()?;
    let jobs: Vec<(f64, f64)> = cfg
        .beams
        .phi_sr_deg
        .iter()
        .flat_map(|&sr| cfg.beams.phi_3db_deg.iter().map(move |&w| (sr, w)))
        .collect();
    let ctl = SeriesControl::default();

    let rows: Vec<AppResult<(Vec<Cell>, f64, Estimate)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(sr, w))| {
            let pattern = base.pattern(Antenna::Sectored { phi_3db_deg: w })?;
            let model = BeamChannelModel::from_pattern(&pattern, sr.to_radians(), base.gamma_ss, base.rho)?;
            let delta1 = model.beam1_selection_prob(&ctl)?;
            let rho0 = BeamChannelModel::new(model.delta1, model.delta2, 0.0)?.beam1_selection_prob(&ctl)?;
            let stream = RandomStream::new(seed, streams::id(streams::BEAMS, i as u64));
            let est = simulate_beam_pairs(&model, draws, &[], &stream).beam1_frequency();
            let row = vec![
                Cell::from(sr),
                Cell::from(w),
                Cell::from(model.delta1),
                Cell::from(model.delta2),
                Cell::from(delta1),
                Cell::from(est.value),
                Cell::from(est.se),
                Cell::from(rho0),
                Cell::from(model.delta1 / (model.delta1 + model.delta2)),
            ];
            Ok((row, delta1, est))
        })
        .collect();

    let mut table = Table::new(
        "beams",
        &[
            "phi_sr_deg",
            "phi_3db_deg",
            "mean_gain_1",
            "mean_gain_2",
            "delta1",
            "delta1_mc",
            "delta1_se",
            "delta1_rho0",
            "gain_ratio",
            "audit_ok",
        ],
    );
    for (i, r) in rows.into_iter().enumerate() {
        let (mut row, analytic, est) = r?;
        row.push(Cell::from(table.audit.check(i, "delta1", analytic, &est, 0.0)));
        table.push(row);
    }
    Ok(table)
}
