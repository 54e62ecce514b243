//! Experiment families. Each returns a [`Table`](crate::table::Table) whose
//! rows carry analytic values next to Monte Carlo estimates and their
//! standard errors.

mod averaged;
mod beams;
mod roc;

pub use averaged::{capacity_table, reliability_table, run_orientation_sweep, AveragedPoint, OrientationResult};
pub use beams::run_beam_selection_sweep;
pub use roc::{run_roc, ROC_CLT_SLACK};

use crate::config::{Antenna, ExperimentConfig};

/// Antennas compared in the averaged sweeps, sectored first.
pub fn averaging_antennas(cfg: &ExperimentConfig) -> Vec<Antenna> {
    let mut v: Vec<Antenna> =
        cfg.averaging.phi_3db_deg.iter().map(|&w| Antenna::Sectored { phi_3db_deg: w }).collect();
    if cfg.averaging.omni {
        v.push(Antenna::Omni);
    }
    v
}
