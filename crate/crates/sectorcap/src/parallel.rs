//! Block-parallel Monte Carlo.
//!
//! Blocks are generated concurrently but collected in block order and
//! combined with the same merge tree as the sequential runners, so results
//! do not depend on the thread count.

use rayon::prelude::*;
use sectorcap_core::beams::BeamChannelModel;
use sectorcap_core::capacity::{ScenarioAnalysis, TransmissionPolicy};
use sectorcap_core::montecarlo::{
    block_count, block_len, merge_tree, simulate_beam_pairs_block, simulate_sensing_block, BeamPairCounts,
    FrameOptions, FrameReport, FrameSimulator, Merge, RandomStream, SensingCounts, SensingSampler,
};

pub fn run_blocks<T, F>(n: u64, f: F) -> T
where
    T: Merge + Default + Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let parts: Vec<T> = (0..block_count(n)).into_par_iter().map(|b| f(b, block_len(b, n))).collect();
    merge_tree(parts)
}

pub fn simulate_beam_pairs(model: &BeamChannelModel, n: u64, thresholds: &[f64], stream: &RandomStream) -> BeamPairCounts {
    run_blocks(n, |b, len| simulate_beam_pairs_block(model, thresholds, stream, b, len))
}

pub fn simulate_sensing(sampler: &SensingSampler, eta: f64, n: u64, stream: &RandomStream) -> SensingCounts {
    run_blocks(n, |b, len| simulate_sensing_block(sampler, eta, stream, b, len))
}

pub fn simulate_frames(
    analysis: &ScenarioAnalysis,
    pol: &TransmissionPolicy,
    n: u64,
    stream: &RandomStream,
    options: FrameOptions,
) -> sectorcap_core::Result<FrameReport> {
    let sim = FrameSimulator::new(analysis, pol, options)?;
    Ok(run_blocks(n, |b, len| sim.simulate_block(stream, b, len)).report())
}
