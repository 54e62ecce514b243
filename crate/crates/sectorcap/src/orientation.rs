//! Random link geometries for orientation averaging.

use crate::streams;
use sectorcap_core::montecarlo::{uniform, RandomStream};
use std::f64::consts::TAU;

/// PU bearing anywhere on the circle; SU-Rx between the axes of sectors 0
/// and 1, which by rotational symmetry covers every sector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub phi_pu: f64,
    pub phi_sr: f64,
}

/// `count` draws, fixed by `seed`.
pub fn draw_orientations(seed: u64, count: usize, sectors: usize) -> Vec<Orientation> {
    let mut rng = RandomStream::new(seed, streams::id(streams::ORIENTATIONS, 0)).rng_at(0);
    let width = TAU / sectors as f64;
    (0..count)
        .map(|_| {
            let phi_pu = TAU * uniform(&mut rng);
            let phi_sr = width * uniform(&mut rng);
            Orientation { phi_pu, phi_sr }
        })
        .collect()
}
