mod common;

use common::*;
use proptest::prelude::*;
use sectorcap_core::capacity::{InterferenceModel, ScenarioAnalysis, ScenarioParams};
use sectorcap_core::montecarlo::*;
use sectorcap_core::sensing::{DetectorStats, SensingConfig};
use rand_chacha::rand_core::RngCore;

#[test]
fn streams_are_reproducible_and_distinct() {
    let a = RandomStream::new(2718281828, 3);
    let mut r1 = a.rng_at(5);
    let mut r2 = a.rng_at(5);
    let x: Vec<u64> = (0..16).map(|_| r1.next_u64()).collect();
    let y: Vec<u64> = (0..16).map(|_| r2.next_u64()).collect();
    assert_eq!(x, y);
    let mut other_block = a.rng_at(6);
    let mut other_stream = RandomStream::new(2718281828, 4).rng_at(5);
    let mut other_seed = RandomStream::new(2718281829, 3).rng_at(5);
    assert_ne!(x[0], other_block.next_u64());
    assert_ne!(x[0], other_stream.next_u64());
    assert_ne!(x[0], other_seed.next_u64());
}

#[test]
fn block_partition() {
    assert_eq!(block_count(0), 0);
    assert_eq!(block_count(1), 1);
    assert_eq!(block_count(BLOCK_LEN), 1);
    assert_eq!(block_count(BLOCK_LEN + 1), 2);
    let n = 3 * BLOCK_LEN + 17;
    let total: u64 = (0..block_count(n)).map(|b| block_len(b, n)).sum();
    assert_eq!(total, n);
    assert_eq!(block_len(3, n), 17);
}

#[test]
fn moments_merge_matches_two_pass() {
    let mut rng = RandomStream::new(1, 0).rng_at(0);
    let xs: Vec<f64> = (0..10_001).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).map(|u| -u.ln()).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mu4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;

    let mut streaming = Moments::default();
    xs.iter().for_each(|&x| streaming.push(x));
    let blocks: Vec<Moments> = xs
        .chunks(777)
        .map(|c| {
            let mut m = Moments::default();
            c.iter().for_each(|&x| m.push(x));
            m
        })
        .collect();
    let tree = merge_tree(blocks);
    for m in [streaming, tree] {
        assert_eq!(m.count(), xs.len() as u64);
        assert!(rel_err(m.mean(), mean) < 1e-13);
        assert!(rel_err(m.variance(), var) < 1e-12);
        let e = m.variance_estimate();
        let se = ((mu4 - var * var * (n - 3.0) / (n - 1.0)) / n).sqrt();
        assert!(rel_err(e.se, se) < 1e-9);
    }
}

#[test]
fn estimate_scores() {
    let e = Estimate { value: 1.0, se: 0.1, n: 100 };
    assert!((e.z_score(1.25) - 2.5).abs() < 1e-12);
    assert!(e.within(1.29, 3.0) && !e.within(1.31, 3.0));
    let exact = Estimate { value: 0.5, se: 0.0, n: 10 };
    assert!(exact.within(0.5, 3.0) && !exact.within(0.6, 3.0));
}

#[test]
fn frame_simulation_is_deterministic_and_block_ordered() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let pol = an.policy(0.6, 1.28e-3).unwrap();
    let stream = RandomStream::new(2718281828, 0);
    let n = 5 * BLOCK_LEN + 100;
    let a = simulate_frames(&an, &pol, n, &stream, FrameOptions::default()).unwrap();
    let b = simulate_frames(&an, &pol, n, &stream, FrameOptions::default()).unwrap();
    assert_eq!(a, b);
    // Blocks can be produced in any order; only the merge order matters.
    let sim = FrameSimulator::new(&an, &pol, FrameOptions::default()).unwrap();
    let mut parts: Vec<(u64, FrameAccumulator)> =
        (0..block_count(n)).rev().map(|k| (k, sim.simulate_block(&stream, k, block_len(k, n)))).collect();
    parts.sort_by_key(|p| p.0);
    let c = merge_tree(parts.into_iter().map(|p| p.1).collect()).report();
    assert_eq!(a, c);
    let d = simulate_frames(&an, &pol, n, &RandomStream::new(2718281828, 1), FrameOptions::default()).unwrap();
    assert_ne!(a.capacity.value, d.capacity.value);
    assert!(simulate_frames(&an, &pol, 0, &stream, FrameOptions::default()).is_err());
}

#[test]
fn threshold_examples() {
    let cfg = reference_sensing();
    let ints = unit_pattern(20.0).compute_integrals().unwrap();
    let stats = DetectorStats::evaluate(&cfg, &ints).unwrap();
    let half = detector_threshold_from_pd(&SensingConfig { pd_target: 0.5, ..cfg }, &ints).unwrap();
    assert!(rel_err(half, stats.mu1) < 1e-15);
    let mut prev = f64::INFINITY;
    for k in 1..20 {
        let eta = detector_threshold_from_pd(&SensingConfig { pd_target: 0.05 * k as f64, ..cfg }, &ints).unwrap();
        assert!(eta < prev);
        prev = eta;
    }
}

#[test]
fn frame_rates_match_detector() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let pol = an.policy(0.6, 1.28e-3).unwrap();
    let r = simulate_frames(&an, &pol, 200_000, &RandomStream::new(31, 0), FrameOptions::default()).unwrap();
    assert!(r.p_fa.within(pol.detector.p_fa, 3.0), "{:?} vs {}", r.p_fa, pol.detector.p_fa);
    assert!(r.p_d.within(0.85, 3.0), "{:?}", r.p_d);
    assert!(r.pi_hat0.within(pol.detector.pi_hat0, 3.0));
    assert!(r.delta1.within(an.delta1_prob, 3.0));
    assert!(r.t_mean_h1.within(pol.detector.mu1, 3.0));
    assert!(r.t_var_h0.within(pol.detector.var_h0, 3.0));
}

#[test]
fn without_primary_user_false_alarm_equals_detection_target() {
    let base = reference_scenario(InterferenceModel::Conditional).params;
    let an = ScenarioAnalysis::new(ScenarioParams {
        sensing: SensingConfig { p_pu: 0.0, pi1: 0.0, ..base.sensing },
        ..base
    })
    .unwrap();
    let pol = an.policy(0.6, 1.28e-3).unwrap();
    assert!((pol.detector.p_fa - 0.85).abs() < 1e-12);
    for sensing in [SensingModel::Clt, SensingModel::Samples] {
        let opts = FrameOptions { sensing, ..FrameOptions::default() };
        let r = simulate_frames(&an, &pol, 40_000, &RandomStream::new(37, 0), opts).unwrap();
        assert!(r.p_fa.within(0.85, 3.0), "{sensing:?}: {:?}", r.p_fa);
        assert_eq!(r.p_d.n, 0);
    }
}

#[test]
fn sample_level_sensing_tracks_the_gaussian_model() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let pol = an.policy(0.6, 1.28e-3).unwrap();
    let opts = FrameOptions { sensing: SensingModel::Samples, ..FrameOptions::default() };
    let r = simulate_frames(&an, &pol, 40_000, &RandomStream::new(41, 0), opts).unwrap();
    // Moments are exact; the rates carry the Gaussian-approximation bias.
    assert!(r.t_mean_h0.within(1.0, 3.0));
    assert!(r.t_var_h1.within(pol.detector.var_h1, 3.0), "{:?} vs {}", r.t_var_h1, pol.detector.var_h1);
    assert!((r.p_d.value - 0.85).abs() < 0.02);
    assert!((r.p_fa.value - pol.detector.p_fa).abs() < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merge_is_associative_in_moments(xs in prop::collection::vec(-10.0f64..10.0, 4..200), split in 1usize..100) {
        let split = split.min(xs.len() - 1);
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..split].iter().for_each(|&x| a.push(x));
        xs[split..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        prop_assert_eq!(a.count(), whole.count());
        prop_assert!((a.mean() - whole.mean()).abs() < 1e-12);
        prop_assert!((a.variance() - whole.variance()).abs() < 1e-10 * whole.variance().max(1.0));
    }
}
