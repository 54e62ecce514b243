mod common;

use common::{periodic_mean, reference_sensing, rel_err, unit_pattern};
use proptest::prelude::*;
use sectorcap_core::antenna::RadiationPattern;
use sectorcap_core::montecarlo::{detector_threshold_from_pd, simulate_sensing, RandomStream, SensingSampler};
use sectorcap_core::sensing::*;
use sectorcap_core::special::gaussian_q;

/// `Var(T)` by the law of total variance over the PU bearing: each sample
/// `y = ψ s + w` with `ψ ~ CN(0, γ p_m(φ))`, `s ~ CN(0, P_p)` has
/// `Var|y|² = 3g²P² + 2gPσ² + σ⁴` given `φ`.
fn var_h1_total_variance(cfg: &SensingConfig, pattern: &RadiationPattern, n: usize) -> (f64, f64) {
    let m = pattern.sectors();
    let (s2, p) = (cfg.sigma_w2, cfg.p_pu);
    let cond = |phi: f64| {
        let mut mean = 0.0;
        let mut var = 0.0;
        for k in 0..m {
            let g = cfg.gamma_pu * pattern.gain(k, phi).unwrap();
            mean += g * p + s2;
            var += n as f64 * (3.0 * g * g * p * p + 2.0 * g * p * s2 + s2 * s2);
        }
        (mean / m as f64, var / ((m * n) as f64).powi(2))
    };
    let e_mean = periodic_mean(|t| cond(t).0, 8192);
    let e_mean2 = periodic_mean(|t| cond(t).0.powi(2), 8192);
    let e_var = periodic_mean(|t| cond(t).1, 8192);
    (e_mean, e_var + e_mean2 - e_mean * e_mean)
}

#[test]
fn sample_count_uses_floor() {
    let cfg = reference_sensing();
    assert_eq!(cfg.samples_per_sector(8).unwrap(), 16);
    assert_eq!(cfg.with_t_sense(1.35e-3).samples_per_sector(8).unwrap(), 16);
    assert_eq!(cfg.with_t_sense(0.64e-3).samples_per_sector(8).unwrap(), 8);
    assert!(cfg.with_t_sense(5e-5).samples_per_sector(8).is_err());
    assert!(cfg.with_t_sense(5e-5).validate(8).is_err());
    assert!(cfg.validate(8).is_ok());
    assert!(cfg.with_t_sense(9.6e-3).validate(8).is_err());
    assert!(SensingConfig { pi1: 1.0, ..cfg }.validate(8).is_err());
    assert!(SensingConfig { pd_target: 1.0, ..cfg }.validate(8).is_err());
}

#[test]
fn variance_h0_examples() {
    let cfg = reference_sensing();
    assert!((variance_h0(&cfg, 8).unwrap() - 1.0 / 128.0).abs() < 1e-17);
    // σ_w = 2, M = 4, N = 10: 16/40.
    let cfg2 = SensingConfig { sigma_w2: 4.0, t_sense: 4e-4, ..cfg };
    assert!((variance_h0(&cfg2, 4).unwrap() - 0.4).abs() < 1e-15);
    let long = SensingConfig { t_frame: 10.0, t_sense: 8.0, ..cfg };
    assert!(variance_h0(&long, 8).unwrap() < 1e-5);
}

#[test]
fn variance_h1_without_pu_is_variance_h0() {
    let cfg = SensingConfig { p_pu: 0.0, ..reference_sensing() };
    let ints = unit_pattern(25.0).compute_integrals().unwrap();
    assert!(rel_err(variance_h1(&cfg, &ints).unwrap(), variance_h0(&cfg, 8).unwrap()) < 1e-14);
    assert_eq!(mean_h1(&cfg, &ints), cfg.sigma_w2);
}

#[test]
fn variance_h1_omni_single_sector() {
    let cfg = SensingConfig { t_sense: 1e-4, ..reference_sensing() };
    let ints = RadiationPattern::omni(1).unwrap().compute_integrals().unwrap();
    let (s2, gp, n) = (1.0, 0.2, 10.0);
    let want = (s2 * s2 + 2.0 * gp * s2 + gp * gp * (3.0 - n)) / n + gp * gp;
    assert!(rel_err(variance_h1(&cfg, &ints).unwrap(), want) < 1e-14);
}

#[test]
fn variance_h1_matches_total_variance_decomposition() {
    for (w, t_sense) in [(25.0, 1.28e-3), (10.0, 0.64e-3), (60.0, 5.12e-3)] {
        let cfg = reference_sensing().with_t_sense(t_sense);
        let pattern = unit_pattern(w);
        let ints = pattern.compute_integrals().unwrap();
        let n = cfg.samples_per_sector(8).unwrap();
        let (mean, var) = var_h1_total_variance(&cfg, &pattern, n);
        assert!(rel_err(mean_h1(&cfg, &ints), mean) < 1e-10);
        assert!(rel_err(variance_h1(&cfg, &ints).unwrap(), var) < 1e-9, "φ3dB = {w}°");
    }
}

#[test]
fn statistic_moments_match_monte_carlo() {
    let cfg = reference_sensing();
    let pattern = unit_pattern(25.0);
    let ints = pattern.compute_integrals().unwrap();
    let stats = DetectorStats::evaluate(&cfg, &ints).unwrap();
    let sampler = SensingSampler::new(&cfg, &pattern).unwrap();
    let eta = detector_threshold_from_pd(&cfg, &ints).unwrap();
    let c = simulate_sensing(&sampler, eta, 20_000, &RandomStream::new(11, 0));
    for (est, want) in [
        (c.t_h0.mean_estimate(), cfg.sigma_w2),
        (c.t_h0.variance_estimate(), stats.var_h0),
        (c.t_h1.mean_estimate(), stats.mu1),
        (c.t_h1.variance_estimate(), stats.var_h1),
    ] {
        assert!(est.within(want, 3.0), "{est:?} vs {want}");
    }
}

#[test]
fn false_alarm_examples() {
    let cfg = SensingConfig { p_pu: 0.0, ..reference_sensing() };
    let ints = unit_pattern(25.0).compute_integrals().unwrap();
    let s = DetectorStats::evaluate(&cfg, &ints).unwrap();
    assert!((s.p_fa - 0.85).abs() < 1e-12);

    let mut prev = 1.0;
    for t in [0.64e-3, 1.28e-3, 2.56e-3, 5.12e-3] {
        let cfg = reference_sensing().with_t_sense(t);
        let s = DetectorStats::evaluate(&cfg, &ints).unwrap();
        assert!(s.p_fa < prev && s.p_fa > 0.0, "N = {}", s.n_samples);
        assert!(s.var_h1 >= s.var_h0);
        prev = s.p_fa;
    }
}

#[test]
fn false_alarm_increases_with_detection_target() {
    let ints = unit_pattern(25.0).compute_integrals().unwrap();
    let mut prev = 0.0;
    for k in 1..100 {
        let cfg = SensingConfig { pd_target: k as f64 / 100.0, ..reference_sensing() };
        let p = DetectorStats::evaluate(&cfg, &ints).unwrap().p_fa;
        assert!(p > prev);
        prev = p;
    }
}

#[test]
fn detection_and_false_alarm_are_inverse() {
    let cfg = reference_sensing();
    let ints = unit_pattern(25.0).compute_integrals().unwrap();
    let s = DetectorStats::evaluate(&cfg, &ints).unwrap();
    let pd = detection_at_pfa(&cfg, s.p_fa, s.mu1, s.var_h0, s.var_h1).unwrap();
    assert!((pd - cfg.pd_target).abs() < 1e-12);
    // The threshold reproduces both rates.
    let eta = s.threshold(cfg.pd_target).unwrap();
    assert!((gaussian_q((eta - s.mu1) / s.var_h1.sqrt()) - 0.85).abs() < 1e-12);
    assert!((gaussian_q((eta - cfg.sigma_w2) / s.var_h0.sqrt()) - s.p_fa).abs() < 1e-12);
}

#[test]
fn outcome_examples() {
    let cfg = reference_sensing();
    let (h0, h1) = outcome_probabilities(&cfg, 0.1);
    assert!((h0 - 0.6).abs() < 1e-15);
    assert!((h0 + h1 - 1.0).abs() < 1e-15);
    let (h0, _) = outcome_probabilities(&SensingConfig { pd_target: 1.0, ..cfg }, 1.0);
    assert_eq!(h0, 0.0);
}

#[test]
fn empirical_detection_rate_matches_target() {
    let cfg = reference_sensing();
    let pattern = unit_pattern(20.0);
    let ints = pattern.compute_integrals().unwrap();
    let s = DetectorStats::evaluate(&cfg, &ints).unwrap();
    let sampler = SensingSampler::new(&cfg, &pattern).unwrap();
    let eta = s.threshold(cfg.pd_target).unwrap();
    let c = simulate_sensing(&sampler, eta, 20_000, &RandomStream::new(5, 1));
    // Only the Gaussian approximation separates these; allow its bias on
    // top of sampling noise.
    assert!((c.detection.mean() - 0.85).abs() < 0.02, "{}", c.detection.mean());
    assert!((c.false_alarm.mean() - s.p_fa).abs() < 0.02, "{} vs {}", c.false_alarm.mean(), s.p_fa);
}

proptest! {
    #[test]
    fn outcomes_are_complementary(pi1 in 0.0f64..0.99, pd in 0.01f64..0.99, pfa in 0.0f64..1.0) {
        let cfg = SensingConfig { pi1, pd_target: pd, ..reference_sensing() };
        let (a, b) = outcome_probabilities(&cfg, pfa);
        prop_assert!((a + b - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn detector_invariants(w in 8.0f64..90.0, p_pu in 0.01f64..2.0, t_ms in 0.08f64..9.0, pd in 0.05f64..0.99) {
        let cfg = SensingConfig { p_pu, pd_target: pd, ..reference_sensing() }.with_t_sense(t_ms * 1e-3);
        let ints = unit_pattern(w).compute_integrals().unwrap();
        let s = DetectorStats::evaluate(&cfg, &ints).unwrap();
        prop_assert!(s.var_h0 > 0.0);
        prop_assert!(s.var_h1 >= s.var_h0);
        // Far in either tail Q rounds to 0 or 1 in double precision.
        prop_assert!((0.0..=1.0).contains(&s.p_fa));
        if (0.5..=0.95).contains(&pd) && p_pu <= 0.5 {
            prop_assert!(s.p_fa > 0.0 && s.p_fa < 1.0);
        }
        prop_assert!((s.pi_hat0 + s.pi_hat1 - 1.0).abs() < 1e-12);
    }
}
