mod common;

use common::*;
use proptest::prelude::*;
use sectorcap_core::beams::BeamChannelModel;
use sectorcap_core::capacity::{InterferenceModel, ScenarioAnalysis, ScenarioParams};
use sectorcap_core::metrics::*;
use sectorcap_core::montecarlo::{simulate_beam_pairs, simulate_frames, FrameOptions, RandomStream};
use sectorcap_core::special::{gaussian_q, upper_incomplete_gamma};
use std::f64::consts::PI;

fn j_quadrature(k: usize, s: f64, psi: f64, omega: f64, zeta: f64) -> f64 {
    let rate = 0.5 * s * psi + omega;
    // x = u² removes the x^{-1/2} endpoint singularity.
    let inner = gl_to_infinity(
        |u| 2.0 * u.powi(2 * k as i32) * (-rate * u * u).exp(),
        zeta.sqrt(),
        1.0 / rate.sqrt(),
        128,
    );
    s.sqrt() * psi.powf(k as f64 + 0.5) * inner
}

#[test]
fn outage_examples() {
    let m = BeamChannelModel::new(1.2, 0.8, 0.5).unwrap();
    assert_eq!(outage_probability(&m, 0.0).unwrap(), 0.0);
    assert!((outage_probability(&m, 500.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(outage_probability(&m, -0.1).is_err());
    for k in 0..100 {
        let z = 0.1 * k as f64;
        assert_eq!(outage_probability(&m, z).unwrap().to_bits(), m.selected_gain_cdf(z).unwrap().to_bits());
    }
    let c = simulate_beam_pairs(&m, 2_000_000, &[0.7], &RandomStream::new(23, 0));
    let want = outage_probability(&m, 0.7).unwrap();
    assert!(c.below_frequency(0).within(want, 3.0), "{:?} vs {want}", c.below_frequency(0));
}

#[test]
fn j_examples() {
    for (s, psi, zeta) in [(1.0, 4.0, 0.3), (2.5, 2.0, 0.0), (0.1, 4.0, 5.0)] {
        let want = 2f64.sqrt() * upper_incomplete_gamma(0.5, 0.5 * s * psi * zeta).unwrap();
        assert!(rel_err(j_func(0, s, psi, 0.0, zeta).unwrap(), want) < 1e-13);
    }
    assert!(rel_err(j_func(0, 3.0, 4.0, 0.0, 0.0).unwrap(), (2.0 * PI).sqrt()) < 1e-14);
    // mpmath, 30 digits.
    assert!(rel_err(j_func(2, 1.5, 4.0, 2.0, 0.3).unwrap(), 0.652_373_105_934_673_95) < 1e-12);
    for (k, s, psi, omega, zeta) in [(2, 1.5, 4.0, 2.0, 0.3), (0, 0.7, 4.0, 1.0, 0.0), (7, 10.0, 2.0, 3.0, 1.0), (15, 0.2, 4.0, 0.5, 2.0)] {
        let got = j_func(k, s, psi, omega, zeta).unwrap();
        let want = j_quadrature(k, s, psi, omega, zeta);
        assert!(rel_err(got, want) < 1e-8, "k = {k}: {got} vs {want}");
    }
    assert!(j_func(0, 0.0, 4.0, 0.0, 0.0).is_err());
    assert!(ModulationSpec::new(0.0).is_err());
}

#[test]
fn sep_branch_matches_quadrature() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let m = *an.model();
    for s in [0.05, 0.5, 3.0, 40.0] {
        for zeta in [0.0, 0.4, 2.0, 9.0] {
            let got = truncated_sep_branch(&an, s, 4.0, zeta).unwrap();
            let want = gl_to_infinity(|x| gaussian_q((4.0 * s * x).sqrt()) * m.selected_gain_pdf(x).unwrap(), zeta, 3.0, 128);
            assert!((got - want).abs() < 1e-9 + 1e-7 * want, "S = {s}, ζ = {zeta}: {got} vs {want}");
        }
    }
    // Zero SNR: Q(0) on every transmitted frame.
    let half = 0.5 * m.selected_gain_survival(1.0).unwrap();
    assert_eq!(truncated_sep_branch(&an, 0.0, 4.0, 1.0).unwrap(), half);
}

#[test]
fn sep_matches_simulation() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let pol = an.policy(0.6, 1.28e-3).unwrap();
    let sep = symbol_error_probability(&an, &pol, &ModulationSpec::new(4.0).unwrap()).unwrap();
    let opts = FrameOptions { psi: 4.0, ..FrameOptions::default() };
    let r = simulate_frames(&an, &pol, 400_000, &RandomStream::new(29, 0), opts).unwrap();
    assert!(r.sep.within(sep.unconditional, 3.0), "{:?} vs {}", r.sep, sep.unconditional);
    assert!(r.sep_conditional.within(sep.conditional, 3.0), "{:?} vs {}", r.sep_conditional, sep.conditional);
    assert!(r.p_out.within(outage_probability(an.model(), 0.6).unwrap(), 3.0));
    assert!(sep.conditional >= sep.unconditional);
}

#[test]
fn sep_conventions() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let modulation = ModulationSpec::new(4.0).unwrap();
    let off = an.policy_with_power(0.5, 1.28e-3, 0.0).unwrap();
    let r = symbol_error_probability(&an, &off, &modulation).unwrap();
    assert_eq!((r.unconditional, r.conditional), (0.0, 0.0));

    // σ_p² = 0 merges the two SNR branches.
    let base = reference_scenario(InterferenceModel::Conditional).params;
    let an0 = ScenarioAnalysis::new(ScenarioParams {
        sensing: sectorcap_core::sensing::SensingConfig { p_pu: 0.0, ..base.sensing },
        ..base
    })
    .unwrap();
    let pol = an0.policy(0.5, 1.28e-3).unwrap();
    assert_eq!(pol.snr0, pol.snr1);
    let r = symbol_error_probability(&an0, &pol, &modulation).unwrap();
    let one = truncated_sep_branch(&an0, pol.snr0, 4.0, 0.5).unwrap();
    assert!(rel_err(r.unconditional, (pol.alpha0 + pol.beta0) * one) < 1e-14);
}

#[test]
fn sep_falls_with_power() {
    let an = reference_scenario(InterferenceModel::Conditional);
    let modulation = ModulationSpec::new(4.0).unwrap();
    for zeta in [0.0, 0.7, 3.0] {
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let pol = an.policy_with_power(zeta, 1.28e-3, 0.1 * k as f64).unwrap();
            let r = evaluate_metrics(&an, &pol, &modulation).unwrap();
            assert!(r.sep.unconditional <= prev);
            assert!((0.0..=1.0).contains(&r.sep.conditional));
            assert_eq!(r.p_out, an.model().selected_gain_cdf(zeta).unwrap());
            prev = r.sep.unconditional;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sep_branch_is_bounded(s in 0.01f64..100.0, zeta in 0.0f64..20.0) {
        let an = reference_scenario(InterferenceModel::Conditional);
        let b = truncated_sep_branch(&an, s, 4.0, zeta).unwrap();
        let surv = an.model().selected_gain_survival(zeta).unwrap();
        prop_assert!(b >= 0.0 && b <= 0.5 * surv + 1e-12);
    }
}

#[test]
fn omni_sep_matches_quadrature() {
    use sectorcap_core::antenna::RadiationPattern;
    let base = reference_scenario(InterferenceModel::Conditional).params;
    let an = ScenarioAnalysis::new(ScenarioParams {
        pattern: RadiationPattern::omni(8).unwrap(),
        beams: BeamChannelModel::new(1.3, 1.3, 0.5).unwrap(),
        ..base
    })
    .unwrap();
    for s in [0.2, 2.0, 30.0] {
        for zeta in [0.0, 0.5, 3.0] {
            let got = truncated_sep_branch(&an, s, 4.0, zeta).unwrap();
            // x = u² keeps the integrand smooth at the origin.
            let want = gl_to_infinity(
                |u| 2.0 * u * gaussian_q((4.0 * s).sqrt() * u) * (-u * u / 1.3).exp() / 1.3,
                zeta.sqrt(),
                1.0,
                128,
            );
            assert!((got - want).abs() < 1e-10 + 1e-8 * want, "S = {s}, ζ = {zeta}: {got} vs {want}");
        }
    }
    // Untruncated: E[Q(√(cX))] = (1 - √(cδ/(2 + cδ)))/2 for X ~ Exp(δ).
    let cd: f64 = 4.0 * 0.2 * 1.3;
    let exact = 0.5 * (1.0 - (cd / (2.0 + cd)).sqrt());
    assert!(rel_err(truncated_sep_branch(&an, 0.2, 4.0, 0.0).unwrap(), exact) < 1e-12);
    let pol = an.policy(0.5, 1.28e-3).unwrap();
    let r = evaluate_metrics(&an, &pol, &ModulationSpec::new(4.0).unwrap()).unwrap();
    assert!(rel_err(r.p_out, 1.0 - (-0.5f64 / 1.3).exp()) < 1e-14);
}
