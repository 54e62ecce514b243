//! Independent numerical oracles for the integration tests.
//!
//! Deliberately unrelated to the crate's own adaptive quadrature: composite
//! Gauss-Legendre on fixed panels, the trapezoid rule for periodic
//! integrands, and simple reference formulas.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite 20-point Gauss-Legendre over `panels` equal panels of `[a, b]`.
pub fn gl_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// `∫_a^∞ f` via `x = a + t/(1-t)` on `[0, 1)`.
pub fn gl_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, panels: usize) -> f64 {
    gl_integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            let x = a + scale * t / u;
            let v = f(x) * scale / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        panels,
    )
}

/// `(1/2π) ∫_0^{2π} f` with the trapezoid rule (spectrally accurate for
/// smooth periodic integrands).
pub fn periodic_mean<F: FnMut(f64) -> f64>(mut f: F, points: usize) -> f64 {
    (0..points).map(|k| f(2.0 * PI * k as f64 / points as f64)).sum::<f64>() / points as f64
}

/// `I0(x)` by its power series.
pub fn bessel_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `e^{-x} I0(x)`: power series below 30, asymptotic expansion above.
pub fn bessel_i0_scaled_oracle(x: f64) -> f64 {
    if x < 30.0 {
        return (-x).exp() * bessel_i0_series(x);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * 8.0 * x);
        sum += term;
        if term < 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Joint density of two correlated exponential gains with the symmetric
/// normalizer `1/(δ1 δ2 (1-ρ²))`.
pub fn joint_pdf_oracle(d1: f64, d2: f64, rho: f64, y1: f64, y2: f64) -> f64 {
    let c = 1.0 - rho * rho;
    let (a1, a2) = (1.0 / (d1 * c), 1.0 / (d2 * c));
    let z = 2.0 * rho * (a1 * a2 * y1 * y2).sqrt();
    (z - a1 * y1 - a2 * y2).exp() * bessel_i0_scaled_oracle(z) / (d1 * d2 * c)
}

/// `P(ν1 > ν2)`: the joint density integrated over `y2 = u² y1`,
/// `u ∈ [0,1]`, with the inner `y1` integral done in closed form:
/// `∫ y e^{-s y} I0(b y) dy = s / (s² - b²)^{3/2}`.
pub fn delta1_oracle(d1: f64, d2: f64, rho: f64) -> f64 {
    let c = 1.0 - rho * rho;
    let (a1, a2) = (1.0 / (d1 * c), 1.0 / (d2 * c));
    gl_integrate(
        |u| {
            let t = u * u;
            let s = a1 + a2 * t;
            let b = 2.0 * rho * (a1 * a2 * t).sqrt();
            2.0 * u * s / (s * s - b * b).powf(1.5) / (d1 * d2 * c)
        },
        0.0,
        1.0,
        64,
    )
}

/// `P(ν1 > ν2)` by brute-force two-dimensional quadrature of the joint
/// density over the same region.
pub fn delta1_double_quadrature(d1: f64, d2: f64, rho: f64) -> f64 {
    let c = 1.0 - rho * rho;
    let (a1, a2) = (1.0 / (d1 * c), 1.0 / (d2 * c));
    gl_integrate(
        |u| {
            let t = u * u;
            let decay = a1 + a2 * t - 2.0 * rho * (a1 * a2 * t).sqrt();
            2.0 * u * gl_to_infinity(|y| y * joint_pdf_oracle(d1, d2, rho, y, t * y), 0.0, 1.0 / decay, 24)
        },
        0.0,
        1.0,
        24,
    )
}

/// Central finite difference.
pub fn derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Number of sign changes in the discrete differences of `v`, ignoring
/// differences below `tol` in magnitude.
pub fn difference_sign_changes(v: &[f64], tol: f64) -> usize {
    let signs: Vec<i8> = v
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > tol)
        .map(|d| if d > 0.0 { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

// Shared scenario fixtures.

use sectorcap_core::antenna::RadiationPattern;
use sectorcap_core::beams::BeamChannelModel;
use sectorcap_core::capacity::{InterferenceModel, ScenarioAnalysis, ScenarioParams};
use sectorcap_core::sensing::SensingConfig;

/// Frame and PU parameters of the reference operating point
/// (`T_sen = 1.28 ms` gives `N = 16` with `M = 8`).
pub fn reference_sensing() -> SensingConfig {
    SensingConfig {
        t_frame: 10e-3,
        t_train: 0.5e-3,
        t_sample: 1e-5,
        t_sense: 1.28e-3,
        p_pu: 0.2,
        sigma_w2: 1.0,
        gamma_pu: 1.0,
        pi1: 0.4,
        pd_target: 0.85,
    }
}

pub fn unit_pattern(phi_3db_deg: f64) -> RadiationPattern {
    RadiationPattern::gaussian(8, phi_3db_deg.to_radians(), 0.01, 1.0).unwrap().normalize_for_unit_ea()
}

/// `φ3dB = 20°`, `φ_SR = 15°`, `φ_PU = 120°`, `ρ = 0.5`, `P̄ = 5 dB`, `Ī = 0 dB`.
pub fn reference_scenario(interference: InterferenceModel) -> ScenarioAnalysis {
    let pattern = unit_pattern(20.0);
    let phi_sr = 15f64.to_radians();
    let beams = BeamChannelModel::from_pattern(&pattern, phi_sr, 1.0, 0.5).unwrap();
    ScenarioAnalysis::new(ScenarioParams {
        sensing: reference_sensing(),
        pattern,
        beams,
        gamma_sp: 1.0,
        phi_pu: 120f64.to_radians(),
        phi_sr,
        i_bar: 1.0,
        p_bar: 10f64.powf(0.5),
        interference,
    })
    .unwrap()
}
