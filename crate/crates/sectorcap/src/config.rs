//! Experiment configuration.
//!
//! Keys carry their units (`_deg`, `_db`, `_ms`, `_khz`, `_w`). Everything
//! is converted to SI units and linear scale in one place, [`ScenarioConfig::resolve`].

use crate::error::{AppError, AppResult};
use sectorcap_core::antenna::RadiationPattern;
use sectorcap_core::beams::BeamChannelModel;
use sectorcap_core::capacity::{InterferenceModel, ScenarioAnalysis, ScenarioParams};
use sectorcap_core::montecarlo::SensingModel;
use sectorcap_core::sensing::SensingConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 2_718_281_828;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub mc: McConfig,
    pub sweep: SweepConfig,
    pub roc: RocConfig,
    pub beams: BeamSweepConfig,
    pub averaging: AveragingConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceChoice {
    Marginal,
    Conditional,
}

impl From<InterferenceChoice> for InterferenceModel {
    fn from(c: InterferenceChoice) -> Self {
        match c {
            InterferenceChoice::Marginal => InterferenceModel::Marginal,
            InterferenceChoice::Conditional => InterferenceModel::Conditional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub sectors: usize,
    pub phi_3db_deg: f64,
    pub side_lobe_level: f64,
    pub rho: f64,
    pub phi_sr_deg: f64,
    pub phi_pu_deg: f64,
    pub noise_power_w: f64,
    pub pu_power_w: f64,
    pub gamma_pu: f64,
    pub gamma_ss: f64,
    pub gamma_sp: f64,
    pub pi1: f64,
    pub pd_target: f64,
    pub t_frame_ms: f64,
    pub t_train_ms: f64,
    pub sample_rate_khz: f64,
    pub t_sense_ms: f64,
    pub p_bar_db: f64,
    pub i_bar_db: f64,
    pub psi: f64,
    pub interference: InterferenceChoice,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            sectors: 8,
            phi_3db_deg: 20.0,
            side_lobe_level: 0.01,
            rho: 0.5,
            phi_sr_deg: 15.0,
            phi_pu_deg: 120.0,
            noise_power_w: 1.0,
            pu_power_w: 0.2,
            gamma_pu: 1.0,
            gamma_ss: 1.0,
            gamma_sp: 1.0,
            pi1: 0.4,
            pd_target: 0.85,
            t_frame_ms: 10.0,
            t_train_ms: 0.5,
            sample_rate_khz: 100.0,
            t_sense_ms: 1.28,
            p_bar_db: 5.0,
            i_bar_db: 0.0,
            psi: 4.0,
            interference: InterferenceChoice::Conditional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensingChoice {
    Clt,
    Samples,
}

impl From<SensingChoice> for SensingModel {
    fn from(c: SensingChoice) -> Self {
        match c {
            SensingChoice::Clt => SensingModel::Clt,
            SensingChoice::Samples => SensingModel::Samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    /// Frames per sweep point and antenna, split evenly across orientations.
    pub frames: u64,
    pub seed: u64,
    pub sensing: SensingChoice,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { frames: 256_000, seed: DEFAULT_SEED, sensing: SensingChoice::Clt }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PBarDb,
    IBarDb,
    PdTarget,
    Rho,
    Pi1,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PBarDb => "p_bar_db",
            SweepAxis::IBarDb => "i_bar_db",
            SweepAxis::PdTarget => "pd_target",
            SweepAxis::Rho => "rho",
            SweepAxis::Pi1 => "pi1",
        }
    }

    /// The scenario with this axis set to `value` (in config units).
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut s = base.clone();
        match self {
            SweepAxis::PBarDb => s.p_bar_db = value,
            SweepAxis::IBarDb => s.i_bar_db = value,
            SweepAxis::PdTarget => s.pd_target = value,
            SweepAxis::Rho => s.rho = value,
            SweepAxis::Pi1 => s.pi1 = value,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { axis: SweepAxis::PBarDb, values: (0..=8).map(|k| -5.0 + 2.5 * k as f64).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RocConfig {
    pub phi_3db_deg: Vec<f64>,
    pub pd_targets: Vec<f64>,
    /// Sample-level sensing trials per point and hypothesis.
    pub trials: u64,
}

impl Default for RocConfig {
    fn default() -> Self {
        Self {
            phi_3db_deg: vec![20.0, 25.0, 30.0],
            pd_targets: (1..20).map(|k| k as f64 / 20.0).collect(),
            trials: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamSweepConfig {
    pub phi_sr_deg: Vec<f64>,
    pub phi_3db_deg: Vec<f64>,
    pub draws: u64,
}

impl Default for BeamSweepConfig {
    fn default() -> Self {
        Self {
            phi_sr_deg: vec![0.0, 10.0, 15.0],
            phi_3db_deg: (2..=12).map(|k| 5.0 * k as f64).collect(),
            draws: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AveragingConfig {
    /// Orientation draws `(φ_PU, φ_SR)` per sweep point.
    pub orientations: usize,
    /// Sectored beamwidths to compare.
    pub phi_3db_deg: Vec<f64>,
    /// Include the single omnidirectional antenna baseline.
    pub omni: bool,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        Self { orientations: 64, phi_3db_deg: vec![20.0, 30.0], omni: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Tsv,
}

impl TableFormat {
    pub fn delimiter(self) -> u8 {
        match self {
            TableFormat::Csv => b',',
            TableFormat::Tsv => b'\t',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: TableFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), format: TableFormat::Csv }
    }
}

fn check(ok: bool, field: &str, reason: impl Into<String>) -> AppResult<()> {
    if ok {
        Ok(())
    } else {
        Err(AppError::invalid(field, reason))
    }
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> AppResult<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| AppError::Config { path: origin.to_string(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Range checks that do not need the numerical engine. Physical
    /// consistency (e.g. sensing window inside the frame) is checked again
    /// when a scenario is resolved.
    pub fn validate(&self) -> AppResult<()> {
        check_scenario(&self.scenario)?;
        check(self.mc.frames > 0, "mc.frames", "must be at least 1")?;

        check(!self.sweep.values.is_empty(), "sweep.values", "must not be empty")?;
        for &v in &self.sweep.values {
            check(finite(v), "sweep.values", "must be finite")?;
            check_scenario(&self.sweep.axis.apply(&self.scenario, v)).map_err(|e| match e {
                AppError::Validation { reason, .. } => {
                    AppError::invalid("sweep.values", format!("{} = {v}: {reason}", self.sweep.axis.name()))
                }
                other => other,
            })?;
        }

        check(!self.roc.phi_3db_deg.is_empty(), "roc.phi_3db_deg", "must not be empty")?;
        for &w in &self.roc.phi_3db_deg {
            check(w > 0.0 && w <= 180.0, "roc.phi_3db_deg", "must lie in (0, 180]")?;
        }
        check(!self.roc.pd_targets.is_empty(), "roc.pd_targets", "must not be empty")?;
        for &p in &self.roc.pd_targets {
            check(p > 0.0 && p < 1.0, "roc.pd_targets", "must lie in (0, 1)")?;
        }
        check(self.roc.trials > 0, "roc.trials", "must be at least 1")?;

        check(!self.beams.phi_sr_deg.is_empty(), "beams.phi_sr_deg", "must not be empty")?;
        for &a in &self.beams.phi_sr_deg {
            check(finite(a), "beams.phi_sr_deg", "must be finite")?;
        }
        check(!self.beams.phi_3db_deg.is_empty(), "beams.phi_3db_deg", "must not be empty")?;
        for &w in &self.beams.phi_3db_deg {
            check(w > 0.0 && w <= 180.0, "beams.phi_3db_deg", "must lie in (0, 180]")?;
        }
        check(self.beams.draws > 0, "beams.draws", "must be at least 1")?;

        check(self.averaging.orientations > 0, "averaging.orientations", "must be at least 1")?;
        check(
            !self.averaging.phi_3db_deg.is_empty() || self.averaging.omni,
            "averaging.phi_3db_deg",
            "no antenna selected",
        )?;
        for &w in &self.averaging.phi_3db_deg {
            check(w > 0.0 && w <= 180.0, "averaging.phi_3db_deg", "must lie in (0, 180]")?;
        }
        Ok(())
    }
}

fn check_scenario(s: &ScenarioConfig) -> AppResult<()> {
    check(s.sectors >= 2, "scenario.sectors", "at least two sectors are needed for beam selection")?;
    check(s.phi_3db_deg > 0.0 && s.phi_3db_deg <= 180.0, "scenario.phi_3db_deg", "must lie in (0, 180]")?;
    check((0.0..1.0).contains(&s.side_lobe_level), "scenario.side_lobe_level", "must lie in [0, 1)")?;
    check((0.0..1.0).contains(&s.rho), "scenario.rho", "must lie in [0, 1)")?;
    check(finite(s.phi_sr_deg), "scenario.phi_sr_deg", "must be finite")?;
    check(finite(s.phi_pu_deg), "scenario.phi_pu_deg", "must be finite")?;
    check(s.noise_power_w > 0.0 && finite(s.noise_power_w), "scenario.noise_power_w", "must be positive")?;
    check(s.pu_power_w >= 0.0 && finite(s.pu_power_w), "scenario.pu_power_w", "must be non-negative")?;
    for (v, f) in [(s.gamma_pu, "scenario.gamma_pu"), (s.gamma_ss, "scenario.gamma_ss"), (s.gamma_sp, "scenario.gamma_sp")] {
        check(v > 0.0 && finite(v), f, "must be positive")?;
    }
    check((0.0..1.0).contains(&s.pi1), "scenario.pi1", "must lie in [0, 1)")?;
    check(s.pd_target > 0.0 && s.pd_target < 1.0, "scenario.pd_target", "must lie in (0, 1)")?;
    check(s.t_frame_ms > 0.0 && finite(s.t_frame_ms), "scenario.t_frame_ms", "must be positive")?;
    check(s.t_train_ms >= 0.0 && finite(s.t_train_ms), "scenario.t_train_ms", "must be non-negative")?;
    check(s.sample_rate_khz > 0.0 && finite(s.sample_rate_khz), "scenario.sample_rate_khz", "must be positive")?;
    check(s.t_sense_ms > 0.0 && finite(s.t_sense_ms), "scenario.t_sense_ms", "must be positive")?;
    check(finite(s.p_bar_db), "scenario.p_bar_db", "must be finite")?;
    check(finite(s.i_bar_db), "scenario.i_bar_db", "must be finite")?;
    check(s.psi > 0.0 && finite(s.psi), "scenario.psi", "must be positive")?;

    Ok(())
}

/// The transmit antenna of one table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Antenna {
    Sectored { phi_3db_deg: f64 },
    Omni,
}

impl Antenna {
    pub fn label(&self) -> String {
        match self {
            Antenna::Sectored { phi_3db_deg } => format!("ra{phi_3db_deg}"),
            Antenna::Omni => "omni".to_string(),
        }
    }
}

/// A scenario in SI units and linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sectors: usize,
    pub phi_3db: f64,
    pub side_lobe: f64,
    pub rho: f64,
    pub phi_sr: f64,
    pub phi_pu: f64,
    pub sensing: SensingConfig,
    pub gamma_ss: f64,
    pub gamma_sp: f64,
    pub p_bar: f64,
    pub i_bar: f64,
    pub psi: f64,
    pub interference: InterferenceModel,
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl ScenarioConfig {
    pub fn resolve(&self) -> AppResult<Scenario> {
        let sensing = SensingConfig {
            t_frame: self.t_frame_ms * 1e-3,
            t_train: self.t_train_ms * 1e-3,
            t_sample: 1.0 / (self.sample_rate_khz * 1e3),
            t_sense: self.t_sense_ms * 1e-3,
            p_pu: self.pu_power_w,
            sigma_w2: self.noise_power_w,
            gamma_pu: self.gamma_pu,
            pi1: self.pi1,
            pd_target: self.pd_target,
        };
        sensing.validate(self.sectors).map_err(|e| AppError::invalid("scenario", e.to_string()))?;
        Ok(Scenario {
            sectors: self.sectors,
            phi_3db: self.phi_3db_deg.to_radians(),
            side_lobe: self.side_lobe_level,
            rho: self.rho,
            phi_sr: self.phi_sr_deg.to_radians(),
            phi_pu: self.phi_pu_deg.to_radians(),
            sensing,
            gamma_ss: self.gamma_ss,
            gamma_sp: self.gamma_sp,
            p_bar: db_to_linear(self.p_bar_db),
            i_bar: db_to_linear(self.i_bar_db),
            psi: self.psi,
            interference: self.interference.into(),
        })
    }
}

impl Scenario {
    /// Unit-average-gain pattern of `antenna` (the scenario beamwidth is
    /// replaced by the antenna's own).
    pub fn pattern(&self, antenna: Antenna) -> AppResult<RadiationPattern> {
        Ok(match antenna {
            Antenna::Sectored { phi_3db_deg } => {
                RadiationPattern::gaussian(self.sectors, phi_3db_deg.to_radians(), self.side_lobe, 1.0)?
                    .normalize_for_unit_ea()
            }
            Antenna::Omni => RadiationPattern::omni(self.sectors)?,
        })
    }

    pub fn sectored_pattern(&self) -> AppResult<RadiationPattern> {
        Ok(RadiationPattern::gaussian(self.sectors, self.phi_3db, self.side_lobe, 1.0)?.normalize_for_unit_ea())
    }

    /// Link analysis for `pattern` with the SU-Rx and PU at the given bearings.
    pub fn analysis(&self, pattern: RadiationPattern, phi_sr: f64, phi_pu: f64) -> AppResult<ScenarioAnalysis> {
        let beams = BeamChannelModel::from_pattern(&pattern, phi_sr, self.gamma_ss, self.rho)?;
        Ok(ScenarioAnalysis::new(ScenarioParams {
            sensing: self.sensing,
            pattern,
            beams,
            gamma_sp: self.gamma_sp,
            phi_pu,
            phi_sr,
            i_bar: self.i_bar,
            p_bar: self.p_bar,
            interference: self.interference,
        })?)
    }
}
