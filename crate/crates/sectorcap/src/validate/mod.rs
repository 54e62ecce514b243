//! The acceptance suite: closed forms against independent oracles and
//! simulation, plus the qualitative trends of the reference experiments.

mod criteria;
pub mod oracles;

use crate::error::AppResult;
use crate::table::{Cell, Table};

/// Pinned tolerances.
pub mod tol {
    /// Closed-form `Δ1` against nested quadrature (absolute).
    pub const DELTA1_QUADRATURE: f64 = 1e-6;
    /// Simulation agreement, in standard errors.
    pub const MC_SE: f64 = 3.0;
    /// Mass of the selected-gain density (absolute).
    pub const PDF_MASS: f64 = 1e-6;
    /// Series density against the direct form (absolute).
    pub const SERIES_DIRECT: f64 = 1e-8;
    /// Mass of the joint beam-gain density (absolute).
    pub const JOINT_MASS: f64 = 1e-6;
    /// Empirical detection rate around the target (absolute).
    pub const PD_WINDOW: f64 = 0.02;
    /// `V` against quadrature (relative).
    pub const V_QUADRATURE: f64 = 1e-8;
    /// `G` against quadrature (relative).
    pub const G_QUADRATURE: f64 = 1e-9;
    /// Capacity lower bound against quadrature (relative).
    pub const CLB_QUADRATURE: f64 = 1e-6;
    /// Relative gap for a constraint to count as tight.
    pub const TIGHT: f64 = 0.01;
    /// `P_out` against the selected-gain CDF (absolute).
    pub const OUTAGE_IDENTITY: f64 = 1e-12;
    /// Uncorrelated `Δ1` against the mean-gain ratio (absolute).
    pub const RHO0_IDENTITY: f64 = 1e-12;
}

/// Sample sizes and seed for one run of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationSettings {
    pub seed: u64,
    /// Beam-pair draws per grid cell.
    pub beam_draws: u64,
    /// Sample-level sensing trials per beamwidth.
    pub sensing_trials: u64,
    /// Frames per operating point.
    pub frames: u64,
    pub operating_points: usize,
    /// Orientation draws for the averaged trends.
    pub orientations: usize,
}

impl ValidationSettings {
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            beam_draws: 10_000_000,
            sensing_trials: 100_000,
            frames: 1_000_000,
            operating_points: 10,
            orientations: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `|value - reference| <= tolerance`.
    AbsWithin,
    /// `|value - reference| <= tolerance |reference|`.
    RelWithin,
    /// `|value - reference| <= tolerance · se`; the `se` goes in `scale`.
    SeWithin,
    /// `value > reference`.
    Greater,
    /// `value <= reference + tolerance`.
    AtMost,
}

/// One pass/fail comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub relation: Relation,
}

impl Check {
    /// Error in units of the allowance (`<= 1` passes) for the
    /// tolerance-type relations.
    pub fn ratio(&self) -> f64 {
        let d = (self.value - self.reference).abs();
        match self.relation {
            Relation::AbsWithin => d / self.tolerance,
            Relation::RelWithin => d / (self.tolerance * self.reference.abs()),
            Relation::SeWithin => d / (self.tolerance * self.scale),
            Relation::Greater | Relation::AtMost => f64::NAN,
        }
    }

    pub fn passed(&self) -> bool {
        if !self.value.is_finite() || !self.reference.is_finite() {
            return false;
        }
        match self.relation {
            Relation::Greater => self.value > self.reference,
            Relation::AtMost => self.value <= self.reference + self.tolerance,
            Relation::SeWithin if self.scale == 0.0 => self.value == self.reference,
            _ => self.ratio() <= 1.0,
        }
    }
}

/// Collects the checks of one criterion.
#[derive(Debug, Default)]
pub(crate) struct Checks {
    criterion: u8,
    items: Vec<Check>,
}

impl Checks {
    pub(crate) fn new(criterion: u8) -> Self {
        Self { criterion, items: Vec::new() }
    }

    fn add(&mut self, name: String, value: f64, reference: f64, scale: f64, tolerance: f64, relation: Relation) {
        self.items.push(Check { criterion: self.criterion, name, value, reference, scale, tolerance, relation });
    }

    pub(crate) fn abs(&mut self, name: String, value: f64, reference: f64, tolerance: f64) {
        self.add(name, value, reference, 0.0, tolerance, Relation::AbsWithin);
    }

    pub(crate) fn rel(&mut self, name: String, value: f64, reference: f64, tolerance: f64) {
        self.add(name, value, reference, 0.0, tolerance, Relation::RelWithin);
    }

    pub(crate) fn se(&mut self, name: String, est: &sectorcap_core::montecarlo::Estimate, reference: f64) {
        self.add(name, est.value, reference, est.se, tol::MC_SE, Relation::SeWithin);
    }

    pub(crate) fn greater(&mut self, name: String, value: f64, reference: f64) {
        self.add(name, value, reference, 0.0, 0.0, Relation::Greater);
    }

    pub(crate) fn at_most(&mut self, name: String, value: f64, bound: f64, slack: f64) {
        self.add(name, value, bound, 0.0, slack, Relation::AtMost);
    }

    pub(crate) fn finish(self) -> Vec<Check> {
        self.items
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// The tolerance check closest to (or furthest past) its limit.
    pub fn worst(&self) -> Option<&Check> {
        self.checks
            .iter()
            .filter(|c| c.ratio().is_finite())
            .max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
    }

    pub fn summary(&self) -> String {
        let failed = self.failures().count();
        let mut s = format!("{} checks, {} failed", self.checks.len(), failed);
        if let Some(w) = self.worst() {
            s.push_str(&format!("; worst {} at {:.3} of its tolerance", w.name, w.ratio()));
        }
        if let Some(f) = self.failures().next() {
            s.push_str(&format!("; first failure {} (value {:e}, reference {:e})", f.name, f.value, f.reference));
        }
        s
    }

    /// `criterion N [title]: PASS|FAIL (summary)`.
    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!("criterion {} [{}]: {} ({})", self.id, self.title, verdict, self.summary())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub settings: ValidationSettings,
    pub outcomes: Vec<CriterionOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CriterionOutcome::passed)
    }

    pub fn outcome(&self, id: u8) -> Option<&CriterionOutcome> {
        self.outcomes.iter().find(|o| o.id == id)
    }

    pub fn summary_table(&self) -> Table {
        let mut t = Table::new("validate", &["criterion", "title", "passed", "checks", "failed", "worst_ratio"]);
        for o in &self.outcomes {
            t.push(vec![
                Cell::from(o.id as u64),
                Cell::from(o.title),
                Cell::from(o.passed()),
                Cell::from(o.checks.len()),
                Cell::from(o.failures().count()),
                Cell::from(o.worst().map_or(f64::NAN, Check::ratio)),
            ]);
        }
        t
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(
            "validate_checks",
            &["criterion", "check", "relation", "value", "reference", "se", "tolerance", "passed"],
        );
        for c in self.outcomes.iter().flat_map(|o| &o.checks) {
            t.push(vec![
                Cell::from(c.criterion as u64),
                Cell::from(c.name.clone()),
                Cell::from(format!("{:?}", c.relation)),
                Cell::from(c.value),
                Cell::from(c.reference),
                Cell::from(c.scale),
                Cell::from(c.tolerance),
                Cell::from(c.passed()),
            ]);
        }
        t
    }
}

/// Suites 1 to 8.
pub fn run_suites(settings: &ValidationSettings) -> AppResult<Vec<CriterionOutcome>> {
    criteria::run_all(settings)
}

/// Runs suites 1 to 8 twice and adds criterion 9: both runs must render to
/// identical bytes.
pub fn run_validation(settings: &ValidationSettings) -> AppResult<ValidationReport> {
    let first = ValidationReport { settings: *settings, outcomes: run_suites(settings)? };
    let second = ValidationReport { settings: *settings, outcomes: run_suites(settings)? };
    let format = crate::config::TableFormat::Csv;
    let a = first.checks_table().to_bytes(format)?;
    let b = second.checks_table().to_bytes(format)?;
    let mut c9 = Checks::new(9);
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    c9.abs("differing bytes between reruns".to_string(), differing as f64, 0.0, 0.5);
    c9.abs(
        "rendered report size".to_string(),
        a.len() as f64,
        b.len() as f64,
        0.5,
    );
    let mut outcomes = first.outcomes;
    outcomes.push(CriterionOutcome { id: 9, title: "reproducibility", checks: c9.finish() });
    Ok(ValidationReport { settings: *settings, outcomes })
}
