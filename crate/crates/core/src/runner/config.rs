//! Strict, versioned TOML configuration for experiment runs.
//!
//! One format, one schema: unknown keys are rejected, all angles are radians
//! unless a string spells out a `deg` or `rad` suffix, and a config plus a
//! seed fully determines the output bytes.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use super::RunnerError;
use crate::interferometry::Polarization;
use crate::polarimetry::non_additivity_report;

/// Schema version this library reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Angle in radians. In config files a bare number is radians; strings carry
/// an explicit unit suffix: `"45 deg"` or `"0.5 rad"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number (radians) or a string with a 'rad'/'deg' suffix")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (number, to_radians) = if let Some(num) = t.strip_suffix("deg") {
        (num, true)
    } else if let Some(num) = t.strip_suffix("rad") {
        (num, false)
    } else {
        return Err(format!(
            "angle string {t:?} needs an explicit 'rad' or 'deg' suffix"
        ));
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|e| format!("cannot parse angle {t:?}: {e}"))?;
    Ok(if to_radians { value.to_radians() } else { value })
}

/// Inclusive evenly spaced angle grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: Angle,
    pub stop: Angle,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start.0, self.stop.0, self.points)
    }

    pub fn span(&self) -> f64 {
        (self.stop.0 - self.start.0).abs()
    }
}

/// Inclusive evenly spaced grid of dimensionless values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarGridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ScalarGridSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![start];
    }
    (0..points)
        .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    PolarimeterPhase,
    NonAdditivity,
    Interferogram,
    ChshPolar,
    ChshAzimuthal,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::PolarimeterPhase => "polarimeter_phase",
            Scenario::NonAdditivity => "non_additivity",
            Scenario::Interferogram => "interferogram",
            Scenario::ChshPolar => "chsh_polar",
            Scenario::ChshAzimuthal => "chsh_azimuthal",
        }
    }

    /// Config key of the parameter block this scenario reads.
    pub fn block_key(&self) -> &'static str {
        match self {
            Scenario::PolarimeterPhase => "polarimeter",
            Scenario::NonAdditivity => "non_additivity",
            Scenario::Interferogram => "interferogram",
            Scenario::ChshPolar => "chsh_polar",
            Scenario::ChshAzimuthal => "chsh_azimuthal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationChoice {
    Up,
    Down,
}

impl From<PolarizationChoice> for Polarization {
    fn from(c: PolarizationChoice) -> Self {
        match c {
            PolarizationChoice::Up => Polarization::Up,
            PolarizationChoice::Down => Polarization::Down,
        }
    }
}

/// Which table an interferogram run emits: fitted phases against φ_I, or one
/// raw fringe (counts against χ) at the first φ_I grid value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterferogramTable {
    #[default]
    Phase,
    Fringe,
}

/// Parameters for the `polarimeter_phase` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarimeterBlock {
    pub xi: Angle,
    pub delta: Angle,
    #[serde(default)]
    pub zeta: Angle,
    pub purity: f64,
    pub eta_grid: GridSpec,
    #[serde(default = "default_counts")]
    pub counts_per_point: f64,
    /// Gaussian spin-turner angle jitter (radians); 0 disables the noise model.
    #[serde(default)]
    pub jitter_sigma: f64,
}

/// Parameters for the `non_additivity` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonAdditivityBlock {
    pub phi_g: Angle,
    pub phi_d: Angle,
    pub purity_grid: ScalarGridSpec,
}

/// Parameters for the `interferogram` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferogramBlock {
    #[serde(default)]
    pub table: InterferogramTable,
    #[serde(default = "default_polarization")]
    pub initial_polarization: PolarizationChoice,
    pub phi_ii: Angle,
    pub phi_i_grid: GridSpec,
    /// Path-phase grid for each fringe; defaults to 65 points over [0, 2π].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_grid: Option<GridSpec>,
    #[serde(default = "default_delta")]
    pub analysis_delta: Angle,
    #[serde(default = "default_counts")]
    pub counts_per_point: f64,
}

impl InterferogramBlock {
    pub fn chi_values(&self) -> Vec<f64> {
        self.chi_grid
            .unwrap_or(GridSpec {
                start: Angle(0.0),
                stop: Angle(2.0 * PI),
                points: 65,
            })
            .values()
    }
}

/// Parameters for the `chsh_polar` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshPolarBlock {
    pub gamma_grid: GridSpec,
    /// Maximize S numerically (grid + simplex) instead of using the closed
    /// form for the adjusted polar angles.
    #[serde(default = "default_true")]
    pub numerical: bool,
    /// Joint counts per measurement setting when sampling.
    #[serde(default = "default_total")]
    pub total_counts: u64,
}

/// Parameters for the `chsh_azimuthal` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshAzimuthalBlock {
    pub gamma_grid: GridSpec,
    #[serde(default = "default_total")]
    pub total_counts: u64,
}

fn default_counts() -> f64 {
    10_000.0
}

fn default_total() -> u64 {
    10_000
}

fn default_true() -> bool {
    true
}

fn default_delta() -> Angle {
    Angle(PI / 2.0)
}

fn default_polarization() -> PolarizationChoice {
    PolarizationChoice::Up
}

/// One experiment run: scenario selector, shared run controls, and exactly
/// one scenario parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    /// Exact means and closed forms instead of sampled counts.
    #[serde(default)]
    pub analytic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarimeter: Option<PolarimeterBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_additivity: Option<NonAdditivityBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interferogram: Option<InterferogramBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh_polar: Option<ChshPolarBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh_azimuthal: Option<ChshAzimuthalBlock>,
}

impl ExperimentConfig {
    /// Parse a TOML document against the strict schema.
    pub fn from_toml_str(text: &str) -> Result<Self, RunnerError> {
        toml::from_str(text).map_err(|e| RunnerError::ConfigInvalid(e.to_string()))
    }

    /// Canonical TOML rendering (field order fixed, angles in radians); used
    /// for the metadata echo so identical configs echo identically.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

/// A single validation finding, qualified by the config key path it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn new(path: &str, message: impl Into<String>) -> Self {
        Self { path: path.to_string(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Check a parsed config for semantic problems; an empty list means the
/// config is runnable. Never mutates anything.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    if cfg.version != SCHEMA_VERSION {
        d.push(Diagnostic::new(
            "version",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.version),
        ));
    }

    let blocks: [(&str, bool); 5] = [
        ("polarimeter", cfg.polarimeter.is_some()),
        ("non_additivity", cfg.non_additivity.is_some()),
        ("interferogram", cfg.interferogram.is_some()),
        ("chsh_polar", cfg.chsh_polar.is_some()),
        ("chsh_azimuthal", cfg.chsh_azimuthal.is_some()),
    ];
    let required = cfg.scenario.block_key();
    for (key, present) in blocks {
        if key == required && !present {
            d.push(Diagnostic::new(
                key,
                format!("missing [{key}] block required by scenario {}", cfg.scenario.name()),
            ));
        }
        if key != required && present {
            d.push(Diagnostic::new(
                key,
                format!("block does not apply to scenario {}", cfg.scenario.name()),
            ));
        }
    }

    if let Some(b) = &cfg.polarimeter {
        validate_polarimeter(b, &mut d);
    }
    if let Some(b) = &cfg.non_additivity {
        validate_non_additivity(b, &mut d);
    }
    if let Some(b) = &cfg.interferogram {
        validate_interferogram(b, &mut d);
    }
    if let Some(b) = &cfg.chsh_polar {
        validate_gamma_block("chsh_polar", &b.gamma_grid, b.total_counts, cfg.analytic, &mut d);
    }
    if let Some(b) = &cfg.chsh_azimuthal {
        validate_gamma_block("chsh_azimuthal", &b.gamma_grid, b.total_counts, cfg.analytic, &mut d);
    }
    d
}

fn check_angle(path: &str, a: Angle, d: &mut Vec<Diagnostic>) {
    if !a.0.is_finite() {
        d.push(Diagnostic::new(path, format!("angle must be finite, got {}", a.0)));
    }
}

fn check_grid(path: &str, start: f64, stop: f64, points: usize, min_points: usize, d: &mut Vec<Diagnostic>) {
    if !start.is_finite() || !stop.is_finite() {
        d.push(Diagnostic::new(path, "grid endpoints must be finite"));
    }
    if points < min_points {
        d.push(Diagnostic::new(
            path,
            format!("grid needs at least {min_points} points, got {points}"),
        ));
    }
    if points > 1 && start == stop {
        d.push(Diagnostic::new(path, "grid span is zero but more than one point was requested"));
    }
}

fn validate_polarimeter(b: &PolarimeterBlock, d: &mut Vec<Diagnostic>) {
    check_angle("polarimeter.xi", b.xi, d);
    check_angle("polarimeter.delta", b.delta, d);
    check_angle("polarimeter.zeta", b.zeta, d);
    if !b.purity.is_finite() || !(0.0..=1.0).contains(&b.purity) {
        d.push(Diagnostic::new(
            "polarimeter.purity",
            format!("purity out of [0,1]: {}", b.purity),
        ));
    }
    check_grid(
        "polarimeter.eta_grid",
        b.eta_grid.start.0,
        b.eta_grid.stop.0,
        b.eta_grid.points,
        1,
        d,
    );
    if b.eta_grid.points < 4 {
        d.push(Diagnostic::new(
            "polarimeter.eta_grid.points",
            format!("fringe fitting needs a minimum grid size of 4, got {}", b.eta_grid.points),
        ));
    }
    if !b.counts_per_point.is_finite() || b.counts_per_point < 1.0 {
        d.push(Diagnostic::new(
            "polarimeter.counts_per_point",
            format!("must be at least 1, got {}", b.counts_per_point),
        ));
    }
    if !b.jitter_sigma.is_finite() || b.jitter_sigma < 0.0 {
        d.push(Diagnostic::new(
            "polarimeter.jitter_sigma",
            format!("must be a nonnegative number, got {}", b.jitter_sigma),
        ));
    }
}

fn validate_non_additivity(b: &NonAdditivityBlock, d: &mut Vec<Diagnostic>) {
    check_angle("non_additivity.phi_g", b.phi_g, d);
    check_angle("non_additivity.phi_d", b.phi_d, d);
    check_grid(
        "non_additivity.purity_grid",
        b.purity_grid.start,
        b.purity_grid.stop,
        b.purity_grid.points,
        1,
        d,
    );
    for (key, v) in [("start", b.purity_grid.start), ("stop", b.purity_grid.stop)] {
        if v.is_finite() && !(0.0..=1.0).contains(&v) {
            d.push(Diagnostic::new(
                &format!("non_additivity.purity_grid.{key}"),
                format!("purity out of [0,1]: {v}"),
            ));
        }
    }
    // realizability depends only on the target phases, so probe it once here
    if b.phi_g.0.is_finite() && b.phi_d.0.is_finite() {
        if let Err(e) = non_additivity_report(0.5, b.phi_g.0, b.phi_d.0) {
            d.push(Diagnostic::new("non_additivity", e.to_string()));
        }
    }
}

fn validate_interferogram(b: &InterferogramBlock, d: &mut Vec<Diagnostic>) {
    check_angle("interferogram.phi_ii", b.phi_ii, d);
    check_angle("interferogram.analysis_delta", b.analysis_delta, d);
    // a raw fringe needs one φ_I; the phase-vs-φ_I line fit needs two or more
    let min_phi_points = match b.table {
        InterferogramTable::Phase => 2,
        InterferogramTable::Fringe => 1,
    };
    check_grid(
        "interferogram.phi_i_grid",
        b.phi_i_grid.start.0,
        b.phi_i_grid.stop.0,
        b.phi_i_grid.points,
        min_phi_points,
        d,
    );
    if let Some(g) = &b.chi_grid {
        check_grid("interferogram.chi_grid", g.start.0, g.stop.0, g.points, 4, d);
        if g.span() < 2.0 * PI - 1e-9 {
            d.push(Diagnostic::new(
                "interferogram.chi_grid",
                format!("chi grid must span a full 2π period, got {:.6} rad", g.span()),
            ));
        }
    }
    if b.analysis_delta.0.is_finite() && b.analysis_delta.0.sin().abs() < 1e-9 {
        d.push(Diagnostic::new(
            "interferogram.analysis_delta",
            "sin δ = 0 gives zero fringe contrast; the phase fit is degenerate",
        ));
    }
    if !b.counts_per_point.is_finite() || b.counts_per_point < 1.0 {
        d.push(Diagnostic::new(
            "interferogram.counts_per_point",
            format!("must be at least 1, got {}", b.counts_per_point),
        ));
    }
}

fn validate_gamma_block(
    block: &str,
    grid: &GridSpec,
    total_counts: u64,
    analytic: bool,
    d: &mut Vec<Diagnostic>,
) {
    check_grid(
        &format!("{block}.gamma_grid"),
        grid.start.0,
        grid.stop.0,
        grid.points,
        1,
        d,
    );
    if !analytic && total_counts == 0 {
        d.push(Diagnostic::new(
            &format!("{block}.total_counts"),
            "sampling needs a positive count total; set analytic = true for exact probabilities",
        ));
    }
}
