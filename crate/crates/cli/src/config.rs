//! JSON experiment configuration. Angles are in degrees here and converted
//! to radians once, when the core scenario is built.

use std::fs;
use std::path::{Path, PathBuf};

use phased_mimo::beampattern::{MAX_GRID_RESOLUTION, PLOT_GRID_DEG, PROPOSITION_GRID_DEG};
use phased_mimo::sinr::{Beamformer, DEFAULT_PATCHES};
use phased_mimo::{ArrayConfig, Interference, Partition, PointSource, Scenario};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Beampattern,
    SinrCurve,
    MvdrPattern,
    VerifyProp1,
    VerifyProp2,
    HkCurves,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Beampattern => "beampattern",
            Experiment::SinrCurve => "sinr-curve",
            Experiment::MvdrPattern => "mvdr-pattern",
            Experiment::VerifyProp1 => "verify-prop1",
            Experiment::VerifyProp2 => "verify-prop2",
            Experiment::HkCurves => "hk-curves",
        }
    }

    fn default_grid_deg(self) -> f64 {
        match self {
            Experiment::VerifyProp1 | Experiment::VerifyProp2 => PROPOSITION_GRID_DEG,
            _ => PLOT_GRID_DEG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BeamformerKind {
    #[default]
    Conventional,
    Mvdr,
}

impl From<BeamformerKind> for Beamformer {
    fn from(b: BeamformerKind) -> Self {
        match b {
            BeamformerKind::Conventional => Beamformer::ConventionalRx,
            BeamformerKind::Mvdr => Beamformer::Mvdr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistributedConfig {
    pub lo_deg: f64,
    pub hi_deg: f64,
    pub n_patches: usize,
}

impl Default for DistributedConfig {
    fn default() -> Self {
        Self { lo_deg: -50.0, hi_deg: -20.0, n_patches: DEFAULT_PATCHES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub m_tx: usize,
    pub n_rx: usize,
    pub k_subarrays: usize,
    pub d_tx: f64,
    pub d_rx: f64,
    pub target_deg: f64,
    pub interferers_deg: Vec<f64>,
    /// Replaces the point interferers with one spread source.
    pub distributed: Option<DistributedConfig>,
    pub noise_power: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            m_tx: 10,
            n_rx: 10,
            k_subarrays: 5,
            d_tx: 0.5,
            d_rx: 0.5,
            target_deg: 10.0,
            interferers_deg: vec![-30.0, -10.0],
            distributed: None,
            noise_power: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub inr_db: f64,
    /// Interference power follows the target power at every point.
    pub inr_tracks_snr: bool,
    pub beamformer: BeamformerKind,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db: (0..=15).map(|i| -10.0 + 2.0 * i as f64).collect(),
            inr_db: 30.0,
            inr_tracks_snr: false,
            beamformer: BeamformerKind::Conventional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternConfig {
    pub snr_db: f64,
    pub inr_db: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self { snr_db: 0.0, inr_db: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub scenario: ScenarioConfig,
    /// Angle grid step in degrees; filled from the experiment when absent.
    pub grid_deg: Option<f64>,
    pub sweep: SweepConfig,
    pub pattern: PatternConfig,
    /// Half the number of `Ω` samples for `hk-curves`.
    pub hk_half_points: usize,
    pub runs: usize,
    pub snapshot_count: usize,
    pub diagonal_load: f64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::default(),
            scenario: ScenarioConfig::default(),
            grid_deg: None,
            sweep: SweepConfig::default(),
            pattern: PatternConfig::default(),
            hk_half_points: 1000,
            runs: 100,
            snapshot_count: 100,
            diagonal_load: 10.0,
            seed: 0,
            output_path: PathBuf::from("out"),
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Invalid { field: field.to_string(), message: message.into() }
}

fn check_angle_deg(field: &str, v: f64) -> Result<(), HarnessError> {
    if v.is_finite() && v.abs() <= 90.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("angle must lie in [-90, 90] degrees, got {v}")))
    }
}

fn check_positive(field: &str, v: f64) -> Result<(), HarnessError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn grid_step_deg(&self) -> f64 {
        self.grid_deg.unwrap_or_else(|| self.experiment.default_grid_deg())
    }

    /// Fill experiment-dependent defaults and check every field.
    pub fn resolve(mut self) -> Result<Self, HarnessError> {
        self.grid_deg = Some(self.grid_step_deg());
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let s = &self.scenario;
        if s.m_tx == 0 {
            return Err(invalid("scenario.m_tx", "must be at least 1"));
        }
        if s.n_rx == 0 {
            return Err(invalid("scenario.n_rx", "must be at least 1"));
        }
        if s.k_subarrays == 0 || s.k_subarrays > s.m_tx {
            return Err(invalid(
                "scenario.k_subarrays",
                format!("must satisfy 1 <= k_subarrays <= m_tx = {}, got {}", s.m_tx, s.k_subarrays),
            ));
        }
        check_positive("scenario.d_tx", s.d_tx)?;
        check_positive("scenario.d_rx", s.d_rx)?;
        check_angle_deg("scenario.target_deg", s.target_deg)?;
        for (i, a) in s.interferers_deg.iter().enumerate() {
            check_angle_deg(&format!("scenario.interferers_deg[{i}]"), *a)?;
        }
        if let Some(d) = &s.distributed {
            check_angle_deg("scenario.distributed.lo_deg", d.lo_deg)?;
            check_angle_deg("scenario.distributed.hi_deg", d.hi_deg)?;
            if d.lo_deg > d.hi_deg {
                return Err(invalid("scenario.distributed.hi_deg", "must not be below lo_deg"));
            }
            if d.n_patches == 0 {
                return Err(invalid("scenario.distributed.n_patches", "must be at least 1"));
            }
        }
        check_positive("scenario.noise_power", s.noise_power)?;
        let g = self.grid_step_deg();
        if !(g > 0.0 && g <= MAX_GRID_RESOLUTION.to_degrees() + 1e-12) {
            return Err(invalid("grid_deg", format!("must lie in (0, 0.1], got {g}")));
        }
        if self.sweep.snr_db.is_empty() {
            return Err(invalid("sweep.snr_db", "needs at least one point"));
        }
        if let Some(i) = self.sweep.snr_db.iter().position(|v| !v.is_finite()) {
            return Err(invalid(&format!("sweep.snr_db[{i}]"), "must be finite"));
        }
        if !self.sweep.inr_db.is_finite() {
            return Err(invalid("sweep.inr_db", "must be finite"));
        }
        if !self.pattern.snr_db.is_finite() {
            return Err(invalid("pattern.snr_db", "must be finite"));
        }
        if !self.pattern.inr_db.is_finite() {
            return Err(invalid("pattern.inr_db", "must be finite"));
        }
        if self.hk_half_points == 0 {
            return Err(invalid("hk_half_points", "must be at least 1"));
        }
        if self.runs == 0 {
            return Err(invalid("runs", "must be at least 1"));
        }
        if self.snapshot_count == 0 {
            return Err(invalid("snapshot_count", "must be at least 1"));
        }
        if !(self.diagonal_load.is_finite() && self.diagonal_load >= 0.0) {
            return Err(invalid("diagonal_load", format!("must be finite and >= 0, got {}", self.diagonal_load)));
        }
        Ok(())
    }

    pub fn array_config(&self) -> Result<ArrayConfig, HarnessError> {
        let s = &self.scenario;
        Ok(ArrayConfig::new(s.m_tx, s.n_rx, s.d_tx, s.d_rx)?)
    }

    /// Core scenario with unit-power target and interferers; sweep code
    /// rescales the powers per point.
    pub fn scenario(&self) -> Result<Scenario, HarnessError> {
        let s = &self.scenario;
        let cfg = self.array_config()?;
        let interference = match &s.distributed {
            Some(d) => Interference::Distributed {
                lo: d.lo_deg.to_radians(),
                hi: d.hi_deg.to_radians(),
                total_power: 1.0,
                n_patches: d.n_patches,
            },
            None => Interference::Points(
                s.interferers_deg.iter().map(|a| PointSource { angle: a.to_radians(), power: 1.0 }).collect(),
            ),
        };
        Ok(Scenario {
            part: Partition::phased_array(s.m_tx)?,
            cfg,
            target: PointSource { angle: s.target_deg.to_radians(), power: 1.0 },
            interference,
            noise_power: s.noise_power,
            snapshot_count: self.snapshot_count,
            pulse_runs: self.runs,
            diagonal_load: self.diagonal_load,
            seed: self.seed,
        })
    }

    /// Canonical JSON used for the scenario hash. The output path is not
    /// part of it.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Deserialize without filling experiment-dependent defaults or validating.
pub fn parse_raw(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Parse {
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    parse_raw(text)?.resolve()
}

pub fn load_raw(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    parse_raw(&text)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    load_raw(path)?.resolve()
}
