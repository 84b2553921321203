//! Output SINR of the phased-array, MIMO and phased-MIMO radars: closed-form,
//! optimal (exact covariance) and Monte-Carlo estimates.
//!
//! Powers are linear. `SNR = σ_s²/σ_n²` and `INR = σ_i²/σ_n²` are defined per
//! element before any beamforming.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::array::{self, check_angle, ArrayConfig, Partition};
use crate::beamforming::{self, CovarianceEstimate, DEFAULT_DIAGONAL_LOAD, DEFAULT_SNAPSHOT_COUNT};
use crate::linalg::{inner, quad_form, CMatrix, CVector, Complex64, HermitianSolver};
use crate::{Error, Result};

/// Point sources used to discretize a spatially distributed interferer.
pub const DEFAULT_PATCHES: usize = 61;

/// Independent pulses per Monte-Carlo SINR point unless overridden.
pub const DEFAULT_PULSE_RUNS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadarMode {
    PhasedArray,
    Mimo,
    PhasedMimo(usize),
}

impl RadarMode {
    pub fn partition(self, m_tx: usize) -> Result<Partition> {
        match self {
            RadarMode::PhasedArray => Partition::phased_array(m_tx),
            RadarMode::Mimo => Partition::mimo(m_tx),
            RadarMode::PhasedMimo(k) => Partition::fully_overlapped(m_tx, k),
        }
    }

    /// Short column label: `ph`, `mimo`, `phmimo`.
    pub fn label(self) -> &'static str {
        match self {
            RadarMode::PhasedArray => "ph",
            RadarMode::Mimo => "mimo",
            RadarMode::PhasedMimo(_) => "phmimo",
        }
    }

    /// Phased array, MIMO and phased-MIMO with `k` subarrays.
    pub fn standard_set(k: usize) -> [RadarMode; 3] {
        [RadarMode::PhasedArray, RadarMode::Mimo, RadarMode::PhasedMimo(k)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub angle: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Interference {
    Points(Vec<PointSource>),
    /// Uniform angular spread over `[lo, hi]`, split into `n_patches`
    /// equal-power point sources whose powers sum to `total_power`.
    Distributed { lo: f64, hi: f64, total_power: f64, n_patches: usize },
}

impl Interference {
    pub fn none() -> Self {
        Interference::Points(Vec::new())
    }

    pub fn sources(&self) -> Vec<PointSource> {
        match self {
            Interference::Points(p) => p.clone(),
            Interference::Distributed { lo, hi, total_power, n_patches } => {
                let n = *n_patches;
                let power = total_power / n as f64;
                (0..n)
                    .map(|i| {
                        let angle = if n == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
                        PointSource { angle, power }
                    })
                    .collect()
            }
        }
    }

    /// Same geometry with every source (or the whole spread) at `power`.
    pub fn with_power(&self, power: f64) -> Self {
        match self {
            Interference::Points(p) => {
                Interference::Points(p.iter().map(|s| PointSource { angle: s.angle, power }).collect())
            }
            Interference::Distributed { lo, hi, n_patches, .. } => {
                Interference::Distributed { lo: *lo, hi: *hi, total_power: power, n_patches: *n_patches }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Interference::Points(p) => {
                for s in p {
                    check_angle(s.angle)?;
                    check_power("interferer power", s.power)?;
                }
            }
            Interference::Distributed { lo, hi, total_power, n_patches } => {
                check_angle(*lo)?;
                check_angle(*hi)?;
                if lo > hi {
                    return Err(Error::InvalidScenario(format!("distributed source bounds reversed: {lo} > {hi}")));
                }
                if *n_patches == 0 {
                    return Err(Error::InvalidScenario("distributed source needs at least one patch".into()));
                }
                check_power("distributed source power", *total_power)?;
            }
        }
        Ok(())
    }
}

fn check_power(what: &str, p: f64) -> Result<()> {
    if p.is_finite() && p >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScenario(format!("{what} must be finite and >= 0, got {p}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: ArrayConfig,
    pub part: Partition,
    pub target: PointSource,
    pub interference: Interference,
    pub noise_power: f64,
    pub snapshot_count: usize,
    pub pulse_runs: usize,
    pub diagonal_load: f64,
    pub seed: u64,
}

impl Scenario {
    /// Target only, unit noise, default protocol counts.
    pub fn new(cfg: ArrayConfig, part: Partition, target: PointSource) -> Self {
        Self {
            cfg,
            part,
            target,
            interference: Interference::none(),
            noise_power: 1.0,
            snapshot_count: DEFAULT_SNAPSHOT_COUNT,
            pulse_runs: DEFAULT_PULSE_RUNS,
            diagonal_load: DEFAULT_DIAGONAL_LOAD,
            seed: 0,
        }
    }

    pub fn with_partition(&self, part: Partition) -> Self {
        Self { part, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.part.m_tx() != self.cfg.m_tx() {
            return Err(Error::InvalidPartition(format!(
                "partition built for M = {} used with M = {}",
                self.part.m_tx(),
                self.cfg.m_tx()
            )));
        }
        check_angle(self.target.angle)?;
        check_power("target power", self.target.power)?;
        check_power("noise power", self.noise_power)?;
        check_power("diagonal load", self.diagonal_load)?;
        self.interference.validate()?;
        if self.snapshot_count == 0 {
            return Err(Error::InvalidScenario("snapshot_count must be at least 1".into()));
        }
        if self.pulse_runs == 0 {
            return Err(Error::InvalidScenario("pulse_runs must be at least 1".into()));
        }
        Ok(())
    }

    fn virtual_dim(&self) -> usize {
        self.part.k() * self.cfg.n_rx()
    }
}

/// `R_{i+n} = Σ (M/K) σ_i² u(θ_i) u(θ_i)^H + σ_n² I`.
pub fn interference_noise_covariance(scenario: &Scenario, tx_weights: &[CVector]) -> Result<CovarianceEstimate> {
    scenario.validate()?;
    let dim = scenario.virtual_dim();
    let scale = scenario.part.energy_scale();
    let mut r = CMatrix::identity(dim, dim) * Complex64::new(scenario.noise_power, 0.0);
    for s in scenario.interference.sources() {
        let u = array::virtual_steering(tx_weights, &scenario.cfg, &scenario.part, s.angle)?.entries;
        r += &u * u.adjoint() * Complex64::new(scale * s.power, 0.0);
    }
    Ok(CovarianceEstimate::exact(r))
}

fn target_steering(scenario: &Scenario, tx_weights: &[CVector]) -> Result<CVector> {
    Ok(array::virtual_steering(tx_weights, &scenario.cfg, &scenario.part, scenario.target.angle)?.entries)
}

/// `(M/K) σ_s² |w^H u(θ_s)|² / (w^H R_{i+n} w)`.
pub fn analytic_sinr(scenario: &Scenario, tx_weights: &[CVector], rx_weights: &CVector) -> Result<f64> {
    let r = interference_noise_covariance(scenario, tx_weights)?;
    let u_s = target_steering(scenario, tx_weights)?;
    if rx_weights.len() != u_s.len() {
        return Err(Error::DimensionMismatch { what: "receive weight vector", expected: u_s.len(), got: rx_weights.len() });
    }
    let denom = quad_form(&r.matrix, rx_weights);
    if rx_weights.norm() == 0.0 || denom <= 0.0 {
        return Err(Error::ZeroResponse);
    }
    Ok(scenario.part.energy_scale() * scenario.target.power * inner(rx_weights, &u_s).norm_sqr() / denom)
}

/// `(M/K) σ_s² u_s^H R_{i+n}^{-1} u_s`, the best any receive beamformer can do.
pub fn optimal_sinr(scenario: &Scenario, tx_weights: &[CVector]) -> Result<f64> {
    let r = interference_noise_covariance(scenario, tx_weights)?;
    let u_s = target_steering(scenario, tx_weights)?;
    let x = HermitianSolver::new(&r.matrix)?.solve(&u_s)?;
    Ok(scenario.part.energy_scale() * scenario.target.power * inner(&u_s, &x).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beamformer {
    ConventionalRx,
    Mvdr,
}

impl Beamformer {
    pub fn name(self) -> &'static str {
        match self {
            Beamformer::ConventionalRx => "conventional",
            Beamformer::Mvdr => "mvdr",
        }
    }
}

/// Ratio-of-mean-powers SINR estimate with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub sinr: f64,
    pub std_error: f64,
    pub runs: usize,
}

impl McEstimate {
    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr.log10()
    }
}

fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// RNG stream for one Monte-Carlo run. Streams depend only on
/// `(seed, run)`, so every radar mode sees the same target draw in a run.
pub fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

struct Model<'a> {
    u_s: CVector,
    sources: Vec<(CVector, f64)>,
    scenario: &'a Scenario,
    gain: f64,
}

impl Model<'_> {
    /// One interference-plus-noise virtual snapshot.
    fn clutter(&self, rng: &mut ChaCha8Rng) -> CVector {
        let mut y = CVector::zeros(self.u_s.len());
        for (u, power) in &self.sources {
            let beta = cn(rng) * (power.sqrt() * self.gain);
            y.axpy(beta, u, Complex64::new(1.0, 0.0));
        }
        let sigma = self.scenario.noise_power.sqrt();
        for z in y.iter_mut() {
            *z += cn(rng) * sigma;
        }
        y
    }
}

/// Per-run output powers `(signal, interference + noise)`.
fn simulate_run(model: &Model, tx_beamformer: Beamformer, run: usize) -> Result<(f64, f64)> {
    let sc = model.scenario;
    let mut rng = run_rng(sc.seed, run);
    let beta_s = cn(&mut rng) * sc.target.power.sqrt();
    let test = model.clutter(&mut rng);

    let w = match tx_beamformer {
        Beamformer::ConventionalRx => model.u_s.clone(),
        Beamformer::Mvdr => {
            let training: Vec<CVector> = (0..sc.snapshot_count).map(|_| model.clutter(&mut rng)).collect();
            let cov = beamforming::sample_covariance(&training, sc.diagonal_load)?;
            beamforming::mvdr_weights(&cov, &model.u_s)?
        }
    };
    let signal = (inner(&w, &model.u_s) * beta_s * model.gain).norm_sqr();
    let rest = inner(&w, &test).norm_sqr();
    Ok((signal, rest))
}

/// Monte-Carlo output SINR over `scenario.pulse_runs` pulses.
///
/// Each pulse draws fresh target and interference reflection coefficients and
/// noise. The MVDR beamformer is retrained every pulse from
/// `snapshot_count` target-free snapshots with the scenario's diagonal load.
pub fn monte_carlo_sinr(scenario: &Scenario, tx_weights: &[CVector], beamformer: Beamformer) -> Result<McEstimate> {
    scenario.validate()?;
    let cfg = &scenario.cfg;
    let part = &scenario.part;
    let sources = scenario
        .interference
        .sources()
        .into_iter()
        .map(|s| Ok((array::virtual_steering(tx_weights, cfg, part, s.angle)?.entries, s.power)))
        .collect::<Result<Vec<_>>>()?;
    let model = Model {
        u_s: target_steering(scenario, tx_weights)?,
        sources,
        scenario,
        gain: part.energy_scale().sqrt(),
    };

    let per_run = (0..scenario.pulse_runs)
        .into_par_iter()
        .map(|run| simulate_run(&model, beamformer, run))
        .collect::<Result<Vec<_>>>()?;
    Ok(ratio_of_means(&per_run))
}

fn ratio_of_means(samples: &[(f64, f64)]) -> McEstimate {
    let n = samples.len() as f64;
    let (ss, sd) = samples.iter().fold((0.0, 0.0), |(a, b), (s, d)| (a + s, b + d));
    let (ms, md) = (ss / n, sd / n);
    let sinr = ms / md;
    let std_error = if samples.len() > 1 {
        let (mut vs, mut vd, mut cov) = (0.0, 0.0, 0.0);
        for (s, d) in samples {
            vs += (s - ms) * (s - ms);
            vd += (d - md) * (d - md);
            cov += (s - ms) * (d - md);
        }
        let k = 1.0 / (n - 1.0);
        let (vs, vd, cov) = (vs * k, vd * k, cov * k);
        let var = (vs / (md * md) + ms * ms * vd / md.powi(4) - 2.0 * ms * cov / md.powi(3)) / n;
        var.max(0.0).sqrt()
    } else {
        f64::NAN
    };
    McEstimate { sinr, std_error, runs: samples.len() }
}

/// Sweep settings for [`sinr_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    pub inr_db: f64,
    /// Set the interference power equal to the target power at every point.
    pub inr_tracks_snr: bool,
    pub modes: Vec<RadarMode>,
    pub beamformer: Beamformer,
    /// Skip the Monte-Carlo estimate (analytic curves only).
    pub analytic_only: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSeries {
    pub mode: RadarMode,
    /// Closed-form SINR of the conventional receiver, or the optimal SINR
    /// when the beamformer is MVDR.
    pub reference: Vec<f64>,
    pub monte_carlo: Vec<Option<McEstimate>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinrCurve {
    pub snr_axis_db: Vec<f64>,
    pub series: Vec<ModeSeries>,
    pub beamformer: Beamformer,
    pub seed: u64,
}

impl SinrCurve {
    pub fn series(&self, mode: RadarMode) -> Option<&ModeSeries> {
        self.series.iter().find(|s| s.mode == mode)
    }
}

/// Scenario at one sweep point: target power from SNR, interference power
/// from INR, both relative to the scenario's noise power.
pub fn scenario_at(base: &Scenario, part: Partition, snr_db: f64, inr_db: f64) -> Scenario {
    let mut sc = base.with_partition(part);
    sc.target.power = base.noise_power * 10f64.powf(snr_db / 10.0);
    sc.interference = base.interference.with_power(base.noise_power * 10f64.powf(inr_db / 10.0));
    sc
}

/// SINR versus SNR for each radar mode with conventional transmit weights.
pub fn sinr_sweep(base: &Scenario, spec: &SweepSpec) -> Result<SinrCurve> {
    base.validate()?;
    let series = spec
        .modes
        .iter()
        .map(|&mode| {
            let part = mode.partition(base.cfg.m_tx())?;
            let tx = beamforming::conventional_tx_weights(&base.cfg, &part, base.target.angle)?;
            let mut reference = Vec::with_capacity(spec.snr_db.len());
            let mut monte_carlo = Vec::with_capacity(spec.snr_db.len());
            for &snr in &spec.snr_db {
                let inr = if spec.inr_tracks_snr { snr } else { spec.inr_db };
                let sc = scenario_at(base, part.clone(), snr, inr);
                reference.push(match spec.beamformer {
                    Beamformer::ConventionalRx => {
                        let w = beamforming::conventional_rx_weights(&sc.cfg, &sc.part, &tx, sc.target.angle)?;
                        analytic_sinr(&sc, &tx, &w)?
                    }
                    Beamformer::Mvdr => optimal_sinr(&sc, &tx)?,
                });
                monte_carlo.push(if spec.analytic_only {
                    None
                } else {
                    Some(monte_carlo_sinr(&sc, &tx, spec.beamformer)?)
                });
            }
            Ok(ModeSeries { mode, reference, monte_carlo })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SinrCurve { snr_axis_db: spec.snr_db.clone(), series, beamformer: spec.beamformer, seed: base.seed })
}

/// MVDR weights trained on one set of target-free snapshots drawn from the
/// scenario's stream `run`; used for adaptive pattern plots.
pub fn trained_mvdr_weights(scenario: &Scenario, tx_weights: &[CVector], run: usize) -> Result<CVector> {
    scenario.validate()?;
    let cfg = &scenario.cfg;
    let part = &scenario.part;
    let sources = scenario
        .interference
        .sources()
        .into_iter()
        .map(|s| Ok((array::virtual_steering(tx_weights, cfg, part, s.angle)?.entries, s.power)))
        .collect::<Result<Vec<_>>>()?;
    let model = Model {
        u_s: target_steering(scenario, tx_weights)?,
        sources,
        scenario,
        gain: part.energy_scale().sqrt(),
    };
    let mut rng = run_rng(scenario.seed, run);
    let training: Vec<CVector> = (0..scenario.snapshot_count).map(|_| model.clutter(&mut rng)).collect();
    let cov = beamforming::sample_covariance(&training, scenario.diagonal_load)?;
    beamforming::mvdr_weights(&cov, &model.u_s)
}
