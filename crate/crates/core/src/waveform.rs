//! Orthonormal waveform bank, transmit signal synthesis and matched filtering.
//!
//! Time is discretized into `L` samples per pulse with the pulse length
//! normalized to one. Waveform `k` (0-based row) is the complex tone at
//! frequency `k + 1` cycles per pulse, scaled by `1/√L` so that the discrete
//! Gram matrix is exactly the identity.

use std::f64::consts::PI;

use crate::array::{self, check_angle, ArrayConfig, Partition};
use crate::linalg::{CMatrix, CVector, Complex64};
use crate::{Error, Result};

pub const DEFAULT_SAMPLES_PER_PULSE: usize = 256;

/// Tolerance on `‖w_k‖ = 1` for transmit weights.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Matched-filter output: the `K·N` virtual data vector, waveform-major.
pub type VirtualSnapshot = CVector;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformBank {
    table: CMatrix,
}

impl WaveformBank {
    /// `K` tones over `L` samples.
    pub fn new(k_waveforms: usize, samples_per_pulse: usize) -> Result<Self> {
        if k_waveforms == 0 || k_waveforms > samples_per_pulse {
            return Err(Error::InvalidBank { k: k_waveforms, l: samples_per_pulse });
        }
        let l = samples_per_pulse;
        let scale = 1.0 / (l as f64).sqrt();
        let table = CMatrix::from_fn(k_waveforms, l, |row, sample| {
            // Reduce the phase index mod L before scaling to keep the angle small.
            let idx = ((row + 1) * sample) % l;
            Complex64::from_polar(scale, 2.0 * PI * idx as f64 / l as f64)
        });
        Ok(Self { table })
    }

    pub fn k(&self) -> usize {
        self.table.nrows()
    }

    pub fn samples_per_pulse(&self) -> usize {
        self.table.ncols()
    }

    /// `K × L` table, row `k` is waveform `k`.
    pub fn table(&self) -> &CMatrix {
        &self.table
    }

    /// Discrete Gram matrix `Σ_l φ_k[l] φ_k'[l]^*`.
    pub fn gram(&self) -> CMatrix {
        &self.table * self.table.adjoint()
    }
}

/// Per-antenna transmit signals for one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitSignalSet {
    /// `M × L`, row `m` is the signal radiated by antenna `m`.
    pub samples: CMatrix,
    /// `M × K`, column `k` holds `w_k` on the rows of subarray `k`.
    pub weight_matrix: CMatrix,
    energy_scale: f64,
}

impl TransmitSignalSet {
    pub fn m_antennas(&self) -> usize {
        self.samples.nrows()
    }

    pub fn antenna_energies(&self) -> Vec<f64> {
        self.samples.row_iter().map(|r| r.norm_squared()).collect()
    }

    pub fn total_energy(&self) -> f64 {
        self.samples.norm_squared()
    }

    /// Energy of each subarray's signal `s_k = √(M/K) φ_k w_k^*`.
    pub fn subarray_energies(&self, bank: &WaveformBank) -> Vec<f64> {
        (0..self.weight_matrix.ncols())
            .map(|k| {
                self.energy_scale
                    * self.weight_matrix.column(k).norm_squared()
                    * bank.table().row(k).norm_squared()
            })
            .collect()
    }
}

/// Scatter the per-subarray weights into the `M × K` matrix `W`.
pub fn weight_matrix(weights: &[CVector], cfg: &ArrayConfig, part: &Partition) -> Result<CMatrix> {
    check_weights(weights, cfg, part)?;
    let mut w = CMatrix::zeros(cfg.m_tx(), part.k());
    for (k, (wk, range)) in weights.iter().zip(part.subarrays()).enumerate() {
        for (j, m) in range.clone().enumerate() {
            w[(m, k)] = wk[j];
        }
    }
    Ok(w)
}

fn check_weights(weights: &[CVector], cfg: &ArrayConfig, part: &Partition) -> Result<()> {
    if part.m_tx() != cfg.m_tx() {
        return Err(Error::InvalidPartition(format!(
            "partition built for M = {} used with M = {}",
            part.m_tx(),
            cfg.m_tx()
        )));
    }
    if weights.len() != part.k() {
        return Err(Error::DimensionMismatch {
            what: "number of subarray weight vectors",
            expected: part.k(),
            got: weights.len(),
        });
    }
    for (index, (w, range)) in weights.iter().zip(part.subarrays()).enumerate() {
        if w.len() != range.len() {
            return Err(Error::DimensionMismatch {
                what: "subarray weight vector",
                expected: range.len(),
                got: w.len(),
            });
        }
        let norm = w.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { index, norm });
        }
    }
    Ok(())
}

/// `ψ = √(M/K) · W^* · Φ`.
pub fn synthesize_tx(
    bank: &WaveformBank,
    weights: &[CVector],
    cfg: &ArrayConfig,
    part: &Partition,
) -> Result<TransmitSignalSet> {
    if bank.k() != part.k() {
        return Err(Error::DimensionMismatch {
            what: "waveform bank size",
            expected: part.k(),
            got: bank.k(),
        });
    }
    let w = weight_matrix(weights, cfg, part)?;
    let scale = Complex64::new(part.energy_scale().sqrt(), 0.0);
    let samples = w.map(|z| z.conj()) * bank.table() * scale;
    Ok(TransmitSignalSet { samples, weight_matrix: w, energy_scale: part.energy_scale() })
}

/// Transmitted power toward `θ`: `(M/K) σ² ‖W^H a(θ)‖²`.
pub fn transmit_power(
    weights: &[CVector],
    cfg: &ArrayConfig,
    part: &Partition,
    theta: f64,
    sigma2: f64,
) -> Result<f64> {
    let w = weight_matrix(weights, cfg, part)?;
    let a = array::tx_steering(cfg, theta)?.entries;
    Ok(part.energy_scale() * sigma2 * (w.adjoint() * a).norm_squared())
}

/// Noise-free received pulse `x(t) = Σ β (a^T(θ) ψ(t)) b(θ)` for a set of
/// point reflectors given as `(θ, β)`. Returns an `N × L` matrix.
pub fn receive_pulse(
    tx: &TransmitSignalSet,
    cfg: &ArrayConfig,
    reflectors: &[(f64, Complex64)],
) -> Result<CMatrix> {
    if tx.m_antennas() != cfg.m_tx() {
        return Err(Error::DimensionMismatch {
            what: "transmit signal rows",
            expected: cfg.m_tx(),
            got: tx.m_antennas(),
        });
    }
    let mut x = CMatrix::zeros(cfg.n_rx(), tx.samples.ncols());
    for &(theta, beta) in reflectors {
        check_angle(theta)?;
        let a = array::tx_steering(cfg, theta)?.entries;
        let b = array::rx_steering(cfg, theta)?.entries;
        // a^T ψ, a 1 × L row
        let echo = a.transpose() * &tx.samples * beta;
        x += b * echo;
    }
    Ok(x)
}

/// Correlate each receive channel against every waveform and stack the
/// results waveform-major: block `k` holds the `N` outputs for waveform `k`.
pub fn matched_filter(rx_pulse: &CMatrix, bank: &WaveformBank) -> Result<VirtualSnapshot> {
    if rx_pulse.ncols() != bank.samples_per_pulse() {
        return Err(Error::DimensionMismatch {
            what: "received pulse samples",
            expected: bank.samples_per_pulse(),
            got: rx_pulse.ncols(),
        });
    }
    // N × K: column k = Σ_l x[:, l] φ_k[l]^*
    let blocks = rx_pulse * bank.table().adjoint();
    let n = rx_pulse.nrows();
    let mut y = CVector::zeros(n * bank.k());
    for k in 0..bank.k() {
        y.rows_mut(k * n, n).copy_from(&blocks.column(k));
    }
    Ok(y)
}
