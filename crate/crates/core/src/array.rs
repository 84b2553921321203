//! Array geometry, subarray partitions and steering vectors.
//!
//! All arrays are uniform linear arrays with element 0 as the phase
//! reference; the element `m` response toward `θ` is `exp(-j2π m d sinθ)`
//! with `d` in wavelengths.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use crate::linalg::{inner, kron, to_cvector, CVector, Complex64};
use crate::{Error, Result};

/// Slack on the `|θ| <= π/2` check so that grids built from degrees can hit
/// the endfire directions exactly.
const ANGLE_SLACK: f64 = 1e-12;

/// Transmit/receive ULA geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    m_tx: usize,
    n_rx: usize,
    d_tx: f64,
    d_rx: f64,
}

impl ArrayConfig {
    pub fn new(m_tx: usize, n_rx: usize, d_tx: f64, d_rx: f64) -> Result<Self> {
        if m_tx == 0 {
            return Err(Error::InvalidConfig("m_tx must be at least 1".into()));
        }
        if n_rx == 0 {
            return Err(Error::InvalidConfig("n_rx must be at least 1".into()));
        }
        if !(d_tx.is_finite() && d_tx > 0.0) {
            return Err(Error::InvalidConfig(format!("d_tx must be positive, got {d_tx}")));
        }
        if !(d_rx.is_finite() && d_rx > 0.0) {
            return Err(Error::InvalidConfig(format!("d_rx must be positive, got {d_rx}")));
        }
        Ok(Self { m_tx, n_rx, d_tx, d_rx })
    }

    /// Number of transmit antennas `M`.
    pub fn m_tx(&self) -> usize {
        self.m_tx
    }

    /// Number of receive antennas `N`.
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Transmit element spacing in wavelengths.
    pub fn d_tx(&self) -> f64 {
        self.d_tx
    }

    /// Receive element spacing in wavelengths.
    pub fn d_rx(&self) -> f64 {
        self.d_rx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionScheme {
    /// Subarray `k` spans elements `k ..= k + M - K`.
    FullyOverlapped,
    /// `K` disjoint blocks of `M / K` elements.
    NonOverlapped,
    /// Every subarray is the whole array.
    WholeArray,
}

impl PartitionScheme {
    pub fn name(self) -> &'static str {
        match self {
            PartitionScheme::FullyOverlapped => "fully-overlapped",
            PartitionScheme::NonOverlapped => "non-overlapped",
            PartitionScheme::WholeArray => "whole-array",
        }
    }
}

/// A split of the `M` transmit elements into `K` contiguous subarrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    scheme: PartitionScheme,
    m_tx: usize,
    subarrays: Vec<Range<usize>>,
}

impl Partition {
    pub fn new(scheme: PartitionScheme, m_tx: usize, k_subarrays: usize) -> Result<Self> {
        if m_tx == 0 {
            return Err(Error::InvalidPartition("array has no elements".into()));
        }
        if k_subarrays == 0 || k_subarrays > m_tx {
            return Err(Error::InvalidPartition(format!(
                "need 1 <= K <= M, got K = {k_subarrays}, M = {m_tx}"
            )));
        }
        let k = k_subarrays;
        let subarrays = match scheme {
            PartitionScheme::FullyOverlapped => (0..k).map(|i| i..i + m_tx - k + 1).collect(),
            PartitionScheme::NonOverlapped => {
                if m_tx % k != 0 {
                    return Err(Error::InvalidPartition(format!(
                        "non-overlapped partition needs K to divide M, got K = {k}, M = {m_tx}"
                    )));
                }
                let size = m_tx / k;
                (0..k).map(|i| i * size..(i + 1) * size).collect()
            }
            PartitionScheme::WholeArray => vec![0..m_tx; k],
        };
        Ok(Self { scheme, m_tx, subarrays })
    }

    pub fn fully_overlapped(m_tx: usize, k_subarrays: usize) -> Result<Self> {
        Self::new(PartitionScheme::FullyOverlapped, m_tx, k_subarrays)
    }

    /// `K = 1`: one waveform, whole-aperture transmit beam.
    pub fn phased_array(m_tx: usize) -> Result<Self> {
        Self::fully_overlapped(m_tx, 1)
    }

    /// `K = M`: one waveform per element, no transmit beamforming.
    pub fn mimo(m_tx: usize) -> Result<Self> {
        Self::fully_overlapped(m_tx, m_tx)
    }

    pub fn scheme(&self) -> PartitionScheme {
        self.scheme
    }

    pub fn m_tx(&self) -> usize {
        self.m_tx
    }

    /// Number of subarrays `K`.
    pub fn k(&self) -> usize {
        self.subarrays.len()
    }

    pub fn subarrays(&self) -> &[Range<usize>] {
        &self.subarrays
    }

    pub fn subarray(&self, k: usize) -> Result<Range<usize>> {
        self.subarrays
            .get(k)
            .cloned()
            .ok_or(Error::SubarrayIndex { index: k, count: self.k() })
    }

    /// Elements per subarray; all three schemes use equal sizes.
    pub fn subarray_len(&self) -> usize {
        self.subarrays[0].len()
    }

    /// `M / K`, the per-waveform energy of the transmit model.
    pub fn energy_scale(&self) -> f64 {
        self.m_tx as f64 / self.k() as f64
    }

    fn check_against(&self, cfg: &ArrayConfig) -> Result<()> {
        if self.m_tx != cfg.m_tx {
            return Err(Error::InvalidPartition(format!(
                "partition built for M = {} used with M = {}",
                self.m_tx, cfg.m_tx
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringKind {
    Transmit,
    Receive,
    Subarray(usize),
    Diversity,
    TransmitCoherent,
    Virtual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: CVector,
    pub angle: f64,
    pub kind: SteeringKind,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.norm_squared()
    }
}

pub fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() <= FRAC_PI_2 + ANGLE_SLACK {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta))
    }
}

/// `exp(-j2π m d sinθ)` for `m` in `elements`.
fn ula_response(elements: Range<usize>, spacing: f64, theta: f64) -> CVector {
    let k = -2.0 * PI * spacing * theta.sin();
    to_cvector(elements.map(|m| Complex64::from_polar(1.0, k * m as f64)))
}

/// Full transmit steering vector `a(θ)`.
pub fn tx_steering(cfg: &ArrayConfig, theta: f64) -> Result<SteeringVector> {
    check_angle(theta)?;
    Ok(SteeringVector {
        entries: ula_response(0..cfg.m_tx, cfg.d_tx, theta),
        angle: theta,
        kind: SteeringKind::Transmit,
    })
}

/// Receive steering vector `b(θ)`.
pub fn rx_steering(cfg: &ArrayConfig, theta: f64) -> Result<SteeringVector> {
    check_angle(theta)?;
    Ok(SteeringVector {
        entries: ula_response(0..cfg.n_rx, cfg.d_rx, theta),
        angle: theta,
        kind: SteeringKind::Receive,
    })
}

/// Steering vector of subarray `k`, referenced to its own first element.
///
/// The inter-subarray phase lives in [`diversity_vector`], so on a ULA every
/// subarray of a partition returns the same vector.
pub fn subarray_steering(
    cfg: &ArrayConfig,
    part: &Partition,
    k: usize,
    theta: f64,
) -> Result<SteeringVector> {
    part.check_against(cfg)?;
    check_angle(theta)?;
    let range = part.subarray(k)?;
    Ok(SteeringVector {
        entries: ula_response(0..range.len(), cfg.d_tx, theta),
        angle: theta,
        kind: SteeringKind::Subarray(k),
    })
}

/// Waveform diversity vector `d(θ)`: the transmit phase of each subarray's
/// first element.
pub fn diversity_vector(cfg: &ArrayConfig, part: &Partition, theta: f64) -> Result<SteeringVector> {
    part.check_against(cfg)?;
    check_angle(theta)?;
    let phase = -2.0 * PI * cfg.d_tx * theta.sin();
    let entries = to_cvector(
        part.subarrays()
            .iter()
            .map(|r| Complex64::from_polar(1.0, phase * r.start as f64)),
    );
    Ok(SteeringVector { entries, angle: theta, kind: SteeringKind::Diversity })
}

fn check_weights(weights: &[CVector], part: &Partition) -> Result<()> {
    if weights.len() != part.k() {
        return Err(Error::DimensionMismatch {
            what: "number of subarray weight vectors",
            expected: part.k(),
            got: weights.len(),
        });
    }
    for (w, range) in weights.iter().zip(part.subarrays()) {
        if w.len() != range.len() {
            return Err(Error::DimensionMismatch {
                what: "subarray weight vector",
                expected: range.len(),
                got: w.len(),
            });
        }
    }
    Ok(())
}

/// Transmit coherent processing vector `c(θ)`, entry `k = w_k^H a_k(θ)`.
pub fn coherent_vector(
    weights: &[CVector],
    cfg: &ArrayConfig,
    part: &Partition,
    theta: f64,
) -> Result<SteeringVector> {
    part.check_against(cfg)?;
    check_weights(weights, part)?;
    check_angle(theta)?;
    // Subarray steering only depends on subarray length, so build it once.
    let a_sub = ula_response(0..part.subarray_len(), cfg.d_tx, theta);
    let entries = to_cvector(weights.iter().map(|w| inner(w, &a_sub)));
    Ok(SteeringVector { entries, angle: theta, kind: SteeringKind::TransmitCoherent })
}

/// Virtual steering vector `u(θ) = (c(θ) ⊙ d(θ)) ⊗ b(θ)`, length `K·N`.
pub fn virtual_steering(
    weights: &[CVector],
    cfg: &ArrayConfig,
    part: &Partition,
    theta: f64,
) -> Result<SteeringVector> {
    let c = coherent_vector(weights, cfg, part, theta)?;
    let d = diversity_vector(cfg, part, theta)?;
    let b = rx_steering(cfg, theta)?;
    let cd = c.entries.component_mul(&d.entries);
    Ok(SteeringVector { entries: kron(&cd, &b.entries), angle: theta, kind: SteeringKind::Virtual })
}

/// Plain MIMO virtual steering `v(θ) = a(θ) ⊗ b(θ)`, length `M·N`.
pub fn mimo_virtual_steering(cfg: &ArrayConfig, theta: f64) -> Result<SteeringVector> {
    let a = tx_steering(cfg, theta)?;
    let b = rx_steering(cfg, theta)?;
    Ok(SteeringVector {
        entries: kron(&a.entries, &b.entries),
        angle: theta,
        kind: SteeringKind::Virtual,
    })
}
