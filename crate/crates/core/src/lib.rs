//! Phased-MIMO radar simulation and analysis.
//!
//! The transmit array of a colocated MIMO radar is split into `K` subarrays.
//! Each subarray beamforms coherently toward the target and radiates one of
//! `K` mutually orthogonal waveforms, so the receiver sees a `K·N` element
//! virtual array. `K = 1` is the classical phased array and `K = M` (with
//! single-element subarrays) is the usual MIMO radar.
//!
//! Modules, bottom-up:
//!
//! * [`array`]: ULA geometry, subarray partitions and every composite steering
//!   vector (transmit, receive, subarray, diversity, coherent, virtual).
//! * [`waveform`]: discrete orthonormal waveform bank, transmit synthesis and
//!   matched filtering into virtual snapshots.
//! * [`beamforming`]: conventional and MVDR weights, sample covariance.
//! * [`beampattern`]: normalized patterns, their `C·D·R` factorization,
//!   sidelobe search and the sinc-product sidelobe bounds.
//! * [`sinr`]: analytic, optimal and Monte-Carlo output SINR.
//!
//! Angles are radians everywhere in this crate; powers are linear.

pub mod array;
pub mod beamforming;
pub mod beampattern;
mod error;
pub mod linalg;
pub mod sinr;
pub mod waveform;

pub use array::{ArrayConfig, Partition, PartitionScheme, SteeringKind, SteeringVector};
pub use beamforming::{CovarianceEstimate, WeightSet};
pub use beampattern::{AngleGrid, BeampatternCurve, PatternKind, SidelobeReport};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Complex64};
pub use sinr::{Beamformer, Interference, PointSource, RadarMode, Scenario, SinrCurve};
pub use waveform::{TransmitSignalSet, VirtualSnapshot, WaveformBank};
