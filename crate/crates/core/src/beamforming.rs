//! Transmit and receive beamformer weights.

use crate::array::{self, ArrayConfig, Partition};
use crate::linalg::{hermitian_part, inner, CMatrix, CVector, Complex64, HermitianSolver};
use crate::{Error, Result};

/// Diagonal load applied to every sample covariance unless overridden.
pub const DEFAULT_DIAGONAL_LOAD: f64 = 10.0;

/// Training snapshots per covariance estimate unless overridden.
pub const DEFAULT_SNAPSHOT_COUNT: usize = 100;

/// Transmit weights (one unit-norm vector per subarray) plus the `K·N`
/// receive weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub tx: Vec<CVector>,
    pub rx: CVector,
}

impl WeightSet {
    /// Conventional transmit and receive weights steered to `theta_s`.
    pub fn conventional(cfg: &ArrayConfig, part: &Partition, theta_s: f64) -> Result<Self> {
        let tx = conventional_tx_weights(cfg, part, theta_s)?;
        let rx = conventional_rx_weights(cfg, part, &tx, theta_s)?;
        Ok(Self { tx, rx })
    }
}

/// `w_k = a_k(θ_s) / ‖a_k(θ_s)‖`.
pub fn conventional_tx_weights(cfg: &ArrayConfig, part: &Partition, theta_s: f64) -> Result<Vec<CVector>> {
    (0..part.k())
        .map(|k| {
            let a = array::subarray_steering(cfg, part, k, theta_s)?.entries;
            let norm = a.norm();
            Ok(a / Complex64::new(norm, 0.0))
        })
        .collect()
}

/// `w_d = u(θ_s)`.
pub fn conventional_rx_weights(
    cfg: &ArrayConfig,
    part: &Partition,
    tx_weights: &[CVector],
    theta_s: f64,
) -> Result<CVector> {
    Ok(array::virtual_steering(tx_weights, cfg, part, theta_s)?.entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub matrix: CMatrix,
    pub n_snapshots: usize,
    pub diagonal_load: f64,
}

impl CovarianceEstimate {
    /// Wrap a known (model) covariance.
    pub fn exact(matrix: CMatrix) -> Self {
        Self { matrix, n_snapshots: 0, diagonal_load: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `Σ_n y_n y_n^H + load · I`, unnormalized.
pub fn sample_covariance(snapshots: &[CVector], diagonal_load: f64) -> Result<CovarianceEstimate> {
    let first = snapshots.first().ok_or(Error::NoSnapshots)?;
    let dim = first.len();
    if let Some(bad) = snapshots.iter().find(|y| y.len() != dim) {
        return Err(Error::DimensionMismatch { what: "snapshot", expected: dim, got: bad.len() });
    }
    if !(diagonal_load.is_finite() && diagonal_load >= 0.0) {
        return Err(Error::InvalidScenario(format!("diagonal load must be >= 0, got {diagonal_load}")));
    }
    let mut data = CMatrix::zeros(dim, snapshots.len());
    for (n, y) in snapshots.iter().enumerate() {
        data.set_column(n, y);
    }
    let mut matrix = hermitian_part(&(&data * data.adjoint()));
    for i in 0..dim {
        matrix[(i, i)] += Complex64::new(diagonal_load, 0.0);
    }
    Ok(CovarianceEstimate { matrix, n_snapshots: snapshots.len(), diagonal_load })
}

/// `w_R = R^{-1} u_s / (u_s^H R^{-1} u_s)` via a Cholesky solve.
pub fn mvdr_weights(cov: &CovarianceEstimate, u_s: &CVector) -> Result<CVector> {
    let solver = HermitianSolver::new(&cov.matrix)?;
    let r_inv_u = solver.solve(u_s)?;
    let denom = inner(u_s, &r_inv_u);
    if denom.norm() == 0.0 || !denom.re.is_finite() {
        return Err(Error::ZeroResponse);
    }
    // u^H R^{-1} u is real for Hermitian R; keep the real part so w^H u = 1
    // holds to rounding rather than to the size of the imaginary residue.
    Ok(r_inv_u / Complex64::new(denom.re, 0.0))
}
