//! Complex dense linear-algebra aliases and the few helpers the radar code
//! needs on top of nalgebra.

use nalgebra::{linalg::Cholesky, DMatrix, DVector, Dyn};

use crate::{Error, Result};

pub use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `x^H y`.
#[inline]
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.dotc(y)
}

/// Real part of the quadratic form `x^H A x`.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

/// Kronecker product of two column vectors, `x ⊗ y`, with `y` varying fastest.
pub fn kron(x: &CVector, y: &CVector) -> CVector {
    let mut out = CVector::zeros(x.len() * y.len());
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            out[i * y.len() + j] = xi * yj;
        }
    }
    out
}

/// Hermitian positive-definite factorization used for every `R^{-1} x`.
pub struct HermitianSolver {
    chol: Cholesky<Complex64, Dyn>,
}

impl HermitianSolver {
    pub fn new(matrix: &CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                what: "covariance rows vs columns",
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let chol = Cholesky::new(matrix.clone()).ok_or(Error::NotPositiveDefinite)?;
        // Negative pivots appear as non-real diagonal entries of L.
        let ok = chol.l_dirty().diagonal().iter().all(|d| d.re.is_finite() && d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
        if ok {
            Ok(Self { chol })
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, rhs: &CVector) -> Result<CVector> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                expected: self.dim(),
                got: rhs.len(),
            });
        }
        Ok(self.chol.solve(rhs))
    }
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest entrywise modulus of `A - A^H`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn to_cvector(values: impl IntoIterator<Item = Complex64>) -> CVector {
    CVector::from_vec(values.into_iter().collect())
}
