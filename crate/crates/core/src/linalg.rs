//! Small dense helpers shared by the state, overlap and correlation modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{NfgError, Result};

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Phase-space rotation `[[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn rotation(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
}

/// Block-diagonal rotation acting independently on each mode.
pub fn block_rotation(thetas: &[f64]) -> DMatrix<f64> {
    let n = thetas.len();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for (k, &t) in thetas.iter().enumerate() {
        out.view_mut((2 * k, 2 * k), (2, 2)).copy_from(&rotation(t));
    }
    out
}

/// Cholesky factor of a symmetric positive-definite matrix with its log-determinant.
pub(crate) struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    pub log_det: f64,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Ok(Self {
                chol: Cholesky::new(DMatrix::zeros(0, 0)).ok_or(NfgError::NotPositiveDefinite)?,
                log_det: 0.0,
            });
        }
        let chol = Cholesky::new(m.clone()).ok_or(NfgError::NotPositiveDefinite)?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return Err(NfgError::NotPositiveDefinite);
        }
        Ok(Self { chol, log_det })
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }
}

pub(crate) fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    SpdFactor::new(m).map(|f| f.log_det)
}

/// Square root and inverse square root of a symmetric positive-definite matrix.
pub(crate) fn spd_sqrt_pair(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(NfgError::NotPositiveDefinite);
    }
    let v = &eig.eigenvectors;
    let root = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| l.sqrt()));
    let sqrt = v * DMatrix::from_diagonal(&root) * v.transpose();
    let inv = v * DMatrix::from_diagonal(&root.map(|x| 1.0 / x)) * v.transpose();
    Ok((symmetrize(&sqrt), symmetrize(&inv)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_matches_direct() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        assert!((log_det_spd(&m).unwrap() - 11.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn sqrt_pair_inverts() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let (s, si) = spd_sqrt_pair(&m).unwrap();
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
        assert!(max_abs(&(&s * &si - DMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn indefinite_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(spd_sqrt_pair(&m).unwrap_err(), NfgError::NotPositiveDefinite);
        assert!(SpdFactor::new(&m).is_err());
    }
}
