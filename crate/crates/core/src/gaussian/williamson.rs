use nalgebra::{Complex, DMatrix};

use super::{omega, CovarianceMatrix, SymplecticMatrix};
use crate::error::{NfgError, Result};
use crate::linalg::{max_abs, spd_sqrt_pair, symmetrize};

/// Relative gap below which two symplectic eigenvalues count as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-8;

/// `S Γ Sᵀ = ⊕ νᵢ I₂` with `ν` sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    pub s: SymplecticMatrix,
    pub nus: Vec<f64>,
    pub degenerate: bool,
}

impl WilliamsonDecomposition {
    /// `⊕ νᵢ I₂`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let n = self.nus.len();
        let mut d = DMatrix::zeros(2 * n, 2 * n);
        for (k, nu) in self.nus.iter().enumerate() {
            d[(2 * k, 2 * k)] = *nu;
            d[(2 * k + 1, 2 * k + 1)] = *nu;
        }
        d
    }
}

struct Spectrum {
    nus: Vec<f64>,
    // orthogonal O with Oᵀ W O = ⊕ νₖ Δₖ, W = Γ^{1/2} Δ Γ^{1/2}
    frame: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
}

/// Eigen-decomposition of the Hermitian matrix `i Γ^{1/2} Δ Γ^{1/2}`.
///
/// Its eigenvalues are `±νₖ`. An eigenvector `x + iy` for `+ν` satisfies
/// `Wx = νy`, `Wy = −νx`, and the vectors `√2 y, √2 x` taken over all
/// positive eigenvalues form an orthonormal frame even when `ν` repeats.
fn spectrum(gamma: &DMatrix<f64>) -> Result<Spectrum> {
    let n = gamma.nrows() / 2;
    let (sqrt, inv_sqrt) = spd_sqrt_pair(gamma)?;
    let w = &sqrt * omega(n) * &sqrt;
    let h = w.map(|x| Complex::new(0.0, x));
    let eig = h.symmetric_eigen();

    let mut positive: Vec<usize> = (0..2 * n).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    positive.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    if positive.len() != n {
        return Err(NfgError::NotPositiveDefinite);
    }

    let mut frame = DMatrix::zeros(2 * n, 2 * n);
    let mut nus = Vec::with_capacity(n);
    let root2 = std::f64::consts::SQRT_2;
    for (k, &i) in positive.iter().enumerate() {
        nus.push(eig.eigenvalues[i]);
        let v = eig.eigenvectors.column(i);
        for r in 0..2 * n {
            frame[(r, 2 * k)] = root2 * v[r].im;
            frame[(r, 2 * k + 1)] = root2 * v[r].re;
        }
    }
    Ok(Spectrum { nus, frame, inv_sqrt })
}

pub(crate) fn symplectic_spectrum(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    spectrum(gamma).map(|s| s.nus)
}

fn is_degenerate(nus: &[f64]) -> bool {
    nus.windows(2).any(|w| (w[0] - w[1]).abs() <= DEGENERACY_RTOL * w[0].abs().max(1.0))
}

/// Mode permutation for a matrix that is already `⊕ νₖ I₂` in some order.
fn already_normal(gamma: &DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let n = gamma.nrows() / 2;
    let tol = 1e-14 * max_abs(gamma).max(1.0);
    let mut nus = Vec::with_capacity(n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i != j && gamma[(i, j)].abs() > tol {
                return None;
            }
        }
    }
    for k in 0..n {
        let (x, p) = (gamma[(2 * k, 2 * k)], gamma[(2 * k + 1, 2 * k + 1)]);
        if (x - p).abs() > tol || x <= 0.0 {
            return None;
        }
        nus.push(x);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| nus[j].total_cmp(&nus[i]));
    let mut perm = DMatrix::zeros(2 * n, 2 * n);
    for (new, &old) in order.iter().enumerate() {
        perm[(2 * new, 2 * old)] = 1.0;
        perm[(2 * new + 1, 2 * old + 1)] = 1.0;
    }
    Some((order.iter().map(|&k| nus[k]).collect(), perm))
}

/// Symplectic diagonalisation of a positive-definite covariance matrix.
///
/// With `O` the frame from [`spectrum`] and `D = ⊕ νₖ I₂`, the matrix
/// `S = D^{1/2} Oᵀ Γ^{-1/2}` is symplectic and `S Γ Sᵀ = D`.
pub fn williamson(cm: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    williamson_matrix(cm.matrix())
}

pub(crate) fn williamson_matrix(gamma: &DMatrix<f64>) -> Result<WilliamsonDecomposition> {
    let gamma = symmetrize(gamma);
    if let Some((nus, perm)) = already_normal(&gamma) {
        let degenerate = is_degenerate(&nus);
        return Ok(WilliamsonDecomposition { s: SymplecticMatrix::new_unchecked(perm), nus, degenerate });
    }
    let sp = spectrum(&gamma)?;
    let n = sp.nus.len();
    let mut s = sp.frame.transpose() * &sp.inv_sqrt;
    for k in 0..n {
        let root = sp.nus[k].sqrt();
        s.row_mut(2 * k).scale_mut(root);
        s.row_mut(2 * k + 1).scale_mut(root);
    }
    let degenerate = is_degenerate(&sp.nus);
    Ok(WilliamsonDecomposition { s: SymplecticMatrix::new_unchecked(s), nus: sp.nus, degenerate })
}
