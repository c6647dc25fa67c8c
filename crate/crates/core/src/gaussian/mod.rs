//! Gaussian-state formalism at the covariance-matrix level.
//!
//! Covariance matrices are vacuum-normalised (the vacuum has `Γ = I`) and use
//! the mode ordering `(x₁, p₁, x₂, p₂, …)`. A bipartite state keeps the first
//! `n_a` modes on subsystem A and the remaining `n_b` on subsystem B.

mod standard_form;
mod symplectic;
mod williamson;

use nalgebra::{DMatrix, DVector};

use crate::error::{NfgError, Result};
use crate::linalg::{asymmetry, direct_sum, max_abs, symmetrize};

pub use standard_form::{standard_form, StandardForm, StandardFormParams};
pub use symplectic::{
    apply_gaussian_unitary, is_symplectic, symplectic_form, GaussianUnitary, Side, SymplecticForm,
    SymplecticMatrix,
};
pub use williamson::{williamson, WilliamsonDecomposition};

pub(crate) use symplectic::omega;

/// Default slack for symmetry and symplectic-eigenvalue checks, relative to
/// `max(1, max|Γ|)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Real symmetric `2n × 2n` matrix of symmetrised second moments.
///
/// Construction only checks shape and finiteness so that unphysical matrices
/// can still be diagnosed with [`validate_cm`]. [`GaussianState`] enforces
/// physicality.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(NfgError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(NfgError::ZeroModes);
        }
        if rows % 2 != 0 {
            return Err(NfgError::OddDimension(rows));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(NfgError::NonFinite("covariance matrix"));
        }
        Ok(Self(matrix))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(NfgError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(n_modes: usize) -> Result<Self> {
        Self::new(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    /// `(2 n̄ + 1) I` for `n_modes` independent thermal modes.
    pub fn thermal(n_bar: f64, n_modes: usize) -> Result<Self> {
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(NfgError::OutOfRange(format!("mean photon number {n_bar}")));
        }
        Self::new(DMatrix::identity(2 * n_modes, 2 * n_modes) * (2.0 * n_bar + 1.0))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    /// Reference magnitude used to scale tolerances.
    pub fn scale(&self) -> f64 {
        max_abs(&self.0).max(1.0)
    }

    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        CovarianceMatrix(direct_sum(&self.0, &other.0))
    }

    /// Reorders modes so that new mode `k` is old mode `perm[k]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<CovarianceMatrix> {
        let n = self.n_modes();
        check_permutation(perm, n)?;
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                out.view_mut((2 * i, 2 * j), (2, 2))
                    .copy_from(&self.0.view((2 * pi, 2 * pj), (2, 2)));
            }
        }
        Ok(CovarianceMatrix(out))
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(NfgError::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(NfgError::Partition(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// First moments `⟨R_k⟩` of the quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement(DVector<f64>);

impl Displacement {
    pub fn new(vector: DVector<f64>) -> Result<Self> {
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(NfgError::NonFinite("displacement"));
        }
        Ok(Self(vector))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of [`validate_cm`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub asymmetry: f64,
    pub positive_definite: bool,
    /// Sorted descending. For positive-definite input these are the Williamson
    /// spectrum; otherwise the moduli of the eigenvalues of `iΔΓ`.
    pub symplectic_eigenvalues: Vec<f64>,
    pub physical: bool,
}

impl ValidationReport {
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Checks `Γ = Γᵀ` and `Γ + iΔ ⪰ 0` (all symplectic eigenvalues ≥ 1).
///
/// `tol` is relative to `max(1, max|Γ|)`.
pub fn validate_cm(cm: &CovarianceMatrix, tol: f64) -> ValidationReport {
    let scale = cm.scale();
    let asym = asymmetry(cm.matrix());
    let sym = symmetrize(cm.matrix());
    let (positive_definite, nus) = match williamson::symplectic_spectrum(&sym) {
        Ok(nus) => (true, nus),
        Err(_) => (false, spectrum_of_indefinite(&sym)),
    };
    let symmetric = asym <= tol * scale;
    let min_nu = nus.iter().copied().fold(f64::INFINITY, f64::min);
    let physical = symmetric && positive_definite && min_nu >= 1.0 - tol * scale;
    ValidationReport {
        symmetric,
        asymmetry: asym,
        positive_definite,
        symplectic_eigenvalues: nus,
        physical,
    }
}

fn spectrum_of_indefinite(sym: &DMatrix<f64>) -> Vec<f64> {
    let n = sym.nrows() / 2;
    let m = omega(n) * sym;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    // eigenvalues of ΔΓ come in ± pairs; keep one of each
    moduli.into_iter().step_by(2).collect()
}

/// Covariance-matrix blocks `Γ = [[A, C], [Cᵀ, B]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

/// A bipartite Gaussian state on `n_a + n_b` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cm: CovarianceMatrix,
    mean: Displacement,
    n_a: usize,
    n_b: usize,
}

impl GaussianState {
    /// Builds a state, rejecting inconsistent partitions and unphysical CMs.
    pub fn new(cm: CovarianceMatrix, mean: Displacement, n_a: usize, n_b: usize) -> Result<Self> {
        let state = Self::new_unvalidated(cm, mean, n_a, n_b)?;
        let report = validate_cm(&state.cm, DEFAULT_TOL);
        if !report.symmetric {
            return Err(NfgError::NotSymmetric(report.asymmetry));
        }
        if !report.physical {
            return Err(NfgError::Unphysical { min_nu: report.min_symplectic_eigenvalue() });
        }
        Ok(state)
    }

    pub fn from_cm(cm: CovarianceMatrix, n_a: usize, n_b: usize) -> Result<Self> {
        let dim = cm.dim();
        Self::new(cm, Displacement::zeros(dim), n_a, n_b)
    }

    pub(crate) fn new_unvalidated(
        cm: CovarianceMatrix,
        mean: Displacement,
        n_a: usize,
        n_b: usize,
    ) -> Result<Self> {
        if cm.dim() != 2 * (n_a + n_b) {
            return Err(NfgError::Partition(format!(
                "{n_a}+{n_b} modes do not match a {0}x{0} covariance matrix",
                cm.dim()
            )));
        }
        if mean.len() != cm.dim() {
            return Err(NfgError::DimensionMismatch { expected: cm.dim(), found: mean.len() });
        }
        Ok(Self { cm, mean, n_a, n_b })
    }

    /// `n` independent modes in the vacuum, all on subsystem A except the last `n_b`.
    pub fn vacuum(n_a: usize, n_b: usize) -> Result<Self> {
        Self::from_cm(CovarianceMatrix::identity(n_a + n_b)?, n_a, n_b)
    }

    pub fn cm(&self) -> &CovarianceMatrix {
        &self.cm
    }

    pub fn mean(&self) -> &Displacement {
        &self.mean
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn n_modes(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn blocks(&self) -> Blocks {
        blocks(self)
    }

    /// Same covariance matrix with a different mean.
    pub fn with_mean(&self, mean: Displacement) -> Result<Self> {
        Self::new_unvalidated(self.cm.clone(), mean, self.n_a, self.n_b)
    }

    /// Same covariance matrix, mean shifted by `shift`.
    pub fn displaced(&self, shift: &Displacement) -> Result<Self> {
        if shift.len() != self.mean.len() {
            return Err(NfgError::DimensionMismatch { expected: self.mean.len(), found: shift.len() });
        }
        self.with_mean(Displacement(self.mean.vector() + shift.vector()))
    }

    /// Tensor product with all of `self` on A and all of `other` on B.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        GaussianState {
            cm: self.cm.direct_sum(&other.cm),
            mean: Displacement(concat(self.mean.vector(), other.mean.vector())),
            n_a: self.n_modes(),
            n_b: other.n_modes(),
        }
    }

    /// Appends an uncorrelated ancilla to subsystem B (partition A : BC).
    pub fn append_to_b(&self, ancilla: &GaussianState) -> GaussianState {
        GaussianState {
            n_a: self.n_a,
            n_b: self.n_b + ancilla.n_modes(),
            ..self.tensor(ancilla)
        }
    }

    /// Reorders modes (see [`CovarianceMatrix::permute_modes`]) and assigns a new partition.
    pub fn permute_modes(&self, perm: &[usize], n_a: usize, n_b: usize) -> Result<Self> {
        let cm = self.cm.permute_modes(perm)?;
        let old = self.mean.vector();
        let mean = DVector::from_iterator(
            old.len(),
            perm.iter().flat_map(|&p| [old[2 * p], old[2 * p + 1]]),
        );
        Self::new_unvalidated(cm, Displacement(mean), n_a, n_b)
    }

    pub fn purity(&self) -> f64 {
        crate::overlap::purity(self)
    }
}

fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Splits the covariance matrix along the A|B partition.
pub fn blocks(state: &GaussianState) -> Blocks {
    let da = 2 * state.n_a;
    let db = 2 * state.n_b;
    let g = state.cm.matrix();
    Blocks {
        a: g.view((0, 0), (da, da)).into_owned(),
        b: g.view((da, da), (db, db)).into_owned(),
        c: g.view((0, da), (da, db)).into_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_physical_with_unit_spectrum() {
        let report = validate_cm(&CovarianceMatrix::identity(3).unwrap(), DEFAULT_TOL);
        assert!(report.physical);
        for nu in &report.symplectic_eigenvalues {
            assert!((nu - 1.0).abs() < 1e-12);
        }
        assert_eq!(report.symplectic_eigenvalues.len(), 3);
    }

    #[test]
    fn half_identity_is_unphysical() {
        let cm = CovarianceMatrix::new(DMatrix::identity(2, 2) * 0.5).unwrap();
        let report = validate_cm(&cm, DEFAULT_TOL);
        assert!(!report.physical);
        assert!(report.positive_definite);
        assert!((report.symplectic_eigenvalues[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_ssts_has_unit_spectrum() {
        let c = 2.0 * 2.0_f64.sqrt();
        let cm = CovarianceMatrix::from_row_slice(
            4,
            &[3.0, 0.0, c, 0.0, 0.0, 3.0, 0.0, -c, c, 0.0, 3.0, 0.0, 0.0, -c, 0.0, 3.0],
        )
        .unwrap();
        let report = validate_cm(&cm, DEFAULT_TOL);
        assert!(report.physical);
        for nu in &report.symplectic_eigenvalues {
            assert!((nu - 1.0).abs() < 1e-9, "{nu}");
        }
    }

    #[test]
    fn indefinite_matrix_reports_spectrum() {
        let cm = CovarianceMatrix::from_row_slice(2, &[1.0, 0.0, 0.0, -4.0]).unwrap();
        let report = validate_cm(&cm, DEFAULT_TOL);
        assert!(!report.positive_definite);
        assert!(!report.physical);
        assert!((report.symplectic_eigenvalues[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_matrix_flagged() {
        let cm = CovarianceMatrix::from_row_slice(2, &[2.0, 0.1, 0.0, 2.0]).unwrap();
        let report = validate_cm(&cm, DEFAULT_TOL);
        assert!(!report.symmetric);
        assert!(!report.physical);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            CovarianceMatrix::new(DMatrix::identity(3, 3)).unwrap_err(),
            NfgError::OddDimension(3)
        );
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(CovarianceMatrix::new(m), Err(NfgError::NonFinite(_))));
        assert!(matches!(
            CovarianceMatrix::new(DMatrix::zeros(2, 4)),
            Err(NfgError::NotSquare { .. })
        ));
        let cm = CovarianceMatrix::identity(2).unwrap();
        assert!(matches!(GaussianState::from_cm(cm.clone(), 1, 2), Err(NfgError::Partition(_))));
        let half = CovarianceMatrix::new(DMatrix::identity(2, 2) * 0.5).unwrap();
        assert!(matches!(GaussianState::from_cm(half, 1, 0), Err(NfgError::Unphysical { .. })));
    }

    #[test]
    fn blocks_of_product_state_have_zero_coupling() {
        let a = CovarianceMatrix::thermal(1.0, 1).unwrap();
        let b = CovarianceMatrix::from_row_slice(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let state = GaussianState::from_cm(a.direct_sum(&b), 1, 1).unwrap();
        let bl = state.blocks();
        assert_eq!(bl.c, DMatrix::zeros(2, 2));
        assert_eq!(&bl.a, a.matrix());
        assert_eq!(&bl.b, b.matrix());
    }

    #[test]
    fn blocks_of_standard_form() {
        let p = StandardFormParams::new(2.0, 3.0, 1.0, -0.5).unwrap();
        let bl = p.to_state().unwrap().blocks();
        assert_eq!(bl.a, DMatrix::identity(2, 2) * 2.0);
        assert_eq!(bl.b, DMatrix::identity(2, 2) * 3.0);
        assert_eq!(bl.c, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]));
    }

    #[test]
    fn permute_modes_moves_blocks() {
        let cm = CovarianceMatrix::thermal(0.0, 1)
            .unwrap()
            .direct_sum(&CovarianceMatrix::thermal(2.0, 1).unwrap());
        let p = cm.permute_modes(&[1, 0]).unwrap();
        assert_eq!(p.matrix()[(0, 0)], 5.0);
        assert_eq!(p.matrix()[(2, 2)], 1.0);
        assert!(cm.permute_modes(&[0, 0]).is_err());
    }

    #[test]
    fn append_to_b_keeps_a_partition() {
        let ab = StandardFormParams::new(2.0, 2.0, 1.0, -1.0).unwrap().to_state().unwrap();
        let c = GaussianState::from_cm(CovarianceMatrix::thermal(1.0, 1).unwrap(), 1, 0).unwrap();
        let abc = ab.append_to_b(&c);
        assert_eq!((abc.n_a(), abc.n_b()), (1, 2));
        assert_eq!(abc.cm().dim(), 6);
    }
}
