use nalgebra::{DMatrix, DVector};

use super::{validate_cm, CovarianceMatrix, Displacement, GaussianState, DEFAULT_TOL};
use crate::error::{NfgError, Result};
use crate::linalg::{block_rotation, direct_sum, max_abs, rotation, symmetrize};

pub(crate) fn omega(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// The symplectic form `Δ = ⊕ [[0, 1], [-1, 0]]` on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(NfgError::ZeroModes);
    }
    Ok(SymplecticForm { n, matrix: omega(n) })
}

fn check_even_square(s: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = s.shape();
    if rows != cols {
        return Err(NfgError::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(NfgError::ZeroModes);
    }
    if rows % 2 != 0 {
        return Err(NfgError::OddDimension(rows));
    }
    Ok(rows / 2)
}

fn symplectic_defect(s: &DMatrix<f64>, n: usize) -> f64 {
    let w = omega(n);
    max_abs(&(s * &w * s.transpose() - w))
}

/// `max |SΔSᵀ − Δ| ≤ tol`.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let n = check_even_square(s)?;
    Ok(symplectic_defect(s, n) <= tol)
}

/// A real matrix in `Sp(2n, ℝ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    /// Accepts `s` when `SΔSᵀ = Δ` to within `tol · max(1, max|S|²)`.
    pub fn new(s: DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = check_even_square(&s)?;
        if s.iter().any(|x| !x.is_finite()) {
            return Err(NfgError::NonFinite("symplectic matrix"));
        }
        let defect = symplectic_defect(&s, n);
        let scale = max_abs(&s).max(1.0).powi(2);
        if defect > tol * scale {
            return Err(NfgError::NotSymplectic(defect));
        }
        Ok(Self(s))
    }

    pub(crate) fn new_unchecked(s: DMatrix<f64>) -> Self {
        Self(s)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    /// Phase rotation `S_θ = [[cos θ, sin θ], [-sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        Self(rotation(theta))
    }

    /// `⊕ S_θᵢ`, one rotation per mode.
    pub fn block_rotation(thetas: &[f64]) -> Self {
        Self(block_rotation(thetas))
    }

    /// Single-mode squeezer `diag(e^{-r}, e^{r})`; squeezes `x` for `r > 0`.
    pub fn squeeze(r: f64) -> Self {
        Self(DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]))
    }

    /// Two-mode beam splitter with transmissivity `cos² θ`.
    pub fn beam_splitter(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let i = DMatrix::<f64>::identity(2, 2);
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(&i * c));
        m.view_mut((0, 2), (2, 2)).copy_from(&(&i * s));
        m.view_mut((2, 0), (2, 2)).copy_from(&(&i * -s));
        m.view_mut((2, 2), (2, 2)).copy_from(&(&i * c));
        Self(m)
    }

    /// Two-mode squeezer; maps the vacuum to the two-mode squeezed vacuum.
    pub fn two_mode_squeeze(r: f64) -> Self {
        let (ch, sh) = (r.cosh(), r.sinh());
        let i = DMatrix::<f64>::identity(2, 2);
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(&i * ch));
        m.view_mut((0, 2), (2, 2)).copy_from(&(&z * sh));
        m.view_mut((2, 0), (2, 2)).copy_from(&(&z * sh));
        m.view_mut((2, 2), (2, 2)).copy_from(&(&i * ch));
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn compose(&self, then: &SymplecticMatrix) -> Self {
        Self(&then.0 * &self.0)
    }

    pub fn direct_sum(&self, other: &SymplecticMatrix) -> Self {
        Self(direct_sum(&self.0, &other.0))
    }

    /// `S⁻¹ = −Δ Sᵀ Δ`.
    pub fn inverse(&self) -> Self {
        let w = omega(self.n_modes());
        Self(-(&w * self.0.transpose() * &w))
    }
}

/// `U_{S,m}`: acts as `Γ → SΓSᵀ`, `d → Sd + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianUnitary {
    pub s: SymplecticMatrix,
    pub m: Displacement,
}

impl GaussianUnitary {
    pub fn new(s: SymplecticMatrix, m: Displacement) -> Result<Self> {
        if m.len() != s.matrix().nrows() {
            return Err(NfgError::DimensionMismatch { expected: s.matrix().nrows(), found: m.len() });
        }
        Ok(Self { s, m })
    }

    pub fn from_symplectic(s: SymplecticMatrix) -> Self {
        let dim = s.matrix().nrows();
        Self { s, m: Displacement::zeros(dim) }
    }

    pub fn displacement(m: Displacement) -> Self {
        let n = m.len() / 2;
        Self { s: SymplecticMatrix::identity(n), m }
    }
}

/// Which modes a local operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
    Global,
}

fn embed(state: &GaussianState, u: &GaussianUnitary, side: Side) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (n_a, n_b) = (state.n_a(), state.n_b());
    let width = match side {
        Side::A => n_a,
        Side::B => n_b,
        Side::Global => n_a + n_b,
    };
    let dim = u.s.matrix().nrows();
    if dim != 2 * width {
        return Err(NfgError::DimensionMismatch { expected: 2 * width, found: dim });
    }
    let (s, m) = match side {
        Side::Global => (u.s.matrix().clone(), u.m.vector().clone()),
        Side::A => {
            let s = direct_sum(u.s.matrix(), &DMatrix::identity(2 * n_b, 2 * n_b));
            let mut m = DVector::zeros(2 * (n_a + n_b));
            m.rows_mut(0, 2 * n_a).copy_from(u.m.vector());
            (s, m)
        }
        Side::B => {
            let s = direct_sum(&DMatrix::identity(2 * n_a, 2 * n_a), u.s.matrix());
            let mut m = DVector::zeros(2 * (n_a + n_b));
            m.rows_mut(2 * n_a, 2 * n_b).copy_from(u.m.vector());
            (s, m)
        }
    };
    Ok((s, m))
}

/// Applies `u` to the chosen side: `Γ → S̃ΓS̃ᵀ`, `d → m̃ + S̃d`.
pub fn apply_gaussian_unitary(
    state: &GaussianState,
    u: &GaussianUnitary,
    side: Side,
) -> Result<GaussianState> {
    let (s, m) = embed(state, u, side)?;
    let gamma = symmetrize(&(&s * state.cm().matrix() * s.transpose()));
    let mean = m + &s * state.mean().vector();
    let out = GaussianState::new_unvalidated(
        CovarianceMatrix::new(gamma)?,
        Displacement::new(mean)?,
        state.n_a(),
        state.n_b(),
    )?;
    let report = validate_cm(out.cm(), DEFAULT_TOL);
    if !report.physical {
        return Err(NfgError::Unphysical { min_nu: report.min_symplectic_eigenvalue() });
    }
    Ok(out)
}
