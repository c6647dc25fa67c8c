use nalgebra::DMatrix;

use super::williamson::williamson_matrix;
use super::{validate_cm, CovarianceMatrix, GaussianState, SymplecticMatrix, DEFAULT_TOL};
use crate::error::{NfgError, Result};
use crate::linalg::rotation;

/// Scalars of the two-mode standard form
/// `[[a,0,c,0],[0,a,0,d],[c,0,b,0],[0,d,0,b]]`, oriented so that `c ≥ |d|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardFormParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl StandardFormParams {
    /// Validates orientation and physicality; the full `Γ + iΔ ⪰ 0` test is authoritative.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = Self { a, b, c, d };
        if [a, b, c, d].iter().any(|x| !x.is_finite()) {
            return Err(NfgError::NonFinite("standard-form parameters"));
        }
        let tol = DEFAULT_TOL * a.max(b).max(c.abs()).max(1.0);
        if c < d.abs() - tol {
            return Err(NfgError::InvalidStandardForm(format!("orientation requires c ≥ |d|, got c={c}, d={d}")));
        }
        if a < 1.0 - tol || b < 1.0 - tol {
            return Err(NfgError::InvalidStandardForm(format!("a={a}, b={b} must be ≥ 1")));
        }
        let slack = a * b - 1.0 - c * c;
        if slack < -tol * a.max(b) {
            return Err(NfgError::InvalidStandardForm(format!("ab − 1 < c² (a={a}, b={b}, c={c})")));
        }
        let report = validate_cm(&p.to_cm(), DEFAULT_TOL);
        if !report.physical {
            return Err(NfgError::Unphysical { min_nu: report.min_symplectic_eigenvalue() });
        }
        Ok(p)
    }

    pub(crate) fn new_unchecked(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let Self { a, b, c, d } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[a, 0.0, c, 0.0, 0.0, a, 0.0, d, c, 0.0, b, 0.0, 0.0, d, 0.0, b],
        )
    }

    pub fn to_cm(&self) -> CovarianceMatrix {
        CovarianceMatrix::new(self.to_matrix()).expect("4x4 finite matrix")
    }

    /// The zero-mean (1+1)-mode state with this covariance matrix.
    pub fn to_state(&self) -> Result<GaussianState> {
        GaussianState::from_cm(self.to_cm(), 1, 1)
    }
}

/// Standard-form parameters and the local symplectics reaching them:
/// `(s_a ⊕ s_b) Γ (s_a ⊕ s_b)ᵀ = Γ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub params: StandardFormParams,
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
}

impl StandardForm {
    pub fn local(&self) -> SymplecticMatrix {
        self.s_a.direct_sum(&self.s_b)
    }
}

/// `M = R(φ) diag(σ₁, σ₂) R(ψ)` with proper rotations `R(t) = [[cos t, −sin t], [sin t, cos t]]`,
/// `σ₁ ≥ |σ₂|` and `sign σ₂ = sign det M`.
fn signed_svd(m: &DMatrix<f64>) -> (f64, f64, f64, f64) {
    let e = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let f = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let g = 0.5 * (m[(1, 0)] + m[(0, 1)]);
    let h = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let psi = 0.5 * (a2 - a1);
    let phi = 0.5 * (a2 + a1);
    (q + r, q - r, phi, psi)
}

/// Reduces a (1+1)-mode state to standard form with local symplectics.
///
/// Each local block is brought to `ν I₂` by its Williamson symplectic, then a
/// pair of local rotations diagonalises the coupling block.
pub fn standard_form(state: &GaussianState) -> Result<StandardForm> {
    if state.n_a() != 1 || state.n_b() != 1 {
        return Err(NfgError::Partition(format!(
            "standard form needs a (1+1)-mode state, got ({}+{})",
            state.n_a(),
            state.n_b()
        )));
    }
    let blocks = state.blocks();
    let wa = williamson_matrix(&blocks.a)?;
    let wb = williamson_matrix(&blocks.b)?;
    let coupling = wa.s.matrix() * &blocks.c * wb.s.matrix().transpose();
    let (c, d, phi, psi) = signed_svd(&coupling);

    // R(t) = S_{−t} in the phase-rotation convention used elsewhere
    let s_a = rotation(phi) * wa.s.matrix();
    let s_b = rotation(-psi) * wb.s.matrix();
    let params = StandardFormParams::new_unchecked(wa.nus[0], wb.nus[0], c, d);
    let report = validate_cm(&params.to_cm(), DEFAULT_TOL);
    if !report.physical {
        return Err(NfgError::Unphysical { min_nu: report.min_symplectic_eigenvalue() });
    }
    Ok(StandardForm {
        params,
        s_a: SymplecticMatrix::new_unchecked(s_a),
        s_b: SymplecticMatrix::new_unchecked(s_b),
    })
}
