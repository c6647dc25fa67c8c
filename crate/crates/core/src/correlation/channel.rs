use nalgebra::{Complex, DMatrix};

use super::{closed_form_value, nfg_two_mode, Method, NfgResult};
use crate::error::{NfgError, Result};
use crate::gaussian::{
    omega, standard_form, validate_cm, CovarianceMatrix, Displacement, GaussianState, StandardFormParams,
    DEFAULT_TOL,
};
use crate::linalg::{asymmetry, direct_sum, max_abs, symmetrize};

/// Gaussian channel `Γ → KΓKᵀ + M`, `d → Kd + d̄` acting on the B modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    k: DMatrix<f64>,
    m_noise: DMatrix<f64>,
    d_bar: Displacement,
}

impl GaussianChannel {
    /// Checks `M = Mᵀ ⪰ 0` and, for one mode, `det M ≥ (det K − 1)²`; for more
    /// modes the full complete-positivity condition. Tolerances scale with the
    /// largest entry.
    pub fn new(k: DMatrix<f64>, m_noise: DMatrix<f64>, d_bar: Displacement) -> Result<Self> {
        let n = k.nrows();
        if k.ncols() != n {
            return Err(NfgError::NotSquare { rows: n, cols: k.ncols() });
        }
        if n == 0 {
            return Err(NfgError::ZeroModes);
        }
        if n % 2 != 0 {
            return Err(NfgError::OddDimension(n));
        }
        if m_noise.nrows() != n || m_noise.ncols() != n {
            return Err(NfgError::DimensionMismatch { expected: n, found: m_noise.nrows().max(m_noise.ncols()) });
        }
        if d_bar.len() != n {
            return Err(NfgError::DimensionMismatch { expected: n, found: d_bar.len() });
        }
        if k.iter().chain(m_noise.iter()).any(|x| !x.is_finite()) {
            return Err(NfgError::NonFinite("channel matrices"));
        }
        let scale = max_abs(&k).max(max_abs(&m_noise)).max(1.0);
        let tol = DEFAULT_TOL * scale;
        let asym = asymmetry(&m_noise);
        if asym > tol {
            return Err(NfgError::InvalidChannel(format!("M is not symmetric (max |M − Mᵀ| = {asym:.3e})")));
        }
        let m_noise = symmetrize(&m_noise);
        let min_eig = m_noise.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -tol {
            return Err(NfgError::InvalidChannel(format!("M has negative eigenvalue {min_eig:.3e}")));
        }
        if n == 2 {
            let det_k = k.determinant();
            let det_m = m_noise.determinant();
            let need = (det_k - 1.0).powi(2);
            if det_m < need - tol * scale * need.max(1.0) {
                return Err(NfgError::InvalidChannel(format!(
                    "det M = {det_m:.6e} < (det K − 1)² = {need:.6e}"
                )));
            }
        } else {
            // M + iΔ − iKΔKᵀ ⪰ 0; for a single mode this is the determinant condition
            let w = omega(n / 2);
            let skew = &w - &k * &w * k.transpose();
            let h = DMatrix::from_fn(n, n, |i, j| Complex::new(m_noise[(i, j)], skew[(i, j)]));
            let min = h.symmetric_eigen().eigenvalues.min();
            if min < -tol * scale {
                return Err(NfgError::InvalidChannel(format!(
                    "not completely positive (min eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(Self { k, m_noise, d_bar })
    }

    pub fn without_displacement(k: DMatrix<f64>, m_noise: DMatrix<f64>) -> Result<Self> {
        let n = k.nrows();
        Self::new(k, m_noise, Displacement::zeros(n))
    }

    pub fn identity(n_modes: usize) -> Result<Self> {
        let n = 2 * n_modes;
        Self::without_displacement(DMatrix::identity(n, n), DMatrix::zeros(n, n))
    }

    /// Pure-loss channel with transmissivity `η ∈ [0, 1]`.
    pub fn attenuator(eta: f64, n_modes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(NfgError::OutOfRange(format!("transmissivity {eta} outside [0, 1]")));
        }
        let n = 2 * n_modes;
        Self::without_displacement(DMatrix::identity(n, n) * eta.sqrt(), DMatrix::identity(n, n) * (1.0 - eta))
    }

    /// Quantum-limited amplifier with gain `g ≥ 1`.
    pub fn amplifier(gain: f64, n_modes: usize) -> Result<Self> {
        if !(gain >= 1.0) {
            return Err(NfgError::OutOfRange(format!("gain {gain} below 1")));
        }
        let n = 2 * n_modes;
        Self::without_displacement(DMatrix::identity(n, n) * gain.sqrt(), DMatrix::identity(n, n) * (gain - 1.0))
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn m_noise(&self) -> &DMatrix<f64> {
        &self.m_noise
    }

    pub fn d_bar(&self) -> &Displacement {
        &self.d_bar
    }

    pub fn n_modes(&self) -> usize {
        self.k.nrows() / 2
    }
}

/// Applies the channel to the B modes; the result is checked for physicality.
pub fn apply_channel(state: &GaussianState, ch: &GaussianChannel) -> Result<GaussianState> {
    if ch.n_modes() != state.n_b() {
        return Err(NfgError::DimensionMismatch { expected: 2 * state.n_b(), found: ch.k.nrows() });
    }
    let na2 = 2 * state.n_a();
    let embed = direct_sum(&DMatrix::identity(na2, na2), &ch.k);
    let noise = direct_sum(&DMatrix::zeros(na2, na2), &ch.m_noise);
    let gamma = symmetrize(&(&embed * state.cm().matrix() * embed.transpose() + noise));
    let mut mean = embed * state.mean().vector();
    let mut tail = mean.rows_mut(na2, ch.k.nrows());
    tail += ch.d_bar.vector();
    let cm = CovarianceMatrix::new(gamma)?;
    let report = validate_cm(&cm, DEFAULT_TOL);
    if !report.physical {
        return Err(NfgError::Unphysical { min_nu: report.min_symplectic_eigenvalue() });
    }
    GaussianState::new(cm, Displacement::new(mean)?, state.n_a(), state.n_b())
}

/// Value after a single-mode channel on B of the standard-form state `p`,
/// without building the output state.
pub fn nfg_after_channel_closed_form(p: &StandardFormParams, ch: &GaussianChannel) -> Result<NfgResult> {
    if ch.n_modes() != 1 {
        return Err(NfgError::DimensionMismatch { expected: 2, found: ch.k.nrows() });
    }
    if ch.k.iter().all(|&x| x == 0.0) && ch.m_noise.iter().all(|&x| x == 0.0) {
        return Err(NfgError::InvalidChannel("K and M are both zero".into()));
    }
    Ok(NfgResult {
        value: after_channel_value(p, &ch.k, &ch.m_noise),
        method: Method::ChannelClosedForm,
        optimizer_theta: Some(vec![std::f64::consts::FRAC_PI_2]),
        lower_bound_only: false,
        converged: true,
    })
}

fn after_channel_value(p: &StandardFormParams, k: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    let (k11, k12, k21, k22) = (k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]);
    let (m11, m12, m22) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let n1 = (k11 * k22 - k12 * k21).powi(2);
    let n2 = m22 * k11 * k11 + m11 * k21 * k21 - 2.0 * m12 * k11 * k21;
    let n3 = m22 * k12 * k12 + m11 * k22 * k22 - 2.0 * m12 * k12 * k22;
    let n4 = m11 * m22 - m12 * m12;
    if n2 == 0.0 && n3 == 0.0 && n4 == 0.0 {
        // M = 0 or a rank-deficient noise invisible to K: the channel acts unitarily on the correlations
        return if n1 == 0.0 { 0.0 } else { closed_form_value(p) };
    }
    let (a, b, c2, d2) = (p.a, p.b, p.c * p.c, p.d * p.d);
    let ab = a * b;
    let beta = (ab - 0.5 * c2) * (ab - 0.5 * d2);
    let beta_minus_alpha = 0.5 * ab * (c2 + d2) - 0.75 * c2 * d2;
    let delta = a * (ab - 0.5 * c2) * n2 + a * (ab - 0.5 * d2) * n3 + a * a * n4;
    let delta_minus_gamma = 0.5 * a * (n2 * c2 + n3 * d2);
    let den = beta * n1 + delta;
    assert!(den > 0.0, "physical parameters give a positive denominator");
    ((beta_minus_alpha * n1 + delta_minus_gamma) / den).max(0.0)
}

/// Closed-form value after a channel for any (1+1)-mode state: the channel is
/// pulled through the local symplectic on B, `K → K s_B⁻¹`.
pub fn nfg_after_channel(state: &GaussianState, ch: &GaussianChannel) -> Result<NfgResult> {
    if state.n_a() != 1 || state.n_b() != 1 {
        return Err(NfgError::Partition("closed form needs (1+1) modes".into()));
    }
    let sf = standard_form(state)?;
    let k = &ch.k * sf.s_b.inverse().matrix();
    let pulled = GaussianChannel { k, m_noise: ch.m_noise.clone(), d_bar: ch.d_bar.clone() };
    nfg_after_channel_closed_form(&sf.params, &pulled)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub before: f64,
    pub after: f64,
    /// `after ≤ before + 1e−10`.
    pub holds: bool,
    /// `before − after`.
    pub slack: f64,
}

pub fn check_monotonicity(state: &GaussianState, ch: &GaussianChannel) -> Result<MonotonicityReport> {
    let before = nfg_two_mode(state)?.value;
    let after = nfg_two_mode(&apply_channel(state, ch)?)?.value;
    Ok(MonotonicityReport { before, after, holds: after <= before + 1e-10, slack: before - after })
}
