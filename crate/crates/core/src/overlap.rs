//! Overlap `tr(ρσ)`, purity, the normalised fidelity `F` and `C² = 1 − F²`
//! for Gaussian states, all at covariance-matrix level.
//!
//! The overlap is
//! `tr(ρσ) = det[(V_ρ+V_σ)/2]^{-1/2} · exp(−½ δdᵀ [(V_ρ+V_σ)/2]^{-1} δd)`
//! with the bracket in the exponent taken as a matrix inverse. Everything is
//! carried in log space so that very large photon numbers stay finite.

use crate::error::{NfgError, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{log_det_spd, SpdFactor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub value: f64,
    pub log_value: f64,
}

fn check_dims(rho: &GaussianState, sigma: &GaussianState) -> Result<()> {
    if rho.cm().dim() != sigma.cm().dim() {
        return Err(NfgError::DimensionMismatch { expected: rho.cm().dim(), found: sigma.cm().dim() });
    }
    Ok(())
}

pub fn overlap(rho: &GaussianState, sigma: &GaussianState) -> Result<OverlapResult> {
    check_dims(rho, sigma)?;
    let mid = (rho.cm().matrix() + sigma.cm().matrix()) * 0.5;
    let factor = SpdFactor::new(&mid)?;
    let delta = rho.mean().vector() - sigma.mean().vector();
    let quad = delta.dot(&factor.solve_vec(&delta));
    let log_value = -0.5 * factor.log_det - 0.5 * quad;
    Ok(OverlapResult { value: log_value.exp(), log_value })
}

/// `ln tr ρ² = −½ ln det Γ`.
pub fn log_purity(rho: &GaussianState) -> f64 {
    // physical states are positive definite by construction
    -0.5 * log_det_spd(rho.cm().matrix()).expect("physical covariance matrix")
}

/// `tr ρ² = 1/√det Γ`.
pub fn purity(rho: &GaussianState) -> f64 {
    log_purity(rho).exp()
}

fn log_fidelity(rho: &GaussianState, sigma: &GaussianState) -> Result<f64> {
    let ov = overlap(rho, sigma)?;
    Ok((ov.log_value - 0.5 * (log_purity(rho) + log_purity(sigma))).min(0.0))
}

/// `F = |tr ρσ| / √(tr ρ² tr σ²)`.
pub fn fidelity_f(rho: &GaussianState, sigma: &GaussianState) -> Result<f64> {
    Ok(log_fidelity(rho, sigma)?.exp())
}

/// `C² = 1 − F²`, evaluated as `−expm1(2 ln F)` to keep small distances accurate.
pub fn c_squared(rho: &GaussianState, sigma: &GaussianState) -> Result<f64> {
    Ok((-(2.0 * log_fidelity(rho, sigma)?).exp_m1()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{CovarianceMatrix, Displacement};

    fn thermal(n_bar: f64) -> GaussianState {
        GaussianState::from_cm(CovarianceMatrix::thermal(n_bar, 1).unwrap(), 1, 0).unwrap()
    }

    #[test]
    fn vacuum_overlap_is_one() {
        let v = GaussianState::vacuum(1, 1).unwrap();
        let ov = overlap(&v, &v).unwrap();
        assert_eq!(ov.value, 1.0);
        assert_eq!(ov.log_value, 0.0);
    }

    #[test]
    fn thermal_self_overlap_is_purity() {
        let t = thermal(1.0);
        assert!((overlap(&t, &t).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        assert!((purity(&t) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_vs_vacuum() {
        let alpha = 0.8_f64;
        let v = thermal(0.0);
        let coh = v
            .with_mean(Displacement::from_slice(&[std::f64::consts::SQRT_2 * alpha, 0.0]).unwrap())
            .unwrap();
        assert!((overlap(&coh, &v).unwrap().value - (-alpha * alpha).exp()).abs() < 1e-15);
    }

    #[test]
    fn thermal_vs_vacuum_fidelity() {
        let (t, v) = (thermal(1.0), thermal(0.0));
        assert!((overlap(&t, &v).unwrap().value - 0.5).abs() < 1e-15);
        assert!((fidelity_f(&t, &v).unwrap() - 3.0_f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((c_squared(&t, &v).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn identical_states() {
        let t = thermal(2.5);
        assert_eq!(fidelity_f(&t, &t).unwrap(), 1.0);
        assert_eq!(c_squared(&t, &t).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_dimensions() {
        let err = overlap(&thermal(1.0), &GaussianState::vacuum(1, 1).unwrap()).unwrap_err();
        assert!(matches!(err, NfgError::DimensionMismatch { .. }));
    }

    #[test]
    fn large_photon_number_stays_finite() {
        let t = thermal(1e13);
        let ov = overlap(&t, &thermal(0.0)).unwrap();
        assert!(ov.log_value.is_finite());
        assert!((ov.log_value + (1e13_f64 + 1.0).ln()).abs() < 1e-9);
    }
}
