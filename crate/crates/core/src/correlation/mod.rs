//! The correlation `N_F^G`: the largest squared fidelity distance `C²` between
//! a state and its image under Gaussian unitaries on A that leave `ρ_A` fixed.
//!
//! For (1+1) modes the supremum has a closed form in the standard-form
//! parameters. For larger A the determinant form of the objective is searched
//! numerically over block rotations of the Williamson-normal A block.

mod channel;
mod search;

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::error::{NfgError, Result};
use crate::gaussian::{standard_form, GaussianState, StandardFormParams, DEFAULT_TOL};
use crate::linalg::{direct_sum, log_det_spd, rotation, symmetrize, SpdFactor};

pub use channel::{
    apply_channel, check_monotonicity, nfg_after_channel, nfg_after_channel_closed_form,
    GaussianChannel, MonotonicityReport,
};
pub use search::{nfg_numeric, OptimizerConfig, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
    ChannelClosedForm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Numeric => "numeric",
            Method::ChannelClosedForm => "channel_closed_form",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NfgResult {
    /// In `[0, 1)`.
    pub value: f64,
    pub method: Method,
    /// Rotation angle(s) on A attaining the supremum, when known.
    pub optimizer_theta: Option<Vec<f64>>,
    /// Set when the search covered only part of the stabiliser of `ρ_A`.
    pub lower_bound_only: bool,
    pub converged: bool,
}

impl NfgResult {
    fn exact(value: f64, method: Method, theta: Option<Vec<f64>>) -> Self {
        Self { value, method, optimizer_theta: theta, lower_bound_only: false, converged: true }
    }
}

/// `1 − (ab−c²)(ab−d²) / ((ab−c²/2)(ab−d²/2))`.
///
/// Evaluated as `(β − α)/β` with `β − α = ab(c²+d²)/2 − 3c²d²/4`, which avoids
/// the cancellation of the literal form for weak correlations.
pub fn nfg_closed_form(p: &StandardFormParams) -> NfgResult {
    NfgResult::exact(closed_form_value(p), Method::ClosedForm, Some(vec![FRAC_PI_2]))
}

pub(crate) fn closed_form_value(p: &StandardFormParams) -> f64 {
    let ab = p.a * p.b;
    let (c2, d2) = (p.c * p.c, p.d * p.d);
    let beta = (ab - 0.5 * c2) * (ab - 0.5 * d2);
    let gap = 0.5 * ab * (c2 + d2) - 0.75 * c2 * d2;
    (gap / beta).max(0.0)
}

/// `1 − √(det Γ det Γ_S) / det((Γ + Γ_S)/2)` for `Γ_S = S̃ Γ S̃ᵀ`.
pub(crate) fn det_form_objective(gamma: &DMatrix<f64>, log_det_gamma: f64, s_full: &DMatrix<f64>) -> Result<f64> {
    let moved = symmetrize(&(s_full * gamma * s_full.transpose()));
    let mid = (gamma + &moved) * 0.5;
    let ld_moved = log_det_spd(&moved)?;
    let ld_mid = log_det_spd(&mid)?;
    Ok(-(0.5 * (log_det_gamma + ld_moved) - ld_mid).exp_m1())
}

/// Objective for a single rotation `S_θ` on A of a (1+1)-mode state whose A
/// block is proportional to the identity (e.g. standard form), `θ ∈ [0, π/2]`.
pub fn nfg_theta_objective(state: &GaussianState, theta: f64) -> Result<f64> {
    if state.n_a() != 1 || state.n_b() != 1 {
        return Err(NfgError::Partition("the θ objective is defined for (1+1) modes".into()));
    }
    // a few ulps of slack so that grids ending at π/2 are accepted
    if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(NfgError::OutOfRange(format!("θ = {theta} outside [0, π/2]")));
    }
    let theta = theta.clamp(0.0, FRAC_PI_2);
    let a = state.blocks().a;
    let tol = DEFAULT_TOL * state.cm().scale();
    if (a[(0, 0)] - a[(1, 1)]).abs() > tol || a[(0, 1)].abs() > tol {
        return Err(NfgError::NotStandardForm);
    }
    let gamma = state.cm().matrix();
    let s = direct_sum(&rotation(theta), &DMatrix::identity(2, 2));
    Ok(det_form_objective(gamma, log_det_spd(gamma)?, &s)?.max(0.0))
}

/// Closed-form value for any (1+1)-mode state, via its standard form. The
/// mean is irrelevant.
pub fn nfg_two_mode(state: &GaussianState) -> Result<NfgResult> {
    if state.n_a() != 1 || state.n_b() != 1 {
        return Err(NfgError::Partition(format!(
            "closed form needs (1+1) modes, got ({}+{})",
            state.n_a(),
            state.n_b()
        )));
    }
    let sf = standard_form(state)?;
    Ok(nfg_closed_form(&sf.params))
}

/// Upper bound `1 − det(B − Cᵀ A⁻¹ C) / det B`.
pub fn nfg_upper_bound(state: &GaussianState) -> Result<f64> {
    if state.n_a() == 0 || state.n_b() == 0 {
        return Ok(0.0);
    }
    let blocks = state.blocks();
    let a = SpdFactor::new(&blocks.a)?;
    let schur = symmetrize(&(&blocks.b - blocks.c.transpose() * a.solve(&blocks.c)));
    let ld_schur = log_det_spd(&schur)?;
    let ld_b = log_det_spd(&blocks.b)?;
    Ok((-(ld_schur - ld_b).exp_m1()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{apply_gaussian_unitary, Displacement, GaussianUnitary, Side, SymplecticMatrix};

    fn params(a: f64, b: f64, c: f64, d: f64) -> StandardFormParams {
        StandardFormParams::new(a, b, c, d).unwrap()
    }

    #[test]
    fn pure_ssts_value() {
        let c = 2.0 * 2.0_f64.sqrt();
        let r = nfg_closed_form(&params(3.0, 3.0, c, -c));
        // cosh 4r = 17 on the squeezed-vacuum branch: 1 − 16/20²
        assert!((r.value - 0.96).abs() < 1e-14);
        assert!((r.value - (1.0 - 16.0 / 400.0)).abs() < 1e-14);
        assert_eq!(r.method, Method::ClosedForm);
        assert_eq!(r.optimizer_theta, Some(vec![FRAC_PI_2]));
    }

    #[test]
    fn uncorrelated_is_zero() {
        assert_eq!(nfg_closed_form(&params(2.0, 3.0, 0.0, 0.0)).value, 0.0);
    }

    #[test]
    fn ssts_49_09() {
        let n = 49.0_f64;
        let c = 2.0 * 0.9 * (n * (1.0 + n)).sqrt();
        let v = nfg_closed_form(&params(1.0 + 2.0 * n, 1.0 + 2.0 * n, c, -c)).value;
        assert!((v - 0.897955).abs() < 1e-6, "{v}");
    }

    #[test]
    fn literal_form_agrees() {
        for (a, b, c, d) in [(2.0, 2.0, 1.0, -1.0), (3.0, 1.5, 1.2, 0.3), (5.0, 4.0, 3.0, -2.5)] {
            let p = params(a, b, c, d);
            let ab = a * b;
            let literal = 1.0 - (ab - c * c) * (ab - d * d) / ((ab - c * c / 2.0) * (ab - d * d / 2.0));
            assert!((nfg_closed_form(&p).value - literal).abs() < 1e-14);
        }
    }

    #[test]
    fn theta_objective_endpoints_and_n0_form() {
        let p = params(3.0, 2.5, 1.8, -1.1);
        let st = p.to_state().unwrap();
        assert!(nfg_theta_objective(&st, 0.0).unwrap().abs() < 1e-15);
        let top = nfg_theta_objective(&st, FRAC_PI_2).unwrap();
        assert!((top - nfg_closed_form(&p).value).abs() < 1e-13);
        let ab = p.a * p.b;
        for k in 0..=20 {
            let t = FRAC_PI_2 * k as f64 / 20.0;
            let n0 = (1.0 + t.cos()) / 2.0;
            let expected = 1.0 - (ab - p.c * p.c) * (ab - p.d * p.d) / ((ab - p.c * p.c * n0) * (ab - p.d * p.d * n0));
            assert!((nfg_theta_objective(&st, t).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_objective_errors() {
        let st = params(2.0, 2.0, 1.0, -1.0).to_state().unwrap();
        assert!(matches!(nfg_theta_objective(&st, 2.0), Err(NfgError::OutOfRange(_))));
        assert!(matches!(nfg_theta_objective(&st, -0.1), Err(NfgError::OutOfRange(_))));
        let squeezed = apply_gaussian_unitary(
            &st,
            &GaussianUnitary::from_symplectic(SymplecticMatrix::squeeze(0.5)),
            Side::A,
        )
        .unwrap();
        assert_eq!(nfg_theta_objective(&squeezed, 0.3).unwrap_err(), NfgError::NotStandardForm);
    }

    #[test]
    fn two_mode_ignores_mean_and_orientation() {
        let p = params(3.0, 3.0, 2.0_f64.sqrt(), -2.0_f64.sqrt());
        let st = p.to_state().unwrap();
        let u = GaussianUnitary::new(
            SymplecticMatrix::rotation(0.4).direct_sum(&SymplecticMatrix::squeeze(0.3)),
            Displacement::from_slice(&[1.0, -2.0, 0.5, 3.0]).unwrap(),
        )
        .unwrap();
        let moved = apply_gaussian_unitary(&st, &u, Side::Global).unwrap();
        let v0 = nfg_two_mode(&st).unwrap().value;
        let v1 = nfg_two_mode(&moved).unwrap().value;
        assert!((v0 - v1).abs() < 1e-12);
        assert!(matches!(nfg_two_mode(&GaussianState::vacuum(2, 1).unwrap()), Err(NfgError::Partition(_))));
    }

    #[test]
    fn upper_bound_cases() {
        let prod = params(2.0, 3.0, 0.0, 0.0).to_state().unwrap();
        assert_eq!(nfg_upper_bound(&prod).unwrap(), 0.0);
        let n = 49.0_f64;
        let c = 2.0 * 0.9 * (n * (1.0 + n)).sqrt();
        let st = params(1.0 + 2.0 * n, 1.0 + 2.0 * n, c, -c).to_state().unwrap();
        let bound = nfg_upper_bound(&st).unwrap();
        assert!(bound >= nfg_two_mode(&st).unwrap().value);
        assert!(bound < 1.0);
    }
}
