//! Covariance-matrix overlaps against brute-force Fock-basis traces.

use fock_oracle::{
    adaptive, coherent_dm, overlap_fock, squeezed_vacuum_dm, thermal_dm, two_mode_squeezed_dm, Complex,
    FockDensityMatrix,
};
use nalgebra::DMatrix;
use nfg_core::families::tmsv;
use nfg_core::gaussian::{apply_gaussian_unitary, CovarianceMatrix, Displacement, GaussianState, GaussianUnitary, Side, SymplecticMatrix};
use nfg_core::overlap::overlap;

const REL: f64 = 1e-6;

fn thermal(n: f64) -> GaussianState {
    GaussianState::from_cm(CovarianceMatrix::thermal(n, 1).unwrap(), 1, 0).unwrap()
}

fn coherent(re: f64, im: f64) -> GaussianState {
    let s2 = std::f64::consts::SQRT_2;
    thermal(0.0).with_mean(Displacement::from_slice(&[s2 * re, s2 * im]).unwrap()).unwrap()
}

fn squeezed(r: f64) -> GaussianState {
    apply_gaussian_unitary(&thermal(0.0), &GaussianUnitary::from_symplectic(SymplecticMatrix::squeeze(r)), Side::A).unwrap()
}

/// Rebuilds both Fock states at a common cutoff large enough for either.
fn fock_pair<F, G>(f: F, g: G) -> (FockDensityMatrix, FockDensityMatrix)
where
    F: Fn(usize) -> fock_oracle::Result<FockDensityMatrix>,
    G: Fn(usize) -> fock_oracle::Result<FockDensityMatrix>,
{
    let c = adaptive(&f).unwrap().cutoff().max(adaptive(&g).unwrap().cutoff());
    (f(c).unwrap(), g(c).unwrap())
}

fn check(label: &str, fock: f64, cm: f64) {
    let rel = (fock - cm).abs() / cm.abs().max(1e-300);
    assert!(rel < REL, "{label}: fock {fock} vs cm {cm} (rel {rel:.2e})");
}

#[test]
fn thermal_pairs() {
    let ns = [0.0, 0.5, 1.0, 3.0];
    for &n in &ns {
        for &m in &ns {
            let (a, b) = fock_pair(|c| thermal_dm(n, c), |c| thermal_dm(m, c));
            check(&format!("thermal {n} {m}"), overlap_fock(&a, &b).unwrap(), overlap(&thermal(n), &thermal(m)).unwrap().value);
        }
    }
}

#[test]
fn coherent_pairs() {
    let alphas = [(0.0, 0.0), (1.0, 0.0), (0.3, -0.7), (-1.2, 0.5)];
    for &(ar, ai) in &alphas {
        for &(br, bi) in &alphas {
            let (a, b) = fock_pair(|c| coherent_dm(Complex::new(ar, ai), c), |c| coherent_dm(Complex::new(br, bi), c));
            check(
                &format!("coherent {ar}+{ai}i vs {br}+{bi}i"),
                overlap_fock(&a, &b).unwrap(),
                overlap(&coherent(ar, ai), &coherent(br, bi)).unwrap().value,
            );
        }
    }
}

#[test]
fn squeezed_against_everything() {
    for &r in &[0.0, 0.3, 0.8] {
        for &r2 in &[0.0, 0.5, -0.4] {
            let (a, b) = fock_pair(|c| squeezed_vacuum_dm(r, c), |c| squeezed_vacuum_dm(r2, c));
            check(&format!("squeezed {r} {r2}"), overlap_fock(&a, &b).unwrap(), overlap(&squeezed(r), &squeezed(r2)).unwrap().value);
        }
        // displacement along and across the squeezed quadrature fixes the orientation
        for &(ar, ai) in &[(0.8, 0.0), (0.0, 0.8), (0.5, -0.5)] {
            let (a, b) = fock_pair(|c| squeezed_vacuum_dm(r, c), |c| coherent_dm(Complex::new(ar, ai), c));
            check(
                &format!("squeezed {r} vs coherent {ar}+{ai}i"),
                overlap_fock(&a, &b).unwrap(),
                overlap(&squeezed(r), &coherent(ar, ai)).unwrap().value,
            );
        }
        let (a, b) = fock_pair(|c| squeezed_vacuum_dm(r, c), |c| thermal_dm(1.0, c));
        check(&format!("squeezed {r} vs thermal"), overlap_fock(&a, &b).unwrap(), overlap(&squeezed(r), &thermal(1.0)).unwrap().value);
    }
}

#[test]
fn two_mode_squeezed_pairs() {
    for &r in &[0.0, 0.5, 1.0] {
        let st = tmsv(r).unwrap();
        for &r2 in &[0.0, 0.25, 0.9] {
            let (a, b) = fock_pair(|c| two_mode_squeezed_dm(r, c), |c| two_mode_squeezed_dm(r2, c));
            check(&format!("tmsv {r} {r2}"), overlap_fock(&a, &b).unwrap(), overlap(&st, &tmsv(r2).unwrap()).unwrap().value);
        }
        let (a, b) = fock_pair(
            |c| two_mode_squeezed_dm(r, c),
            |c| thermal_dm(0.5, c)?.tensor(&thermal_dm(0.5, c)?),
        );
        let prod = GaussianState::from_cm(CovarianceMatrix::thermal(0.5, 2).unwrap(), 1, 1).unwrap();
        check(&format!("tmsv {r} vs thermal pair"), overlap_fock(&a, &b).unwrap(), overlap(&st, &prod).unwrap().value);
    }
    let r: f64 = 0.5;
    let t = adaptive(|c| two_mode_squeezed_dm(r, c)).unwrap();
    let vac = FockDensityMatrix::vacuum(2, t.cutoff()).unwrap();
    check("tmsv vs vacuum", overlap_fock(&t, &vac).unwrap(), 1.0 / r.cosh().powi(2));
    check("tmsv cm vs vacuum", overlap(&tmsv(r).unwrap(), &GaussianState::vacuum(1, 1).unwrap()).unwrap().value, 1.0 / r.cosh().powi(2));
}

#[test]
fn mixed_product_states() {
    let (a, b) = fock_pair(
        |c| thermal_dm(0.7, c)?.tensor(&coherent_dm(Complex::new(0.4, 0.2), c)?),
        |c| coherent_dm(Complex::new(-0.3, 0.0), c)?.tensor(&squeezed_vacuum_dm(0.4, c)?),
    );
    let left = thermal(0.7).tensor(&coherent(0.4, 0.2));
    let right = coherent(-0.3, 0.0).tensor(&squeezed(0.4));
    check("mixed products", overlap_fock(&a, &b).unwrap(), overlap(&left, &right).unwrap().value);
    a.validate().unwrap();
    b.validate().unwrap();
}

#[test]
fn purities_match() {
    for &n in &[0.0, 1.0, 3.0] {
        let t = adaptive(|c| thermal_dm(n, c)).unwrap();
        check("thermal purity", t.purity(), thermal(n).purity());
    }
    let t = adaptive(|c| two_mode_squeezed_dm(0.8, c)).unwrap();
    check("tmsv purity", t.purity(), tmsv(0.8).unwrap().purity());
    let reduced = t.partial_trace(&[0]).unwrap();
    let cm_a = GaussianState::from_cm(
        CovarianceMatrix::new(DMatrix::identity(2, 2) * (1.6_f64).cosh()).unwrap(),
        1,
        0,
    )
    .unwrap();
    check("reduced tmsv purity", reduced.purity(), cm_a.purity());
}
