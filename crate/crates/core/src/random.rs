//! Seeded generators of random physical states, symplectics and channels.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::GaussianChannel;
use crate::gaussian::{CovarianceMatrix, Displacement, GaussianState, SymplecticMatrix};
use crate::linalg::{rotation, symmetrize};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn local_mode(rng: &mut ChaCha8Rng, max_r: f64) -> SymplecticMatrix {
    let pi = std::f64::consts::PI;
    SymplecticMatrix::rotation(rng.gen_range(0.0..pi))
        .compose(&SymplecticMatrix::squeeze(rng.gen_range(-max_r..max_r)))
        .compose(&SymplecticMatrix::rotation(rng.gen_range(0.0..pi)))
}

/// Product of single-mode pieces.
pub fn random_local(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> SymplecticMatrix {
    let mut s = local_mode(rng, max_r);
    for _ in 1..n {
        s = s.direct_sum(&local_mode(rng, max_r));
    }
    s
}

fn embed_pair(n: usize, i: usize, s: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::identity(i).direct_sum(s).direct_sum(&SymplecticMatrix::identity(n - i - 2))
}

/// Locals, then beam splitters and two-mode squeezers on neighbouring modes, then locals.
pub fn random_symplectic(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> SymplecticMatrix {
    let mut s = random_local(rng, n, max_r);
    for i in 0..n.saturating_sub(1) {
        let bs = SymplecticMatrix::beam_splitter(rng.gen_range(0.0..std::f64::consts::PI));
        let tms = SymplecticMatrix::two_mode_squeeze(rng.gen_range(-max_r..max_r));
        s = s.compose(&embed_pair(n, i, &bs)).compose(&embed_pair(n, i, &tms));
    }
    s.compose(&random_local(rng, n, max_r))
}

pub fn random_nus(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(1.0..4.0) })
        .collect()
}

/// `S (⊕ νᵢ I₂) Sᵀ` with the given mean.
pub fn state_from(s: &SymplecticMatrix, nus: &[f64], n_a: usize, n_b: usize, mean: Displacement) -> GaussianState {
    let diag: Vec<f64> = nus.iter().flat_map(|&v| [v, v]).collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let g = symmetrize(&(s.matrix() * d * s.matrix().transpose()));
    let cm = CovarianceMatrix::new(g).expect("finite square matrix");
    GaussianState::new(cm, mean, n_a, n_b).expect("physical by construction")
}

/// Random physical `(n_a + n_b)`-mode state with squeezing up to `max_r`.
pub fn random_state(rng: &mut ChaCha8Rng, n_a: usize, n_b: usize, max_r: f64) -> GaussianState {
    let n = n_a + n_b;
    let s = random_symplectic(rng, n, max_r);
    let nus = random_nus(rng, n);
    let mean = random_displacement(rng, 2 * n);
    state_from(&s, &nus, n_a, n_b, mean)
}

pub fn random_displacement(rng: &mut ChaCha8Rng, dim: usize) -> Displacement {
    Displacement::new(DVector::from_fn(dim, |_, _| rng.gen_range(-2.0..2.0))).expect("finite")
}

/// Random valid single-mode channel; about one in five sits on the
/// boundary `det M = (det K − 1)²`.
pub fn random_channel(rng: &mut ChaCha8Rng) -> GaussianChannel {
    let k = DMatrix::<f64>::from_fn(2, 2, |_, _| rng.gen_range(-1.5..1.5));
    let need = (k.determinant() - 1.0).powi(2);
    let m1: f64 = rng.gen_range(0.2..3.0);
    let m2 = need / m1 * if rng.gen_bool(0.2) { 1.0 + 1e-9 } else { rng.gen_range(1.0..3.0) } + rng.gen_range(0.0..0.5);
    let rot = rotation(rng.gen_range(0.0..std::f64::consts::PI));
    let m = symmetrize(&(&rot * DMatrix::from_diagonal(&DVector::from_vec(vec![m1, m2])) * rot.transpose()));
    let d = random_displacement(rng, 2);
    GaussianChannel::new(k, m, d).expect("valid by construction")
}
