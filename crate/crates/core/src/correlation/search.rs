use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{det_form_objective, Method, NfgResult};
use crate::error::Result;
use crate::gaussian::{williamson, CovarianceMatrix, GaussianState};
use crate::linalg::{block_rotation, direct_sum, log_det_spd, symmetrize};

/// Seed used for restart points unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 0x6E66_6720_2019;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Settings for the grid-plus-refinement search in [`nfg_numeric`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Grid points per angle on `[0, π/2]`, endpoints included.
    pub grid_points: usize,
    /// Coordinate sweeps of the local refinement per start.
    pub refine_iters: usize,
    /// Starts for the refinement: the best grid point plus `restarts − 1` random points.
    pub restarts: usize,
    pub seed: u64,
    /// Cap on the total grid size; the per-axis count shrinks to respect it.
    pub max_grid_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { grid_points: 33, refine_iters: 60, restarts: 4, seed: DEFAULT_SEED, max_grid_evals: 50_000 }
    }
}

struct Objective {
    gamma: DMatrix<f64>,
    log_det: f64,
    n_a: usize,
    n_b: usize,
}

impl Objective {
    fn eval(&self, thetas: &[f64]) -> Result<f64> {
        let s = direct_sum(&block_rotation(thetas), &DMatrix::identity(2 * self.n_b, 2 * self.n_b));
        debug_assert_eq!(thetas.len(), self.n_a);
        det_form_objective(&self.gamma, self.log_det, &s)
    }
}

fn grid_axis(points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![FRAC_PI_2];
    }
    (0..points).map(|i| FRAC_PI_2 * i as f64 / (points - 1) as f64).collect()
}

fn grid_size(config: &OptimizerConfig, dims: usize) -> usize {
    let mut g = config.grid_points.max(2);
    while g > 2 && (g as f64).powi(dims as i32) > config.max_grid_evals as f64 {
        g -= 1;
    }
    g
}

/// Golden-section maximisation of `f` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, f: &mut impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Cyclic coordinate golden-section refinement with a halving bracket.
fn refine(obj: &Objective, start: Vec<f64>, f_start: f64, half_width: f64, iters: usize) -> Result<(Vec<f64>, f64, bool)> {
    let mut x = start;
    let mut best = f_start;
    let mut h = half_width;
    let mut converged = false;
    for _ in 0..iters {
        let before = best;
        for i in 0..x.len() {
            let lo = (x[i] - h).max(0.0);
            let hi = (x[i] + h).min(FRAC_PI_2);
            let mut trial = x.clone();
            let (xi, fi) = golden_max(lo, hi, &mut |t| {
                trial[i] = t;
                obj.eval(&trial)
            })?;
            if fi > best {
                x[i] = xi;
                best = fi;
            }
        }
        h *= 0.5;
        if h < 1e-12 || (best - before <= 1e-15 && h < 1e-6) {
            converged = true;
            break;
        }
    }
    Ok((x, best, converged))
}

/// Numeric supremum of the determinant-form objective for an `(n_a + n_b)`-mode state.
///
/// The A block is first brought to `⊕ νᵢ I₂` by its Williamson symplectic;
/// the search then runs over `⊕ S_θᵢ` with `θ ∈ [0, π/2]^{n_a}`. Those
/// rotations are the whole stabiliser only when the `νᵢ` are distinct, so a
/// degenerate A spectrum marks the result as a lower bound.
pub fn nfg_numeric(state: &GaussianState, config: &OptimizerConfig) -> Result<NfgResult> {
    let (n_a, n_b) = (state.n_a(), state.n_b());
    if n_a == 0 || n_b == 0 {
        return Ok(NfgResult {
            value: 0.0,
            method: Method::Numeric,
            optimizer_theta: None,
            lower_bound_only: false,
            converged: true,
        });
    }
    let blocks = state.blocks();
    if blocks.c.iter().all(|&x| x == 0.0) {
        // Γ_S = Γ for every S in the search set
        return Ok(NfgResult {
            value: 0.0,
            method: Method::Numeric,
            optimizer_theta: Some(vec![0.0; n_a]),
            lower_bound_only: false,
            converged: true,
        });
    }
    let wa = williamson(&CovarianceMatrix::new(blocks.a.clone())?)?;
    let local = direct_sum(wa.s.matrix(), &DMatrix::identity(2 * n_b, 2 * n_b));
    let gamma = symmetrize(&(&local * state.cm().matrix() * local.transpose()));
    let log_det = log_det_spd(&gamma)?;
    let obj = Objective { gamma, log_det, n_a, n_b };

    let g = grid_size(config, n_a);
    let axis = grid_axis(g);
    let mut idx = vec![0usize; n_a];
    let mut best_grid = (vec![0.0; n_a], f64::NEG_INFINITY);
    loop {
        let point: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        let v = obj.eval(&point)?;
        if v > best_grid.1 {
            best_grid = (point, v);
        }
        // mixed-radix increment
        let mut k = 0;
        while k < n_a {
            idx[k] += 1;
            if idx[k] < g {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n_a {
            break;
        }
    }

    let spacing = FRAC_PI_2 / (g.max(2) - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts = vec![best_grid];
    for _ in 1..config.restarts.max(1) {
        let p: Vec<f64> = (0..n_a).map(|_| rng.gen_range(0.0..=FRAC_PI_2)).collect();
        let v = obj.eval(&p)?;
        starts.push((p, v));
    }

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for (p, v) in starts {
        let run = refine(&obj, p, v, spacing, config.refine_iters)?;
        if best.as_ref().map_or(true, |b| run.1 > b.1) {
            best = Some(run);
        }
    }
    let (theta, value, converged) = best.expect("at least one start");
    Ok(NfgResult {
        value: value.max(0.0),
        method: Method::Numeric,
        optimizer_theta: Some(theta),
        lower_bound_only: wa.degenerate,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::nfg_two_mode;
    use crate::gaussian::StandardFormParams;

    #[test]
    fn matches_closed_form_on_two_modes() {
        let p = StandardFormParams::new(3.0, 2.5, 1.8, -1.1).unwrap();
        let st = p.to_state().unwrap();
        let num = nfg_numeric(&st, &OptimizerConfig::default()).unwrap();
        let exact = nfg_two_mode(&st).unwrap();
        assert!((num.value - exact.value).abs() < 1e-10);
        assert!(!num.lower_bound_only);
        assert!(num.converged);
    }

    #[test]
    fn product_state_is_zero() {
        let st = GaussianState::from_cm(
            CovarianceMatrix::thermal(1.0, 2).unwrap().direct_sum(&CovarianceMatrix::thermal(0.5, 1).unwrap()),
            2,
            1,
        )
        .unwrap();
        let r = nfg_numeric(&st, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn grid_shrinks_for_many_modes() {
        let cfg = OptimizerConfig::default();
        assert_eq!(grid_size(&cfg, 1), 33);
        assert_eq!(grid_size(&cfg, 2), 33);
        assert!(grid_size(&cfg, 4).pow(4) <= cfg.max_grid_evals);
    }

    #[test]
    fn golden_section_finds_interior_max() {
        let (x, fx) = golden_max(0.0, 2.0, &mut |t| Ok(-(t - 0.7) * (t - 0.7))).unwrap();
        assert!((x - 0.7).abs() < 1e-6);
        assert!(fx <= 0.0);
    }
}
