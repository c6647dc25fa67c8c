//! Squeezed thermal states, the two-mode squeezed vacuum, and the closed-form
//! comparison measures (Gaussian geometric discord `D_G` and the
//! measurement-induced `Q`) on the squeezed thermal family.

use crate::error::{NfgError, Result};
use crate::gaussian::{GaussianState, StandardFormParams};

/// Squeezed thermal state with `a = b = 1 + 2n̄`, `c = −d = 2μ√(n̄(1+n̄))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SstsParams {
    pub n_bar: f64,
    pub mu: f64,
}

impl SstsParams {
    pub fn new(n_bar: f64, mu: f64) -> Result<Self> {
        if !n_bar.is_finite() || n_bar < 0.0 {
            return Err(NfgError::OutOfRange(format!("mean photon number {n_bar} must be finite and ≥ 0")));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(NfgError::OutOfRange(format!("μ = {mu} outside [0, 1]")));
        }
        Ok(Self { n_bar, mu })
    }

    pub fn standard_form(&self) -> Result<StandardFormParams> {
        let a = 1.0 + 2.0 * self.n_bar;
        let c = 2.0 * self.mu * (self.n_bar * (1.0 + self.n_bar)).sqrt();
        StandardFormParams::new(a, a, c, -c)
    }

    /// `n̄(1+n̄)`.
    fn x(&self) -> f64 {
        self.n_bar * (1.0 + self.n_bar)
    }

    /// `x/(4x+1)`, bounded by 1/4 and finite for any finite `n̄`.
    fn t(&self) -> f64 {
        let x = self.x();
        if x == 0.0 {
            0.0
        } else {
            1.0 / (4.0 + 1.0 / x)
        }
    }
}

pub fn ssts(p: SstsParams) -> Result<GaussianState> {
    p.standard_form()?.to_state()
}

/// Two-mode squeezed vacuum, `CM = [[ch,0,sh,0],[0,ch,0,−sh],[sh,0,ch,0],[0,−sh,0,ch]]`.
pub fn tmsv(r: f64) -> Result<GaussianState> {
    if !r.is_finite() || r < 0.0 {
        return Err(NfgError::OutOfRange(format!("squeezing r = {r} must be finite and ≥ 0")));
    }
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    StandardFormParams::new(ch, ch, sh, -sh)?.to_state()
}

/// `1 − (s − 4μ²x)²/(s − 2μ²x)²` with `s = (1+2n̄)²`, `x = n̄(1+n̄)`, written as
/// `4u(1−3u)/(1−2u)²` in `u = μ²x/s`.
pub fn nfg_ssts(p: SstsParams) -> f64 {
    let u = p.mu * p.mu * p.t();
    let w = 1.0 - 2.0 * u;
    4.0 * u * (1.0 - 3.0 * u) / (w * w)
}

/// `1/(s − 4μ²x) − 9/(√(4s − 12μ²x) + √s)²`.
///
/// With `p = 1 − 4u` and `q = 1 + √(1+3p)` the bracket collapses to
/// `6(1−p)/(s·p·q(q+1))`, which is free of cancellation.
pub fn dg_ssts(p: SstsParams) -> f64 {
    let u = p.mu * p.mu * p.t();
    let sp = 1.0 + 4.0 * p.x() * (1.0 - p.mu * p.mu);
    let q = 1.0 + 2.0 * (1.0 - 3.0 * u).sqrt();
    24.0 * u / (sp * q * (q + 1.0))
}

/// `1/(1 + 2n̄(1−μ²)) − 1/(1 + 2n̄)`.
pub fn q_ssts(p: SstsParams) -> f64 {
    let n = p.n_bar;
    let mu2 = p.mu * p.mu;
    2.0 * n * mu2 / ((1.0 + 2.0 * n * (1.0 - mu2)) * (1.0 + 2.0 * n))
}

/// `lim_{n̄→∞} = 1 − (1−μ²)²/(1−μ²/2)²`, for `μ ∈ (0, 1)`.
pub fn nfg_ssts_limit(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(NfgError::OutOfRange(format!("μ = {mu} outside (0, 1)")));
    }
    let m2 = mu * mu;
    let w = 1.0 - 0.5 * m2;
    Ok(m2 * (1.0 - 0.75 * m2) / (w * w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub n_bar_min: f64,
    pub n_bar_max: f64,
    pub n_bar_steps: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_steps: usize,
}

impl SweepGrid {
    /// Grids behind the four comparison plots: 1 and 3 cover `n̄ ∈ [0, 50]`,
    /// 2 and 4 cover `n̄ ∈ [100000, 100500]`, all with `μ ∈ [0, 1]` at 51×51.
    pub fn figure(which: u8) -> Result<Self> {
        let (lo, hi) = match which {
            1 | 3 => (0.0, 50.0),
            2 | 4 => (100_000.0, 100_500.0),
            _ => return Err(NfgError::InvalidGrid(format!("no figure {which}"))),
        };
        Ok(Self { n_bar_min: lo, n_bar_max: hi, n_bar_steps: 51, mu_min: 0.0, mu_max: 1.0, mu_steps: 51 })
    }

    pub fn single(n_bar: f64, mu: f64) -> Self {
        Self { n_bar_min: n_bar, n_bar_max: n_bar, n_bar_steps: 1, mu_min: mu, mu_max: mu, mu_steps: 1 }
    }

    fn check(&self) -> Result<()> {
        let axis = |name: &str, lo: f64, hi: f64, steps: usize| {
            if steps == 0 {
                return Err(NfgError::InvalidGrid(format!("{name}: no points")));
            }
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(NfgError::InvalidGrid(format!("{name}: bounds [{lo}, {hi}] not increasing")));
            }
            if steps > 1 && hi == lo {
                return Err(NfgError::InvalidGrid(format!("{name}: {steps} points on an empty interval")));
            }
            if steps == 1 && hi != lo {
                return Err(NfgError::InvalidGrid(format!("{name}: one point cannot span [{lo}, {hi}]")));
            }
            Ok(())
        };
        axis("n_bar", self.n_bar_min, self.n_bar_max, self.n_bar_steps)?;
        axis("mu", self.mu_min, self.mu_max, self.mu_steps)?;
        SstsParams::new(self.n_bar_min, self.mu_min)?;
        SstsParams::new(self.n_bar_max, self.mu_max)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_bar_steps * self.mu_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn axis_points(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let mut v: Vec<f64> = (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
    v[steps - 1] = hi;
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n_bar: f64,
    pub mu: f64,
    pub nfg: f64,
    pub dg: f64,
    pub q: f64,
    pub nfg_minus_dg: f64,
    pub nfg_minus_q: f64,
}

impl SweepRow {
    pub fn at(p: SstsParams) -> Self {
        let (nfg, dg, q) = (nfg_ssts(p), dg_ssts(p), q_ssts(p));
        Self { n_bar: p.n_bar, mu: p.mu, nfg, dg, q, nfg_minus_dg: nfg - dg, nfg_minus_q: nfg - q }
    }
}

/// Rows ordered with `n̄` outer and `μ` inner.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.check()?;
    let mus = axis_points(grid.mu_min, grid.mu_max, grid.mu_steps);
    let mut rows = Vec::with_capacity(grid.len());
    for n in axis_points(grid.n_bar_min, grid.n_bar_max, grid.n_bar_steps) {
        for &mu in &mus {
            rows.push(SweepRow::at(SstsParams { n_bar: n, mu }));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: f64, mu: f64) -> SstsParams {
        SstsParams::new(n, mu).unwrap()
    }

    fn eq9(n: f64, mu: f64) -> f64 {
        let s = (1.0 + 2.0 * n).powi(2);
        let x = n * (1.0 + n);
        1.0 - (s - 4.0 * mu * mu * x).powi(2) / (s - 2.0 * mu * mu * x).powi(2)
    }

    fn eq10(n: f64, mu: f64) -> f64 {
        let s = (1.0 + 2.0 * n).powi(2);
        let x = n * (1.0 + n);
        1.0 / (s - 4.0 * mu * mu * x) - 9.0 / ((4.0 * s - 12.0 * mu * mu * x).sqrt() + (1.0 + 2.0 * n)).powi(2)
    }

    #[test]
    fn literal_forms_agree_at_moderate_n() {
        for &(n, mu) in &[(0.5, 0.3), (1.0, 1.0), (7.0, 0.6), (49.0, 0.9)] {
            assert!((nfg_ssts(p(n, mu)) - eq9(n, mu)).abs() < 1e-13);
            assert!((dg_ssts(p(n, mu)) - eq10(n, mu)).abs() < 1e-13);
        }
    }

    #[test]
    fn reported_values_at_49() {
        let q = p(49.0, 0.9);
        assert!((nfg_ssts(q) - 0.897955).abs() < 1e-6);
        assert!((dg_ssts(q) - 0.000356).abs() < 1e-6);
        assert!((q_ssts(q) - 0.040867).abs() < 1e-6);
    }

    #[test]
    fn large_n_reported_values_belong_to_1e5() {
        let q = p(1e5, 0.9);
        assert!((nfg_ssts(q) - 0.89803).abs() < 1e-5);
        assert!((dg_ssts(q) - 8.72518e-11).abs() < 1e-15);
        assert!((q_ssts(q) - 0.000021).abs() < 1e-6);
        // at 1e4 the same quantities are about 100 and 10 times larger
        assert!((dg_ssts(p(1e4, 0.9)) - 8.72439e-9).abs() < 1e-13);
        assert!((q_ssts(p(1e4, 0.9)) - 2.13091e-4).abs() < 1e-9);
    }

    #[test]
    fn mu_zero_and_one() {
        for n in [0.0, 1.0, 1e4, 1e13] {
            assert_eq!(nfg_ssts(p(n, 0.0)), 0.0);
            assert_eq!(dg_ssts(p(n, 0.0)), 0.0);
            assert_eq!(q_ssts(p(n, 0.0)), 0.0);
            let expect = 1.0 - 1.0 / (1.0 + 2.0 * n + 2.0 * n * n).powi(2);
            assert!((nfg_ssts(p(n, 1.0)) - expect).abs() <= 1e-12 * expect.max(1e-300));
            assert!((q_ssts(p(n, 1.0)) - (1.0 - 1.0 / (1.0 + 2.0 * n))).abs() < 1e-15);
        }
    }

    #[test]
    fn large_n_limit() {
        let lim = nfg_ssts_limit(0.9).unwrap();
        assert!((lim - 0.898030).abs() < 1e-6);
        assert!((nfg_ssts(p(1e13, 0.9)) - lim).abs() < 1e-9);
        assert!((nfg_ssts(p(1e8, 0.5)) - nfg_ssts_limit(0.5).unwrap()).abs() < 1e-6);
        assert!(dg_ssts(p(1e13, 0.9)).is_finite() && dg_ssts(p(1e13, 0.9)) < 1e-20);
        assert!(nfg_ssts_limit(1.0).is_err() && nfg_ssts_limit(0.0).is_err());
    }

    #[test]
    fn state_builders() {
        let v = ssts(p(0.0, 0.4)).unwrap();
        assert_eq!(v.cm().matrix(), &nalgebra::DMatrix::identity(4, 4));
        let pure = ssts(p(1.0, 1.0)).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let r: f64 = 0.7;
        let a = tmsv(r).unwrap();
        let b = ssts(p(r.sinh().powi(2), 1.0)).unwrap();
        assert!((a.cm().matrix() - b.cm().matrix()).abs().max() < 1e-12);
        assert!(tmsv(-0.1).is_err());
        assert!(SstsParams::new(1.0, 1.1).is_err());
        assert!(SstsParams::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn sweep_grid_layout() {
        let rows = sweep(&SweepGrid::figure(1).unwrap()).unwrap();
        assert_eq!(rows.len(), 51 * 51);
        assert_eq!((rows[0].n_bar, rows[0].mu), (0.0, 0.0));
        assert_eq!((rows[1].n_bar, rows[1].mu), (0.0, 0.02));
        assert_eq!((rows[51].n_bar, rows[51].mu), (1.0, 0.0));
        assert_eq!(rows.last().map(|r| (r.n_bar, r.mu)), Some((50.0, 1.0)));
        for r in &rows {
            assert_eq!(r.nfg_minus_dg, r.nfg - r.dg);
        }
        let one = sweep(&SweepGrid::single(49.0, 0.9)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(SweepGrid::figure(5).is_err());
        let mut bad = SweepGrid::figure(2).unwrap();
        bad.mu_steps = 0;
        assert!(sweep(&bad).is_err());
        bad = SweepGrid::figure(2).unwrap();
        bad.n_bar_max = bad.n_bar_min;
        assert!(sweep(&bad).is_err());
    }
}
