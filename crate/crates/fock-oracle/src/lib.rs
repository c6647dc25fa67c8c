//! Brute-force density matrices of thermal, coherent, squeezed and two-mode
//! squeezed states in a truncated Fock basis.
//!
//! Entries are stored sparsely, keyed by flat basis index with mode 0 the most
//! significant digit. Overlaps are plain `Tr(ρσ)` sums, so nothing here depends
//! on covariance-matrix algebra.

use std::collections::{BTreeMap, BTreeSet};

pub use nalgebra::Complex;
use nalgebra::DMatrix;

pub type C64 = Complex<f64>;

/// Largest tolerated `1 − Tr ρ`.
pub const TRACE_GUARD: f64 = 1e-10;
pub const START_CUTOFF: usize = 20;
pub const MAX_CUTOFF: usize = 512;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error("cutoff {cutoff} leaves trace deficit {deficit:.3e} above the guard")]
    CutoffTooSmall { cutoff: usize, deficit: f64 },
    #[error("trace guard not met below cutoff ceiling {0}")]
    CeilingReached(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("overlap has imaginary part {0:.3e}")]
    ComplexOverlap(f64),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),
}

pub type Result<T> = std::result::Result<T, FockError>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    modes: usize,
    cutoff: usize,
    entries: BTreeMap<(usize, usize), C64>,
    trace_deficit: f64,
}

impl FockDensityMatrix {
    fn from_entries(modes: usize, cutoff: usize, entries: BTreeMap<(usize, usize), C64>) -> Result<Self> {
        let trace: f64 = entries.iter().filter(|((i, j), _)| i == j).map(|(_, v)| v.re).sum();
        let deficit = (1.0 - trace).max(0.0);
        if deficit >= TRACE_GUARD {
            return Err(FockError::CutoffTooSmall { cutoff, deficit });
        }
        Ok(Self { modes, cutoff, entries, trace_deficit: deficit })
    }

    /// `|ψ⟩⟨ψ|` from sparse amplitudes.
    fn pure(modes: usize, cutoff: usize, amps: &[(usize, C64)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &(i, a) in amps {
            for &(j, b) in amps {
                let v = a * b.conj();
                if v != C64::new(0.0, 0.0) {
                    entries.insert((i, j), v);
                }
            }
        }
        Self::from_entries(modes, cutoff, entries)
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        Self::pure(modes, cutoff, &[(0, C64::new(1.0, 0.0))])
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Basis size `cutoff^modes`.
    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn flat(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * self.cutoff + n)
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.modes];
        for k in (0..self.modes).rev() {
            out[k] = idx % self.cutoff;
            idx /= self.cutoff;
        }
        out
    }

    /// `⟨row|ρ|col⟩` for occupation-number tuples.
    pub fn entry(&self, row: &[usize], col: &[usize]) -> C64 {
        if row.len() != self.modes || col.len() != self.modes {
            return C64::new(0.0, 0.0);
        }
        let key = (self.flat(row), self.flat(col));
        self.entries.get(&key).copied().unwrap_or_default()
    }

    pub fn trace(&self) -> f64 {
        1.0 - self.trace_deficit
    }

    pub fn purity(&self) -> f64 {
        overlap_fock(self, self).expect("same shape")
    }

    /// `ρ ⊗ σ`; both factors must share the cutoff.
    pub fn tensor(&self, other: &FockDensityMatrix) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(FockError::DimensionMismatch(format!("cutoffs {} and {}", self.cutoff, other.cutoff)));
        }
        let shift = other.dim();
        let mut entries = BTreeMap::new();
        for (&(i, j), &a) in &self.entries {
            for (&(k, l), &b) in &other.entries {
                entries.insert((i * shift + k, j * shift + l), a * b);
            }
        }
        let trace_deficit = (1.0 - self.trace() * other.trace()).max(0.0);
        Ok(Self { modes: self.modes + other.modes, cutoff: self.cutoff, entries, trace_deficit })
    }

    /// Reduced state on the listed modes, in the given order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let uniq: BTreeSet<_> = keep.iter().collect();
        if keep.is_empty() || uniq.len() != keep.len() || keep.iter().any(|&m| m >= self.modes) {
            return Err(FockError::InvalidParameter(format!("cannot keep modes {keep:?} of {}", self.modes)));
        }
        let traced: Vec<usize> = (0..self.modes).filter(|m| !keep.contains(m)).collect();
        let mut out = Self { modes: keep.len(), cutoff: self.cutoff, entries: BTreeMap::new(), trace_deficit: 0.0 };
        for (&(i, j), &v) in &self.entries {
            let (di, dj) = (self.digits(i), self.digits(j));
            if traced.iter().any(|&m| di[m] != dj[m]) {
                continue;
            }
            let ri: Vec<usize> = keep.iter().map(|&m| di[m]).collect();
            let rj: Vec<usize> = keep.iter().map(|&m| dj[m]).collect();
            *out.entries.entry((out.flat(&ri), out.flat(&rj))).or_default() += v;
        }
        out.trace_deficit = self.trace_deficit;
        Ok(out)
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), v)| (v - self.entries.get(&(j, i)).copied().unwrap_or_default().conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue, found block by block over the connected components
    /// of the sparsity pattern.
    pub fn min_eigenvalue(&self) -> f64 {
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let up = *p.entry(x).or_insert(x);
            if up == x {
                return x;
            }
            let root = find(p, up);
            p.insert(x, root);
            root
        }
        for &(i, j) in self.entries.keys() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent.insert(ri, rj);
            }
        }
        let nodes: Vec<usize> = parent.keys().copied().collect();
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for n in nodes {
            let r = find(&mut parent, n);
            comps.entry(r).or_default().push(n);
        }
        let mut local: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut blocks: Vec<DMatrix<C64>> = Vec::with_capacity(comps.len());
        for members in comps.values() {
            for (k, &m) in members.iter().enumerate() {
                local.insert(m, (blocks.len(), k));
            }
            blocks.push(DMatrix::zeros(members.len(), members.len()));
        }
        for (&(i, j), &v) in &self.entries {
            let (b, a) = local[&i];
            blocks[b][(a, local[&j].1)] = v;
        }
        let mut min = f64::INFINITY;
        for block in blocks {
            let h = (&block + block.adjoint()) * C64::new(0.5, 0.0);
            min = min.min(h.symmetric_eigen().eigenvalues.min());
        }
        if self.entries.is_empty() {
            0.0
        } else {
            min
        }
    }

    /// Hermitian within 1e−12 and positive semidefinite within 1e−10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(FockError::NotHermitian(herm));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(FockError::NotPositive(min));
        }
        Ok(())
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(FockError::InvalidParameter(format!("cutoff {cutoff} below 2")));
    }
    Ok(())
}

/// Calls `build` with cutoffs 20, 40, 80, … up to [`MAX_CUTOFF`] until the
/// trace guard is met.
pub fn adaptive<F>(build: F) -> Result<FockDensityMatrix>
where
    F: Fn(usize) -> Result<FockDensityMatrix>,
{
    let mut cutoff = START_CUTOFF;
    loop {
        match build(cutoff) {
            Err(FockError::CutoffTooSmall { .. }) if cutoff < MAX_CUTOFF => {
                cutoff = (2 * cutoff).min(MAX_CUTOFF);
            }
            Err(FockError::CutoffTooSmall { .. }) => return Err(FockError::CeilingReached(MAX_CUTOFF)),
            other => return other,
        }
    }
}

/// Diagonal with weights `n̄ᵏ/(1+n̄)^{k+1}`.
pub fn thermal_dm(n_bar: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !n_bar.is_finite() || n_bar < 0.0 {
        return Err(FockError::InvalidParameter(format!("n̄ = {n_bar}")));
    }
    let ratio = n_bar / (1.0 + n_bar);
    let mut p = 1.0 / (1.0 + n_bar);
    let mut entries = BTreeMap::new();
    for k in 0..cutoff {
        if p != 0.0 {
            entries.insert((k, k), C64::new(p, 0.0));
        }
        p *= ratio;
    }
    FockDensityMatrix::from_entries(1, cutoff, entries)
}

/// `e^{−|α|²/2} Σ αᵏ/√k! |k⟩`.
pub fn coherent_dm(alpha: C64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(FockError::InvalidParameter(format!("α = {alpha}")));
    }
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut amps = Vec::with_capacity(cutoff);
    for k in 0..cutoff {
        if k > 0 {
            c = c * alpha / (k as f64).sqrt();
        }
        amps.push((k, c));
    }
    FockDensityMatrix::pure(1, cutoff, &amps)
}

/// Vacuum squeezed in `x` (variance `e^{−2r}` of the vacuum's):
/// amplitudes on even `|2m⟩` with ratio `−tanh r · √((2m−1)/(2m))`.
pub fn squeezed_vacuum_dm(r: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !r.is_finite() {
        return Err(FockError::InvalidParameter(format!("r = {r}")));
    }
    let t = r.tanh();
    let mut c = 1.0 / r.cosh().sqrt();
    let mut amps = vec![(0, C64::new(c, 0.0))];
    let mut n = 2;
    while n < cutoff {
        c *= -t * ((n - 1) as f64 / n as f64).sqrt();
        amps.push((n, C64::new(c, 0.0)));
        n += 2;
    }
    FockDensityMatrix::pure(1, cutoff, &amps)
}

/// `Σ tanhᵏ r / cosh r |k,k⟩`.
pub fn two_mode_squeezed_dm(r: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !r.is_finite() || r < 0.0 {
        return Err(FockError::InvalidParameter(format!("r = {r}")));
    }
    let t = r.tanh();
    let mut c = 1.0 / r.cosh();
    let mut amps = Vec::with_capacity(cutoff);
    for k in 0..cutoff {
        amps.push((k * cutoff + k, C64::new(c, 0.0)));
        c *= t;
    }
    FockDensityMatrix::pure(2, cutoff, &amps)
}

/// `Re Tr(ρσ)`; the imaginary part must vanish to 1e−12.
pub fn overlap_fock(rho: &FockDensityMatrix, sigma: &FockDensityMatrix) -> Result<f64> {
    if rho.modes != sigma.modes || rho.cutoff != sigma.cutoff {
        return Err(FockError::DimensionMismatch(format!(
            "{} modes at cutoff {} vs {} modes at cutoff {}",
            rho.modes, rho.cutoff, sigma.modes, sigma.cutoff
        )));
    }
    let (small, large) = if rho.nnz() <= sigma.nnz() { (rho, sigma) } else { (sigma, rho) };
    let mut acc = C64::new(0.0, 0.0);
    for (&(i, j), &v) in &small.entries {
        if let Some(&w) = large.entries.get(&(j, i)) {
            acc += v * w;
        }
    }
    if acc.im.abs() >= 1e-12 {
        return Err(FockError::ComplexOverlap(acc.im));
    }
    Ok(acc.re)
}
