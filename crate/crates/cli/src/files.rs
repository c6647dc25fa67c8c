use std::path::Path;

use nalgebra::DMatrix;
use nfg_core::correlation::GaussianChannel;
use nfg_core::gaussian::{CovarianceMatrix, Displacement, GaussianState};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    pub n_a: usize,
    pub n_b: usize,
    /// Row-major, `2(n_a+n_b)` squared entries.
    pub cm: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub schema_version: String,
    pub k: Vec<f64>,
    pub m_noise: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bar: Option<Vec<f64>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn check_version(v: &str) -> Result<(), CliError> {
    if v != SCHEMA_VERSION {
        return Err(CliError::Parse(format!("unsupported schema_version {v:?}, expected {SCHEMA_VERSION:?}")));
    }
    Ok(())
}

fn square(entries: &[f64], what: &str) -> Result<DMatrix<f64>, CliError> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n * n != entries.len() || n == 0 {
        return Err(CliError::Parse(format!("{what} has {} entries, not a non-empty square", entries.len())));
    }
    Ok(DMatrix::from_row_slice(n, n, entries))
}

impl StateFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let f: Self = read_json(path)?;
        check_version(&f.schema_version)?;
        let dim = 2 * (f.n_a + f.n_b);
        if f.cm.len() != dim * dim {
            return Err(CliError::Parse(format!(
                "cm has {} entries, expected {} for {}+{} modes",
                f.cm.len(),
                dim * dim,
                f.n_a,
                f.n_b
            )));
        }
        if let Some(m) = &f.mean {
            if m.len() != dim {
                return Err(CliError::Parse(format!("mean has {} entries, expected {dim}", m.len())));
            }
        }
        Ok(f)
    }

    /// The covariance matrix without any physicality check.
    pub fn covariance(&self) -> Result<CovarianceMatrix, CliError> {
        Ok(CovarianceMatrix::new(square(&self.cm, "cm")?)?)
    }

    pub fn to_state(&self) -> Result<GaussianState, CliError> {
        let cm = self.covariance()?;
        let mean = match &self.mean {
            Some(m) => Displacement::from_slice(m)?,
            None => Displacement::zeros(cm.dim()),
        };
        Ok(GaussianState::new(cm, mean, self.n_a, self.n_b)?)
    }

    pub fn from_state(state: &GaussianState) -> Self {
        let m = state.cm().matrix();
        let cm = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        let mean: Vec<f64> = state.mean().vector().iter().copied().collect();
        Self {
            schema_version: SCHEMA_VERSION.into(),
            n_a: state.n_a(),
            n_b: state.n_b(),
            cm,
            mean: if mean.iter().all(|&x| x == 0.0) { None } else { Some(mean) },
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

impl ChannelFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let f: Self = read_json(path)?;
        check_version(&f.schema_version)?;
        Ok(f)
    }

    pub fn to_channel(&self) -> Result<GaussianChannel, CliError> {
        let k = square(&self.k, "k")?;
        let m = square(&self.m_noise, "m_noise")?;
        if k.nrows() != m.nrows() {
            return Err(CliError::Parse(format!("k is {0}x{0} but m_noise is {1}x{1}", k.nrows(), m.nrows())));
        }
        let d = match &self.d_bar {
            Some(d) => Displacement::from_slice(d)?,
            None => Displacement::zeros(k.nrows()),
        };
        Ok(GaussianChannel::new(k, m, d)?)
    }
}
