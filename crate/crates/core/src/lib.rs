//! Fidelity-based, Gaussian-unitary-induced correlation `N_F^G` for
//! continuous-variable Gaussian states, computed from covariance matrices.

pub mod error;
pub mod families;
pub mod gaussian;
mod linalg;
pub mod correlation;
pub mod overlap;
pub mod random;

pub use error::{NfgError, Result};
pub use linalg::{block_rotation, rotation};
