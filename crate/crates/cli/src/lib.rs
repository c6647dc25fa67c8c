//! File formats and error mapping for the `nfg` binary.

pub mod error;
pub mod files;
