//! Protograph LDPC convolutional codes over erasure channels: ensemble
//! construction, density-evolution thresholds, stopping-set spans, finite
//! length decoding and Monte Carlo benchmarking.

pub mod bench;
pub mod channel;
pub mod code;
pub mod dethresh;
pub mod error;
pub mod poly;
pub mod presets;
pub mod protograph;
pub mod stopspan;

pub use error::{Error, Result};
pub use poly::Polynomial;
pub use protograph::{BaseMatrix, Ensemble};
