//! Dependence-enhanced embeddings, tail-dependence diagnostics and
//! unseen-extreme risk probabilities for gridded ensembles.
//!
//! Ensembles are `(sample, time, row, col)` tensors of `f32` stored in a
//! small binary container ([`tensor`]). On top of them the crate provides
//! the DeepX embedding ([`embed`]), extremal correlation and related tail
//! statistics ([`tail`]), distribution-level comparisons ([`eval`]), an LGCP
//! simulator for count data ([`lgcp`]) and checkmate / stalemate risk
//! probabilities ([`risk`]).

pub mod cdf;
pub mod cli;
pub mod embed;
pub mod error;
pub mod eval;
pub mod grid;
pub mod lgcp;
pub mod risk;
pub mod tail;
pub mod tensor;
pub mod verify;

pub use embed::{deepx_metric, spate_metric, EmbeddingConfig, EmbeddingField};
pub use error::{Error, Result};
pub use grid::{GridMeta, Neighborhood};
pub use lgcp::{simulate_lgcp, LgcpConfig};
pub use tail::{extremal_correlation, ExtremalMatrix};
pub use tensor::{load_tensor, save_tensor, EnsembleTensor, Shape};
