//! Distribution-level comparisons between real and generated ensembles.

mod mmd;
mod moments;
mod psd;
mod swd;

pub use mmd::{mmd_permutation_test, mmd_squared, tensor_samples, KernelConfig, MmdResult};
pub use moments::{marginal_band, moment_maps};
pub use psd::{radial_psd, RadialSpectrum};
pub use swd::{
    effective_levels, laplacian_pyramid, ms_swd, projected_shift_oracle, MsSwd, PyramidConfig,
};

use serde::Serialize;

/// Reporting schema for latent-inversion reconstruction losses computed by
/// an external generator trainer.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ReconstructionReport {
    pub model: String,
    pub case: String,
    pub max_iters: usize,
    pub learning_rate: f64,
    pub losses: Vec<f64>,
}

/// Median and quartiles of a loss sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSummary {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl ReconstructionReport {
    pub fn summary(&self) -> Option<BoxSummary> {
        if self.losses.is_empty() {
            return None;
        }
        let mut v = self.losses.clone();
        v.sort_by(f64::total_cmp);
        Some(BoxSummary {
            q1: crate::cdf::quantile_sorted(&v, 0.25),
            median: crate::cdf::quantile_sorted(&v, 0.5),
            q3: crate::cdf::quantile_sorted(&v, 0.75),
        })
    }
}
