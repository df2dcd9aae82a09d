//! Tail-dependence diagnostics: extremal correlation, extremal-angle
//! spectral samples, rank correlation, co-occurrence counts and joint
//! return periods.

mod chi;
mod cooccur;
mod rank;
mod returns;
mod spectral;

pub use chi::{chi_rmse, extremal_correlation, ExtremalMatrix};
pub use cooccur::{binomial_pmf, cooccurrence_histogram, total_variation, CooccurrenceHistogram};
pub use rank::{kendall_tau, kendall_tau_b, spearman_rho, RankCorrelation};
pub use returns::{bivariate_return_amplification, joint_return_period};
pub use spectral::{
    spectral_distribution, spectral_wasserstein, unit_frechet, wasserstein_1d, SpectralSample,
    DEFAULT_RADIAL_Q,
};

pub(crate) use spectral::wasserstein_sorted;
