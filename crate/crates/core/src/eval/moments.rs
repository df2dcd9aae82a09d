//! Per-pixel moments and marginal quantile bands, pooled over samples and time.

use ndarray::Array2;

use crate::cdf::quantile_sorted;
use crate::error::{Error, Result};
use crate::tensor::EnsembleTensor;

/// Per-pixel mean and population standard deviation.
pub fn moment_maps(t: &EnsembleTensor) -> (Array2<f64>, Array2<f64>) {
    let s = t.shape();
    let mut mean = Array2::zeros((s.rows, s.cols));
    let mut std = Array2::zeros((s.rows, s.cols));
    for p in 0..s.pixels() {
        let series = t.pixel_series(p);
        let n = series.len() as f64;
        let m = series.iter().sum::<f64>() / n;
        let var = series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
        mean[[p / s.cols, p % s.cols]] = m;
        std[[p / s.cols, p % s.cols]] = var.sqrt();
    }
    (mean, std)
}

/// Per-pixel empirical quantiles (linear interpolation between order
/// statistics), one map per requested level.
pub fn marginal_band(t: &EnsembleTensor, quantiles: &[f64]) -> Result<Vec<Array2<f64>>> {
    if quantiles.is_empty() {
        return Err(Error::Config("no quantile levels requested".into()));
    }
    if let Some(q) = quantiles.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(Error::Config(format!("quantile {q} outside (0, 1)")));
    }
    let s = t.shape();
    let mut maps = vec![Array2::zeros((s.rows, s.cols)); quantiles.len()];
    for p in 0..s.pixels() {
        let mut series = t.pixel_series(p);
        series.sort_by(f64::total_cmp);
        for (map, &q) in maps.iter_mut().zip(quantiles) {
            map[[p / s.cols, p % s.cols]] = quantile_sorted(&series, q);
        }
    }
    Ok(maps)
}
