//! Rank-based per-pixel CDFs.
//!
//! Every pixel's CDF pools all samples and time steps. Values map to the
//! plotting position `midrank / (N + 1)`, so `F` never reaches 0 or 1 and
//! tied observations share one value.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::EnsembleTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "empirical CDF needs at least 2 observations, got {}",
                values.len()
            )));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Plotting position of `x`: `(#{v < x} + (#{v == x} + 1) / 2) / (N + 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v < x);
        let upto = self.sorted.partition_point(|&v| v <= x);
        let ties = upto - below;
        (below as f64 + (ties as f64 + 1.0) / 2.0) / (self.sorted.len() as f64 + 1.0)
    }

    /// Number of observations `>= x`.
    pub fn count_at_least(&self, x: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v < x)
    }
}

/// CDF of one pixel of `t`, pooled over samples and time.
pub fn empirical_cdf(t: &EnsembleTensor, pixel: usize) -> Result<EmpiricalCdf> {
    let n = t.shape().pixels();
    if pixel >= n {
        return Err(Error::Shape(format!("pixel {pixel} outside {n} pixels")));
    }
    EmpiricalCdf::from_values(&t.pixel_series(pixel))
}

/// Mid-rank plotting positions of every element of `values`, in input order.
pub fn plotting_positions(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; n];
    let denom = n as f64 + 1.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end share their mean
        let mid = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            out[k] = mid / denom;
        }
        start = end;
    }
    out
}

/// `F_i(x)` for every entry of `t`, laid out like the tensor's flat payload.
pub fn cdf_field(t: &EnsembleTensor) -> Result<Vec<f64>> {
    let shape = t.shape();
    let n = shape.pixels();
    if shape.snapshots() < 2 {
        return Err(Error::InsufficientData(format!(
            "per-pixel CDFs need at least 2 snapshots, got {}",
            shape.snapshots()
        )));
    }
    let per_pixel: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|p| plotting_positions(&t.pixel_series(p)))
        .collect();
    let mut out = vec![0.0; shape.len()];
    for (p, col) in per_pixel.into_iter().enumerate() {
        for (k, v) in col.into_iter().enumerate() {
            out[k * n + p] = v;
        }
    }
    Ok(out)
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
