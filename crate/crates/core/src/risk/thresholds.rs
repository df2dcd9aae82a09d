//! Record-breaking thresholds and their equal-severity neighbor counterparts.

use serde::{Deserialize, Serialize};

use crate::cdf::quantile_sorted;
use crate::error::{Error, Result};
use crate::grid::Neighborhood;
use crate::tensor::EnsembleTensor;

/// Per-pixel thresholds.
///
/// `target[i]` is the record value at pixel `i`. For every neighbor `j` of a
/// target `i`, `neighbor[i]` holds `(j, alpha)` where `alpha` is the value of
/// pixel `j` with the same pooled exceedance frequency (`>=`) as the record
/// at `i`. A map without neighbor entries falls back to each neighbor's own
/// target threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMap {
    pub rows: usize,
    pub cols: usize,
    pub target: Vec<f64>,
    /// Pooled frequency of `x >= target` in the reference data.
    pub target_exceedance: Vec<f64>,
    pub neighbor: Vec<Vec<(usize, f64)>>,
    pub neighborhood: Option<Neighborhood>,
    /// Length of the historical record, in years.
    pub record_length: Option<usize>,
}

impl ThresholdMap {
    /// Target thresholds only.
    pub fn from_targets(rows: usize, cols: usize, target: Vec<f64>) -> Result<Self> {
        if target.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} thresholds for a {rows}x{cols} grid",
                target.len()
            )));
        }
        Ok(ThresholdMap {
            rows,
            cols,
            target_exceedance: vec![f64::NAN; target.len()],
            target,
            neighbor: vec![Vec::new(); rows * cols],
            neighborhood: None,
            record_length: None,
        })
    }

    /// The same threshold everywhere.
    pub fn uniform(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_targets(rows, cols, vec![value; rows * cols]).expect("size matches")
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    /// Threshold applied at neighbor `j` when `i` is the target.
    pub fn neighbor_threshold(&self, i: usize, j: usize) -> f64 {
        self.neighbor[i]
            .iter()
            .find(|(k, _)| *k == j)
            .map(|&(_, a)| a)
            .unwrap_or(self.target[j])
    }

    /// Per-pixel `1-in-return_period` block threshold: the type-7 quantile at
    /// `1 - 1/return_period` of the block maxima. Blocks are consecutive runs
    /// of `block_len` snapshots in sample-major order; a trailing partial
    /// block is dropped.
    pub fn return_level(
        reference: &EnsembleTensor,
        block_len: usize,
        return_period: f64,
    ) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::Config("block length must be positive".into()));
        }
        if return_period.is_nan() || return_period <= 1.0 {
            return Err(Error::Config(format!(
                "return period must exceed 1, got {return_period}"
            )));
        }
        let s = reference.shape();
        let blocks = s.snapshots() / block_len;
        if blocks < 2 {
            return Err(Error::InsufficientData(format!(
                "{} snapshots give fewer than 2 blocks of {block_len}",
                s.snapshots()
            )));
        }
        let level = 1.0 - 1.0 / return_period;
        let target = (0..s.pixels())
            .map(|p| {
                let series = reference.pixel_series(p);
                let mut maxima: Vec<f64> = series
                    .chunks_exact(block_len)
                    .map(|b| b.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                maxima.sort_by(f64::total_cmp);
                quantile_sorted(&maxima, level)
            })
            .collect();
        Self::from_targets(s.rows, s.cols, target)
    }
}

/// Record thresholds from `reference` with rank-matched neighbor thresholds.
///
/// `record_length` is the number of years the reference covers; the
/// reference must contain at least that many snapshots.
pub fn build_thresholds(
    reference: &EnsembleTensor,
    record_length: usize,
    nb: Neighborhood,
) -> Result<ThresholdMap> {
    let s = reference.shape();
    if record_length == 0 {
        return Err(Error::Config("record length must be positive".into()));
    }
    if s.snapshots() < record_length {
        return Err(Error::InsufficientData(format!(
            "{} snapshots cannot cover a {record_length}-year record",
            s.snapshots()
        )));
    }
    let n = s.pixels();
    let total = s.snapshots();
    let mut sorted_desc = Vec::with_capacity(n);
    let mut target = Vec::with_capacity(n);
    let mut record_count = Vec::with_capacity(n);
    for p in 0..n {
        let mut series = reference.pixel_series(p);
        series.sort_by(|a, b| b.total_cmp(a));
        let max = series[0];
        let ties = series.iter().take_while(|&&v| v == max).count();
        if ties == total {
            let (r, c) = (p / s.cols, p % s.cols);
            return Err(Error::InsufficientData(format!(
                "pixel ({r}, {c}) is constant; its record cannot be exceeded selectively"
            )));
        }
        target.push(max);
        record_count.push(ties);
        sorted_desc.push(series);
    }
    let neighbor = (0..n)
        .map(|i| {
            nb.neighbors(s.rows, s.cols, i / s.cols, i % s.cols)
                .into_iter()
                .map(|j| {
                    // equal exceedance frequency: the record_count[i]-th largest value of j
                    let m = record_count[i].max(1);
                    (j, sorted_desc[j][m - 1])
                })
                .collect()
        })
        .collect();
    Ok(ThresholdMap {
        rows: s.rows,
        cols: s.cols,
        target,
        target_exceedance: record_count
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect(),
        neighbor,
        neighborhood: Some(nb),
        record_length: Some(record_length),
    })
}
