//! How many pixels exceed their local threshold at the same time.

use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::risk::ThresholdMap;
use crate::tensor::EnsembleTensor;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CooccurrenceHistogram {
    pub n_pixels: usize,
    pub n_snapshots: usize,
    /// `probabilities[k]` = fraction of snapshots with exactly `k` exceeding pixels.
    pub probabilities: Vec<f64>,
}

impl CooccurrenceHistogram {
    pub fn mean_count(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }
}

/// Counts, per `(sample, time)` snapshot, the pixels strictly above their
/// target threshold and returns the normalized histogram of those counts.
pub fn cooccurrence_histogram(
    t: &EnsembleTensor,
    thresholds: &ThresholdMap,
) -> Result<CooccurrenceHistogram> {
    let shape = t.shape();
    if thresholds.rows != shape.rows || thresholds.cols != shape.cols {
        return Err(Error::Shape(format!(
            "thresholds are {}x{}, tensor frames are {}x{}",
            thresholds.rows, thresholds.cols, shape.rows, shape.cols
        )));
    }
    let n = shape.pixels();
    let mut counts = vec![0u64; n + 1];
    for frame in t.as_slice().chunks_exact(n) {
        let k = frame
            .iter()
            .zip(&thresholds.target)
            .filter(|(&x, &a)| x as f64 > a)
            .count();
        counts[k] += 1;
    }
    let total = shape.snapshots() as f64;
    Ok(CooccurrenceHistogram {
        n_pixels: n,
        n_snapshots: shape.snapshots(),
        probabilities: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

/// `Binomial(n, p)` probability mass for `k = 0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Result<Vec<f64>> {
    let dist = Binomial::new(p, n as u64)
        .map_err(|e| Error::Config(format!("binomial({n}, {p}): {e}")))?;
    Ok((0..=n as u64).map(|k| dist.pmf(k)).collect())
}

/// Total-variation distance `0.5 * sum |a_k - b_k|`; the shorter vector is
/// padded with zeros.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    0.5 * (0..len)
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    #[test]
    fn thresholds_below_everything_put_all_mass_at_n() {
        let t = EnsembleTensor::from_fn(Shape::new(2, 3, 2, 2), |s, t, r, c| {
            (s + t + r + c) as f32
        })
        .unwrap();
        let thr = ThresholdMap::from_targets(2, 2, vec![-1.0; 4]).unwrap();
        let h = cooccurrence_histogram(&t, &thr).unwrap();
        assert_eq!(h.probabilities, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(h.mean_count(), 4.0);
    }

    #[test]
    fn synchronized_field_has_mass_only_at_extremes() {
        let t = EnsembleTensor::from_fn(Shape::new(1, 50, 3, 3), |_, t, _, _| {
            if t % 10 == 0 {
                5.0
            } else {
                0.0
            }
        })
        .unwrap();
        let thr = ThresholdMap::from_targets(3, 3, vec![1.0; 9]).unwrap();
        let h = cooccurrence_histogram(&t, &thr).unwrap();
        assert!((h.probabilities[0] - 0.9).abs() < 1e-12);
        assert!((h.probabilities[9] - 0.1).abs() < 1e-12);
        assert!(h.probabilities[1..9].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn shape_mismatch() {
        let t = EnsembleTensor::zeros(Shape::new(1, 1, 2, 2));
        let thr = ThresholdMap::from_targets(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(
            cooccurrence_histogram(&t, &thr),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn binomial_pmf_matches_subset_enumeration() {
        for n in [1usize, 5, 12, 20] {
            let p = 0.01 + 0.03 * n as f64 / 20.0;
            let mut brute = vec![0.0; n + 1];
            for mask in 0u32..(1u32 << n) {
                let k = mask.count_ones() as usize;
                brute[k] += p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            }
            let pmf = binomial_pmf(n, p).unwrap();
            for k in 0..=n {
                assert!((pmf[k] - brute[k]).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn total_variation_basics() {
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_eq!(total_variation(&[1.0], &[0.0, 1.0]), 1.0);
    }
}
