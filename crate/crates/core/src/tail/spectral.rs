//! Extremal-angle (pseudo-polar) spectral samples for pixel pairs.

use serde::Serialize;

use crate::cdf::{plotting_positions, quantile_sorted};
use crate::error::{Error, Result};

pub const DEFAULT_RADIAL_Q: f64 = 0.95;
const MIN_SERIES_LEN: usize = 100;

/// Angles of the joint exceedances of one pixel pair on unit-Fréchet margins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSample {
    pub pair: Option<(usize, usize)>,
    /// `w = X_i / (X_i + X_j)` for every retained point, in input order.
    pub angles: Vec<f64>,
    /// Pseudo-radius threshold; retained points satisfy `X_i + X_j > u`.
    pub radial_threshold: f64,
    pub radial_q: f64,
    pub n_total: usize,
}

impl SpectralSample {
    pub fn n_retained(&self) -> usize {
        self.angles.len()
    }

    pub fn mean_angle(&self) -> Option<f64> {
        (!self.angles.is_empty())
            .then(|| self.angles.iter().sum::<f64>() / self.angles.len() as f64)
    }

    /// Fraction of retained angles inside `[lo, hi]`.
    pub fn mass_within(&self, lo: f64, hi: f64) -> f64 {
        if self.angles.is_empty() {
            return 0.0;
        }
        let inside = self
            .angles
            .iter()
            .filter(|&&w| (lo..=hi).contains(&w))
            .count();
        inside as f64 / self.angles.len() as f64
    }
}

/// Maps a series to unit-Fréchet margins, `-1 / ln F(x)` with plotting-position `F`.
pub fn unit_frechet(series: &[f64]) -> Vec<f64> {
    plotting_positions(series)
        .into_iter()
        .map(|f| -1.0 / f.ln())
        .collect()
}

/// Pseudo-polar angles of the points whose pseudo-radius exceeds the
/// `radial_q` quantile of all pseudo-radii.
pub fn spectral_distribution(x_i: &[f64], x_j: &[f64], radial_q: f64) -> Result<SpectralSample> {
    if x_i.len() != x_j.len() {
        return Err(Error::Shape(format!(
            "series lengths differ: {} vs {}",
            x_i.len(),
            x_j.len()
        )));
    }
    if x_i.len() < MIN_SERIES_LEN {
        return Err(Error::InsufficientData(format!(
            "spectral distribution needs at least {MIN_SERIES_LEN} paired values, got {}",
            x_i.len()
        )));
    }
    if !(radial_q > 0.0 && radial_q < 1.0) {
        return Err(Error::Config(format!("radial_q must lie in (0, 1), got {radial_q}")));
    }
    for (name, s) in [("first", x_i), ("second", x_j)] {
        if s.iter().all(|&v| v == s[0]) {
            return Err(Error::InsufficientData(format!("{name} series is constant")));
        }
    }
    let fi = unit_frechet(x_i);
    let fj = unit_frechet(x_j);
    let radii: Vec<f64> = fi.iter().zip(&fj).map(|(a, b)| a + b).collect();
    let mut sorted = radii.clone();
    sorted.sort_by(f64::total_cmp);
    let u = quantile_sorted(&sorted, radial_q);
    let angles = fi
        .iter()
        .zip(&radii)
        .filter(|(_, &r)| r > u)
        .map(|(&a, &r)| a / r)
        .collect();
    Ok(SpectralSample {
        pair: None,
        angles,
        radial_threshold: u,
        radial_q,
        n_total: x_i.len(),
    })
}

/// Wasserstein-1 distance between two 1-D empirical distributions,
/// `integral_0^1 |Q_a(u) - Q_b(u)| du` over their quantile functions.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("Wasserstein distance of an empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(wasserstein_sorted(&a, &b))
}

/// As [`wasserstein_1d`] on inputs that are already sorted ascending.
pub(crate) fn wasserstein_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    if na == nb {
        return a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / na as f64;
    }
    // Quantile breakpoints are i/na and j/nb; compare (i+1)*nb with (j+1)*na.
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0usize; // position in units of 1/(na*nb)
    let mut acc = 0.0;
    while i < na && j < nb {
        let ea = (i + 1) * nb;
        let eb = (j + 1) * na;
        let next = ea.min(eb);
        acc += (next - prev) as f64 * (a[i] - b[j]).abs();
        prev = next;
        if ea == next {
            i += 1;
        }
        if eb == next {
            j += 1;
        }
    }
    acc / (na * nb) as f64
}

/// Wasserstein-1 distance between the angle samples of two pairs.
pub fn spectral_wasserstein(a: &SpectralSample, b: &SpectralSample) -> Result<f64> {
    if a.angles.is_empty() || b.angles.is_empty() {
        return Err(Error::InsufficientData("spectral sample retained no points".into()));
    }
    wasserstein_1d(&a.angles, &b.angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(angles: Vec<f64>) -> SpectralSample {
        SpectralSample {
            pair: None,
            angles,
            radial_threshold: 0.0,
            radial_q: 0.95,
            n_total: 0,
        }
    }

    #[test]
    fn comonotone_pair_sits_at_one_half() {
        let x: Vec<f64> = (0..500).map(|k| ((k * 7919) % 500) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0).collect();
        let s = spectral_distribution(&x, &y, 0.95).unwrap();
        assert!(s.n_retained() > 0);
        assert_eq!(s.mass_within(0.4, 0.6), 1.0);
        assert!((s.mean_angle().unwrap() - 0.5).abs() < 1e-12);
        assert!(s.angles.iter().all(|&w| (0.0..=1.0).contains(&w)));
    }

    #[test]
    fn retained_points_exceed_radius_threshold() {
        let x: Vec<f64> = (0..300).map(|k| ((k * 31) % 300) as f64).collect();
        let y: Vec<f64> = (0..300).map(|k| ((k * 17 + 5) % 300) as f64).collect();
        let s = spectral_distribution(&x, &y, 0.9).unwrap();
        let fx = unit_frechet(&x);
        let fy = unit_frechet(&y);
        let kept = fx
            .iter()
            .zip(&fy)
            .filter(|(a, b)| *a + *b > s.radial_threshold)
            .count();
        assert_eq!(kept, s.n_retained());
        assert!(s.n_retained() <= 30);
    }

    #[test]
    fn input_validation() {
        let x: Vec<f64> = (0..50).map(f64::from).collect();
        assert!(matches!(
            spectral_distribution(&x, &x, 0.95),
            Err(Error::InsufficientData(_))
        ));
        let x: Vec<f64> = (0..120).map(f64::from).collect();
        let c = vec![1.0; 120];
        assert!(spectral_distribution(&x, &c, 0.95).is_err());
        assert!(matches!(
            spectral_distribution(&x, &x[..119], 0.95),
            Err(Error::Shape(_))
        ));
        assert!(spectral_distribution(&x, &x, 1.0).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        let a = sample(vec![0.2, 0.5, 0.9]);
        assert_eq!(spectral_wasserstein(&a, &a).unwrap(), 0.0);
        let zero = sample(vec![0.0]);
        let one = sample(vec![1.0]);
        assert_eq!(spectral_wasserstein(&zero, &one).unwrap(), 1.0);
        // uniform grid on [0, 1] against a point mass at 1/2:
        // integral_0^1 |u - 1/2| du = 1/4
        let n = 10_000;
        let uniform = sample((0..n).map(|k| (k as f64 + 0.5) / n as f64).collect());
        let half = sample(vec![0.5]);
        assert!((spectral_wasserstein(&uniform, &half).unwrap() - 0.25).abs() < 1e-12);
        assert!(spectral_wasserstein(&sample(vec![]), &half).is_err());
    }

    #[test]
    fn unequal_sizes_agree_with_replication() {
        // Replicating each point k times leaves the distribution unchanged.
        let a = vec![0.1, 0.4, 0.35, 0.8];
        let b = vec![0.3, 0.9, 0.05];
        let a3: Vec<f64> = a.iter().flat_map(|&v| [v; 3]).collect();
        let b4: Vec<f64> = b.iter().flat_map(|&v| [v; 4]).collect();
        let direct = wasserstein_1d(&a, &b).unwrap();
        let replicated = wasserstein_1d(&a3, &b4).unwrap();
        assert!((direct - replicated).abs() < 1e-12);
    }
}
