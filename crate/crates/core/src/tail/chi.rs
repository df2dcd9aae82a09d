//! Empirical extremal correlation between pixels.

use rayon::prelude::*;
use serde::Serialize;

use crate::cdf::cdf_field;
use crate::error::{Error, Result};
use crate::tensor::{EnsembleTensor, Shape};

/// Pairwise upper-tail dependence estimates.
///
/// `chi(i, j)` estimates `P(F_i > q | F_j > q)`, conditioning on the column
/// pixel `j`. A pair whose conditioning pixel never exceeds `q` is missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalMatrix {
    n: usize,
    q: f64,
    /// Row-major `n x n`; `NaN` marks a missing pair.
    chi: Vec<f64>,
    /// Joint exceedance counts, row-major; empty for hand-set matrices.
    joint: Vec<u64>,
    /// Marginal exceedance counts per pixel; empty for hand-set matrices.
    marginal: Vec<u64>,
}

impl ExtremalMatrix {
    /// Wraps hand-set values. `None` entries are missing pairs.
    pub fn from_values(n: usize, q: f64, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Shape(format!(
                "{} chi values for {n} pixels",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Config(format!("chi value {bad} outside [0, 1]")));
        }
        Ok(ExtremalMatrix {
            n,
            q,
            chi: values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
            joint: Vec::new(),
            marginal: Vec::new(),
        })
    }

    /// A constant matrix; handy for degenerate-case checks.
    pub fn constant(n: usize, q: f64, value: f64) -> Result<Self> {
        Self::from_values(n, q, vec![Some(value); n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.chi[i * self.n + j];
        (!v.is_nan()).then_some(v)
    }

    /// Weight used inside expectations: missing pairs contribute nothing.
    #[inline]
    pub(crate) fn weight(&self, i: usize, j: usize) -> f64 {
        let v = self.chi[i * self.n + j];
        if v.is_nan() {
            0.0
        } else {
            v
        }
    }

    /// Average of the two conditioning directions, or whichever is defined.
    pub fn symmetrized(&self, i: usize, j: usize) -> Option<f64> {
        match (self.get(i, j), self.get(j, i)) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            (a, b) => a.or(b),
        }
    }

    pub fn joint_count(&self, i: usize, j: usize) -> Option<u64> {
        self.joint.get(i * self.n + j).copied()
    }

    pub fn exceedance_count(&self, i: usize) -> Option<u64> {
        self.marginal.get(i).copied()
    }

    pub fn n_missing(&self) -> usize {
        self.chi.iter().filter(|v| v.is_nan()).count()
    }

    /// Rank-4 tensor `(1, 1, n, n)`; missing pairs are written as `-1`.
    pub fn to_tensor(&self) -> EnsembleTensor {
        let vals = self
            .chi
            .iter()
            .map(|&v| if v.is_nan() { -1.0 } else { v as f32 })
            .collect();
        EnsembleTensor::from_vec(Shape::new(1, 1, self.n, self.n), vals)
            .expect("chi values are finite after sentinel substitution")
    }

    /// Inverse of [`ExtremalMatrix::to_tensor`].
    pub fn from_tensor(t: &EnsembleTensor, q: f64) -> Result<Self> {
        let s = t.shape();
        if s.samples != 1 || s.time != 1 || s.rows != s.cols {
            return Err(Error::Shape(format!(
                "chi tensor must be (1, 1, n, n), got {s:?}"
            )));
        }
        let vals = t
            .as_slice()
            .iter()
            .map(|&v| (v >= 0.0).then_some(v as f64))
            .collect();
        Self::from_values(s.rows, q, vals)
    }
}

fn min_pooled_size(q: f64) -> usize {
    (10.0 / (1.0 - q) - 1e-9).ceil() as usize
}

/// Per-pixel exceedance indicators `F_i(x) > q` packed into `u64` words.
fn exceedance_bits(f: &[f64], n: usize, q: f64) -> Vec<Vec<u64>> {
    let obs = f.len() / n;
    let words = obs.div_ceil(64);
    (0..n)
        .into_par_iter()
        .map(|p| {
            let mut bits = vec![0u64; words];
            for k in 0..obs {
                if f[k * n + p] > q {
                    bits[k / 64] |= 1 << (k % 64);
                }
            }
            bits
        })
        .collect()
}

/// Empirical extremal correlation for every ordered pixel pair.
///
/// Requires at least `10 / (1 - q)` pooled observations per pixel.
pub fn extremal_correlation(t: &EnsembleTensor, q: f64) -> Result<ExtremalMatrix> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Config(format!("q must lie in (0, 1), got {q}")));
    }
    let shape = t.shape();
    let need = min_pooled_size(q);
    if shape.snapshots() < need {
        return Err(Error::InsufficientData(format!(
            "q = {q} needs at least {need} observations per pixel, got {}",
            shape.snapshots()
        )));
    }
    let n = shape.pixels();
    let f = cdf_field(t)?;
    let bits = exceedance_bits(&f, n, q);
    let marginal: Vec<u64> = bits
        .iter()
        .map(|b| b.iter().map(|w| w.count_ones() as u64).sum())
        .collect();

    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    bits[i]
                        .iter()
                        .zip(&bits[j])
                        .map(|(a, b)| (a & b).count_ones() as u64)
                        .sum()
                })
                .collect()
        })
        .collect();
    let joint: Vec<u64> = rows.into_iter().flatten().collect();
    let chi = joint
        .iter()
        .enumerate()
        .map(|(k, &jn)| {
            let cond = marginal[k % n];
            if cond == 0 {
                f64::NAN
            } else {
                jn as f64 / cond as f64
            }
        })
        .collect();
    Ok(ExtremalMatrix {
        n,
        q,
        chi,
        joint,
        marginal,
    })
}

/// Root mean squared difference over off-diagonal pairs defined in both.
pub fn chi_rmse(real: &ExtremalMatrix, gen: &ExtremalMatrix) -> Result<f64> {
    if real.n != gen.n {
        return Err(Error::Shape(format!(
            "chi matrices cover {} and {} pixels",
            real.n, gen.n
        )));
    }
    if (real.q - gen.q).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "chi matrices use different quantiles {} and {}",
            real.q, gen.q
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..real.n {
        for j in 0..real.n {
            if i == j {
                continue;
            }
            if let (Some(a), Some(b)) = (real.get(i, j), gen.get(i, j)) {
                sum += (a - b) * (a - b);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::Undefined("no off-diagonal pair defined in both matrices".into()));
    }
    Ok((sum / count as f64).sqrt())
}
