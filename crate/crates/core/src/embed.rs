//! Dependence-enhanced space-time embedding (DeepX) and its SPATE baseline.
//!
//! For pixel `i` at step `t` of one sample, with `n` pixels per frame:
//!
//! ```text
//! b(t, t')  = exp(-|t - t'| / l)
//! past_i(t) = sum_{t' < t} b(t, t') x_i(t')
//! muA_i(t)  = [sum_j x_j(t)] past_i(t) / sum_j past_j(t)
//! muB_i(t)  = [sum_j k_ij(t) chi_ij x_j(t)] past_i(t) / sum_j past_j(t)
//! z_i(t)    = x_i(t) - (thetaA muA_i(t) + thetaB muB_i(t))
//! DeepX_i(t) = (n - 1) z_i(t) / sum_j z_j(t)^2 * sum_{j in N(i)} z_j(t)
//! ```
//!
//! `k_ij(t)` is 1 when both `F_i(x_i(t))` and `F_j(x_j(t))` exceed `q`, with
//! per-pixel CDFs pooled over the whole tensor. The denominator of `muB` is
//! deliberately the unweighted one. Sums over `j` in the expectations
//! include `j = i`.
//!
//! The first time step has no past and is defined as 0, as is any frame
//! whose squared-deviation sum falls below `denominator_epsilon`. Expectation
//! denominators with magnitude below `denominator_epsilon` are replaced by it.

use ndarray::{Array3, Array4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdf::cdf_field;
use crate::error::{Error, Result};
use crate::grid::Neighborhood;
use crate::tail::ExtremalMatrix;
use crate::tensor::{EnsembleTensor, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub theta_a: f64,
    pub theta_b: f64,
    /// Temporal kernel length `l`; `f64::INFINITY` weights all past steps equally.
    pub length_scale: f64,
    /// Extreme quantile for the joint-exceedance indicator.
    pub q: f64,
    pub neighborhood: Neighborhood,
    pub denominator_epsilon: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            theta_a: 0.5,
            theta_b: 0.5,
            length_scale: 2.0,
            q: 0.90,
            neighborhood: Neighborhood::Moore8,
            denominator_epsilon: 1e-8,
        }
    }
}

impl EmbeddingConfig {
    /// The SPATE baseline weights `(1, 0)`.
    pub fn baseline() -> Self {
        EmbeddingConfig {
            theta_a: 1.0,
            theta_b: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.theta_a) || !unit.contains(&self.theta_b) {
            return Err(Error::Config(format!(
                "theta_a and theta_b must lie in [0, 1], got {} and {}",
                self.theta_a, self.theta_b
            )));
        }
        if self.theta_a + self.theta_b <= 0.0 {
            return Err(Error::Config("theta_a + theta_b must be positive".into()));
        }
        if self.length_scale.is_nan() || self.length_scale <= 0.0 {
            return Err(Error::Config(format!(
                "length scale must be > 0, got {}",
                self.length_scale
            )));
        }
        // q = 0 is accepted: every observation then counts as extreme.
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::Config(format!("q must lie in [0, 1), got {}", self.q)));
        }
        if !(self.denominator_epsilon > 0.0 && self.denominator_epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "denominator_epsilon must be finite and > 0, got {}",
                self.denominator_epsilon
            )));
        }
        Ok(())
    }
}

/// Embedding values aligned with the source tensor plus the deviations
/// they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingField {
    pub values: Array4<f64>,
    pub deviations: Array4<f64>,
    /// Expectation denominators replaced by epsilon, and frames zeroed
    /// because their squared-deviation sum was below epsilon.
    pub guarded_denominators: usize,
    pub degenerate_frames: usize,
    /// Joint exceedances whose chi entry was missing (weighted as 0).
    pub missing_chi_used: usize,
}

impl EmbeddingField {
    pub fn to_tensor(&self) -> Result<EnsembleTensor> {
        EnsembleTensor::new(self.values.mapv(|v| v as f32))
    }
}

/// Temporal kernel sums and spatial totals for one sample.
struct SampleTerms {
    n: usize,
    time: usize,
    x: Vec<f64>,
    /// `past[t * n + i]`
    past: Vec<f64>,
    /// Guarded `sum_j past_j(t)`.
    denom: Vec<f64>,
    spatial_sum: Vec<f64>,
    guarded: usize,
}

impl SampleTerms {
    fn new(t: &EnsembleTensor, sample: usize, length_scale: f64, eps: f64) -> Self {
        let shape = t.shape();
        let n = shape.pixels();
        let time = shape.time;
        let x = t.sample_vec(sample);
        let mut past = vec![0.0; time * n];
        let mut denom = vec![0.0; time];
        let mut spatial_sum = vec![0.0; time];
        let mut guarded = 0;
        for step in 0..time {
            spatial_sum[step] = x[step * n..(step + 1) * n].iter().sum();
            if step == 0 {
                continue;
            }
            let weights: Vec<f64> = (0..step)
                .map(|prev| (-((step - prev) as f64) / length_scale).exp())
                .collect();
            for i in 0..n {
                past[step * n + i] = weights
                    .iter()
                    .enumerate()
                    .map(|(prev, b)| b * x[prev * n + i])
                    .sum();
            }
            let d: f64 = past[step * n..(step + 1) * n].iter().sum();
            denom[step] = if d.abs() < eps {
                guarded += 1;
                eps
            } else {
                d
            };
        }
        SampleTerms {
            n,
            time,
            x,
            past,
            denom,
            spatial_sum,
            guarded,
        }
    }

    fn mu_a(&self) -> Vec<f64> {
        let mut mu = vec![0.0; self.time * self.n];
        for step in 1..self.time {
            for i in 0..self.n {
                let k = step * self.n + i;
                mu[k] = self.spatial_sum[step] * self.past[k] / self.denom[step];
            }
        }
        mu
    }

    /// `muB` given the tensor-wide CDF values of this sample's entries.
    fn mu_b(&self, cdf: &[f64], q: f64, chi: &ExtremalMatrix) -> (Vec<f64>, usize) {
        let n = self.n;
        let mut mu = vec![0.0; self.time * n];
        let mut missing = 0;
        for step in 1..self.time {
            let base = step * n;
            let extreme: Vec<usize> = (0..n).filter(|&j| cdf[base + j] > q).collect();
            for &i in &extreme {
                let mut weighted = 0.0;
                for &j in &extreme {
                    if chi.get(i, j).is_none() {
                        missing += 1;
                    }
                    weighted += chi.weight(i, j) * self.x[base + j];
                }
                mu[base + i] = weighted * self.past[base + i] / self.denom[step];
            }
        }
        (mu, missing)
    }
}

fn check_inputs(t: &EnsembleTensor, cfg: &EmbeddingConfig, sample: usize) -> Result<()> {
    cfg.validate()?;
    let shape = t.shape();
    if sample >= shape.samples {
        return Err(Error::Shape(format!(
            "sample {sample} outside {} samples",
            shape.samples
        )));
    }
    if shape.time < 2 {
        return Err(Error::InsufficientData(
            "space-time expectations need at least 2 time steps".into(),
        ));
    }
    Ok(())
}

fn check_chi(t: &EnsembleTensor, chi: &ExtremalMatrix) -> Result<()> {
    let n = t.shape().pixels();
    if chi.n() != n {
        return Err(Error::Shape(format!(
            "chi matrix covers {} pixels, tensor has {n}",
            chi.n()
        )));
    }
    Ok(())
}

fn to_field(shape: Shape, v: Vec<f64>) -> Array3<f64> {
    Array3::from_shape_vec((shape.time, shape.rows, shape.cols), v)
        .expect("length matches one sample")
}

/// `muA` for one sample as a `(time, rows, cols)` field; step 0 is 0.
pub fn spacetime_expectation_a(
    t: &EnsembleTensor,
    cfg: &EmbeddingConfig,
    sample: usize,
) -> Result<Array3<f64>> {
    check_inputs(t, cfg, sample)?;
    let terms = SampleTerms::new(t, sample, cfg.length_scale, cfg.denominator_epsilon);
    Ok(to_field(t.shape(), terms.mu_a()))
}

/// `muB` for one sample as a `(time, rows, cols)` field; step 0 is 0.
pub fn spacetime_expectation_b(
    t: &EnsembleTensor,
    cfg: &EmbeddingConfig,
    chi: &ExtremalMatrix,
    sample: usize,
) -> Result<Array3<f64>> {
    check_inputs(t, cfg, sample)?;
    check_chi(t, chi)?;
    let cdf = cdf_field(t)?;
    let shape = t.shape();
    let len = shape.time * shape.pixels();
    let terms = SampleTerms::new(t, sample, cfg.length_scale, cfg.denominator_epsilon);
    let (mu, _) = terms.mu_b(&cdf[sample * len..(sample + 1) * len], cfg.q, chi);
    Ok(to_field(shape, mu))
}

struct SampleEmbedding {
    values: Vec<f64>,
    deviations: Vec<f64>,
    guarded: usize,
    degenerate: usize,
    missing: usize,
}

fn embed_deviations(
    z: Vec<f64>,
    n: usize,
    time: usize,
    adjacency: &[Vec<usize>],
    eps: f64,
) -> (Vec<f64>, usize) {
    let mut values = vec![0.0; time * n];
    let mut degenerate = 0;
    for step in 1..time {
        let frame = &z[step * n..(step + 1) * n];
        let ss: f64 = frame.iter().map(|v| v * v).sum();
        if ss < eps {
            degenerate += 1;
            continue;
        }
        let scale = (n as f64 - 1.0) / ss;
        for i in 0..n {
            let neighbor_sum: f64 = adjacency[i].iter().map(|&j| frame[j]).sum();
            values[step * n + i] = scale * frame[i] * neighbor_sum;
        }
    }
    (values, degenerate)
}

fn assemble(shape: Shape, parts: Vec<SampleEmbedding>) -> EmbeddingField {
    let dims = (shape.samples, shape.time, shape.rows, shape.cols);
    let mut values = Vec::with_capacity(shape.len());
    let mut deviations = Vec::with_capacity(shape.len());
    let (mut guarded, mut degenerate, mut missing) = (0, 0, 0);
    for p in parts {
        values.extend(p.values);
        deviations.extend(p.deviations);
        guarded += p.guarded;
        degenerate += p.degenerate;
        missing += p.missing;
    }
    if guarded + degenerate > 0 {
        log::debug!("epsilon guard applied: {guarded} denominators, {degenerate} frames");
    }
    EmbeddingField {
        values: Array4::from_shape_vec(dims, values).expect("sizes match"),
        deviations: Array4::from_shape_vec(dims, deviations).expect("sizes match"),
        guarded_denominators: guarded,
        degenerate_frames: degenerate,
        missing_chi_used: missing,
    }
}

/// DeepX embedding of every sample of `t`.
pub fn deepx_metric(
    t: &EnsembleTensor,
    cfg: &EmbeddingConfig,
    chi: &ExtremalMatrix,
) -> Result<EmbeddingField> {
    check_inputs(t, cfg, 0)?;
    check_chi(t, chi)?;
    let shape = t.shape();
    let (n, time) = (shape.pixels(), shape.time);
    let len = time * n;
    let cdf = cdf_field(t)?;
    let adjacency = cfg.neighborhood.adjacency(shape.rows, shape.cols);
    let eps = cfg.denominator_epsilon;

    let parts: Vec<SampleEmbedding> = (0..shape.samples)
        .into_par_iter()
        .map(|s| {
            let terms = SampleTerms::new(t, s, cfg.length_scale, eps);
            let mu_a = terms.mu_a();
            let (mu_b, missing) = terms.mu_b(&cdf[s * len..(s + 1) * len], cfg.q, chi);
            let mut z = vec![0.0; len];
            for k in n..len {
                z[k] = terms.x[k] - (cfg.theta_a * mu_a[k] + cfg.theta_b * mu_b[k]);
            }
            let (values, degenerate) = embed_deviations(z.clone(), n, time, &adjacency, eps);
            SampleEmbedding {
                values,
                deviations: z,
                guarded: terms.guarded,
                degenerate,
                missing,
            }
        })
        .collect();
    Ok(assemble(shape, parts))
}

/// SPATE baseline: deviations from `muA` only, no tail-dependence term.
pub fn spate_metric(
    t: &EnsembleTensor,
    length_scale: f64,
    neighborhood: Neighborhood,
    denominator_epsilon: f64,
) -> Result<EmbeddingField> {
    let cfg = EmbeddingConfig {
        length_scale,
        neighborhood,
        denominator_epsilon,
        ..EmbeddingConfig::baseline()
    };
    check_inputs(t, &cfg, 0)?;
    let shape = t.shape();
    let (n, time) = (shape.pixels(), shape.time);
    let adjacency = neighborhood.adjacency(shape.rows, shape.cols);
    let parts: Vec<SampleEmbedding> = (0..shape.samples)
        .into_par_iter()
        .map(|s| {
            let terms = SampleTerms::new(t, s, length_scale, denominator_epsilon);
            let mu = terms.mu_a();
            let mut z = vec![0.0; time * n];
            for k in n..time * n {
                z[k] = terms.x[k] - mu[k];
            }
            let (values, degenerate) =
                embed_deviations(z.clone(), n, time, &adjacency, denominator_epsilon);
            SampleEmbedding {
                values,
                deviations: z,
                guarded: terms.guarded,
                degenerate,
                missing: 0,
            }
        })
        .collect();
    Ok(assemble(shape, parts))
}
