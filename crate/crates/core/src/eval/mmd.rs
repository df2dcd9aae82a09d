//! Unbiased squared maximum mean discrepancy with a Gaussian kernel.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::EnsembleTensor;

/// Gaussian kernel `exp(-|a - c|^2 / (2 sigma^2))` bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum KernelConfig {
    /// Fixed `sigma^2`.
    Bandwidth(f64),
    /// `sigma^2` = median squared distance over all distinct pooled pairs.
    #[default]
    MedianHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MmdResult {
    pub mmd2: f64,
    pub sigma2: f64,
    pub m_x: usize,
    pub m_y: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_sets(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<usize> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "MMD needs at least 2 samples per set, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let d = x[0].len();
    if let Some(bad) = x.iter().chain(y).find(|v| v.len() != d) {
        return Err(Error::Shape(format!(
            "sample dimension mismatch: {} vs {d}",
            bad.len()
        )));
    }
    Ok(d)
}

fn median_heuristic(pool: &[&[f64]]) -> Result<f64> {
    let mut d: Vec<f64> = (0..pool.len())
        .into_par_iter()
        .flat_map_iter(|a| (a + 1..pool.len()).map(move |c| sq_dist(pool[a], pool[c])))
        .collect();
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let med = if d.len().is_multiple_of(2) {
        0.5 * (d[mid - 1] + d[mid])
    } else {
        d[mid]
    };
    if med > 0.0 {
        Ok(med)
    } else {
        Err(Error::Undefined("median pairwise distance is zero".into()))
    }
}

fn resolve_sigma2(k: KernelConfig, pool: &[&[f64]]) -> Result<f64> {
    match k {
        KernelConfig::Bandwidth(s) if s > 0.0 && s.is_finite() => Ok(s),
        KernelConfig::Bandwidth(s) => Err(Error::Config(format!("kernel bandwidth must be > 0, got {s}"))),
        KernelConfig::MedianHeuristic => median_heuristic(pool),
    }
}

/// Kernel matrix of the pooled points.
fn gram(pool: &[&[f64]], sigma2: f64) -> Vec<Vec<f64>> {
    pool.par_iter()
        .map(|a| {
            pool.iter()
                .map(|c| (-sq_dist(a, c) / (2.0 * sigma2)).exp())
                .collect()
        })
        .collect()
}

/// Unbiased MMD^2 from a pooled Gram matrix and a split into the two sets.
fn mmd2_from_gram(g: &[Vec<f64>], xs: &[usize], ys: &[usize]) -> f64 {
    let within = |idx: &[usize]| -> f64 {
        let m = idx.len() as f64;
        let s: f64 = idx
            .iter()
            .map(|&a| idx.iter().filter(|&&c| c != a).map(|&c| g[a][c]).sum::<f64>())
            .sum();
        s / (m * (m - 1.0))
    };
    let cross: f64 = xs
        .iter()
        .map(|&a| ys.iter().map(|&c| g[a][c]).sum::<f64>())
        .sum();
    within(xs) - 2.0 * cross / (xs.len() as f64 * ys.len() as f64) + within(ys)
}

/// Unbiased MMD^2: within-set sums skip the diagonal, the cross term does not.
pub fn mmd_squared(x: &[Vec<f64>], y: &[Vec<f64>], k: KernelConfig) -> Result<MmdResult> {
    check_sets(x, y)?;
    let pool: Vec<&[f64]> = x.iter().chain(y).map(|v| v.as_slice()).collect();
    let sigma2 = resolve_sigma2(k, &pool)?;
    let two_s2 = 2.0 * sigma2;
    let kern = |a: &[f64], c: &[f64]| (-sq_dist(a, c) / two_s2).exp();

    let within = |set: &[Vec<f64>]| -> f64 {
        let m = set.len() as f64;
        let rows: Vec<f64> = (0..set.len())
            .into_par_iter()
            .map(|a| {
                (0..set.len())
                    .filter(|&c| c != a)
                    .map(|c| kern(&set[a], &set[c]))
                    .sum()
            })
            .collect();
        rows.iter().sum::<f64>() / (m * (m - 1.0))
    };
    let cross_rows: Vec<f64> = x
        .par_iter()
        .map(|a| y.iter().map(|c| kern(a, c)).sum())
        .collect();
    let cross = cross_rows.iter().sum::<f64>() / (x.len() as f64 * y.len() as f64);
    Ok(MmdResult {
        mmd2: within(x) - 2.0 * cross + within(y),
        sigma2,
        m_x: x.len(),
        m_y: y.len(),
    })
}

/// Permutation p-value of the observed MMD^2: the fraction of random
/// relabelings of the pooled set whose statistic is at least as large.
pub fn mmd_permutation_test(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    k: KernelConfig,
    permutations: usize,
    seed: u64,
) -> Result<f64> {
    check_sets(x, y)?;
    let pool: Vec<&[f64]> = x.iter().chain(y).map(|v| v.as_slice()).collect();
    let sigma2 = resolve_sigma2(k, &pool)?;
    let g = gram(&pool, sigma2);
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    let observed = mmd2_from_gram(&g, &idx[..x.len()], &idx[x.len()..]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut at_least = 0usize;
    for _ in 0..permutations {
        idx.shuffle(&mut rng);
        let stat = mmd2_from_gram(&g, &idx[..x.len()], &idx[x.len()..]);
        if stat >= observed {
            at_least += 1;
        }
    }
    Ok((at_least + 1) as f64 / (permutations + 1) as f64)
}

/// One flattened `time * rows * cols` vector per sample.
pub fn tensor_samples(t: &EnsembleTensor) -> Vec<Vec<f64>> {
    (0..t.shape().samples).map(|s| t.sample_vec(s)).collect()
}
