//! Multi-scale sliced Wasserstein distance over Laplacian pyramids.
//!
//! Every frame of both ensembles is decomposed into a Laplacian pyramid.
//! At each level, square patches are drawn at seeded positions and
//! flattened; the distance at that level is the mean over random unit
//! directions of the 1-D Wasserstein-1 distance between the projected patch
//! sets. The reported value averages the levels.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tail::wasserstein_sorted;
use crate::tensor::EnsembleTensor;

const MIN_LEVEL_DIM: usize = 4;
const MIN_IMAGE_DIM: usize = 8;
const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PyramidConfig {
    pub levels: usize,
    pub projections: usize,
    pub patch_size: usize,
    pub patches_per_frame: usize,
    pub seed: u64,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        PyramidConfig {
            levels: 3,
            projections: 64,
            patch_size: 7,
            patches_per_frame: 64,
            seed: 0,
        }
    }
}

impl PyramidConfig {
    fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("pyramid needs at least one level".into()));
        }
        if self.projections < 16 {
            return Err(Error::Config(format!(
                "at least 16 projections per level required, got {}",
                self.projections
            )));
        }
        if self.patch_size == 0 || self.patches_per_frame == 0 {
            return Err(Error::Config("patch size and count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsSwd {
    pub distance: f64,
    pub per_level: Vec<f64>,
}

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * (n - 1) - i;
    }
    i.clamp(0, n - 1) as usize
}

fn blur(img: &Array2<f64>) -> Array2<f64> {
    let (h, w) = img.dim();
    let mut tmp = Array2::<f64>::zeros((h, w));
    for r in 0..h {
        for c in 0..w {
            tmp[[r, c]] = BINOMIAL5
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * img[[r, reflect(c as isize + k as isize - 2, w)]])
                .sum();
        }
    }
    let mut out = Array2::zeros((h, w));
    for r in 0..h {
        for c in 0..w {
            out[[r, c]] = BINOMIAL5
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * tmp[[reflect(r as isize + k as isize - 2, h), c]])
                .sum();
        }
    }
    out
}

fn downsample(img: &Array2<f64>) -> Array2<f64> {
    let b = blur(img);
    let (h, w) = img.dim();
    Array2::from_shape_fn((h.div_ceil(2), w.div_ceil(2)), |(r, c)| b[[2 * r, 2 * c]])
}

fn upsample(img: &Array2<f64>, h: usize, w: usize) -> Array2<f64> {
    let mut z = Array2::zeros((h, w));
    for ((r, c), v) in img.indexed_iter() {
        if 2 * r < h && 2 * c < w {
            z[[2 * r, 2 * c]] = 4.0 * v;
        }
    }
    blur(&z)
}

/// Number of pyramid levels actually used: no level may have a side below 4.
pub fn effective_levels(rows: usize, cols: usize, requested: usize) -> usize {
    let (mut h, mut w) = (rows, cols);
    let mut n = 1;
    while n < requested {
        let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
        if nh.min(nw) < MIN_LEVEL_DIM {
            break;
        }
        h = nh;
        w = nw;
        n += 1;
    }
    n
}

/// Laplacian pyramid, finest first; the last level is the low-pass residual.
pub fn laplacian_pyramid(img: &Array2<f64>, levels: usize) -> Vec<Array2<f64>> {
    let mut out = Vec::with_capacity(levels);
    let mut current = img.clone();
    for _ in 1..levels {
        let down = downsample(&current);
        let (h, w) = current.dim();
        out.push(&current - &upsample(&down, h, w));
        current = down;
    }
    out.push(current);
    out
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn patch_positions(cfg: &PyramidConfig, level: usize, frame: usize, h: usize, w: usize, p: usize) -> Vec<(usize, usize)> {
    let stream = ((level as u64) << 40) | frame as u64;
    let mut rng = rng_for(cfg.seed, stream);
    (0..cfg.patches_per_frame)
        .map(|_| (rng.random_range(0..=h - p), rng.random_range(0..=w - p)))
        .collect()
}

fn directions(cfg: &PyramidConfig, level: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = rng_for(cfg.seed, (1u64 << 63) | level as u64);
    (0..cfg.projections)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

fn frames(t: &EnsembleTensor) -> Vec<Array2<f64>> {
    let s = t.shape();
    (0..s.samples)
        .flat_map(|i| (0..s.time).map(move |j| (i, j)))
        .map(|(i, j)| t.frame(i, j).mapv(|v| v as f64))
        .collect()
}

/// Patch descriptors per level for every frame of an ensemble.
fn descriptors(t: &EnsembleTensor, cfg: &PyramidConfig, levels: usize) -> Vec<Vec<Vec<f64>>> {
    let per_frame: Vec<Vec<Vec<Vec<f64>>>> = frames(t)
        .par_iter()
        .enumerate()
        .map(|(f, img)| {
            laplacian_pyramid(img, levels)
                .iter()
                .enumerate()
                .map(|(lvl, band)| {
                    let (h, w) = band.dim();
                    let p = cfg.patch_size.min(h).min(w);
                    patch_positions(cfg, lvl, f, h, w, p)
                        .into_iter()
                        .map(|(r0, c0)| {
                            let mut d = Vec::with_capacity(p * p);
                            for r in r0..r0 + p {
                                for c in c0..c0 + p {
                                    d.push(band[[r, c]]);
                                }
                            }
                            d
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (0..levels)
        .map(|lvl| per_frame.iter().flat_map(|f| f[lvl].iter().cloned()).collect())
        .collect()
}

fn projected_sorted(set: &[Vec<f64>], dir: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = set
        .iter()
        .map(|d| d.iter().zip(dir).map(|(a, b)| a * b).sum())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Multi-scale sliced Wasserstein distance between the frames of two ensembles.
pub fn ms_swd(x: &EnsembleTensor, y: &EnsembleTensor, cfg: &PyramidConfig) -> Result<MsSwd> {
    cfg.validate()?;
    let (sx, sy) = (x.shape(), y.shape());
    if (sx.rows, sx.cols) != (sy.rows, sy.cols) {
        return Err(Error::Shape(format!(
            "frame shapes differ: {}x{} vs {}x{}",
            sx.rows, sx.cols, sy.rows, sy.cols
        )));
    }
    if sx.rows.min(sx.cols) < MIN_IMAGE_DIM {
        return Err(Error::Shape(format!(
            "frames must be at least {MIN_IMAGE_DIM}x{MIN_IMAGE_DIM}, got {}x{}",
            sx.rows, sx.cols
        )));
    }
    let levels = effective_levels(sx.rows, sx.cols, cfg.levels);
    let dx = descriptors(x, cfg, levels);
    let dy = descriptors(y, cfg, levels);
    let per_level: Vec<f64> = (0..levels)
        .map(|lvl| {
            let dim = dx[lvl][0].len();
            let dists: Vec<f64> = directions(cfg, lvl, dim)
                .par_iter()
                .map(|u| wasserstein_sorted(&projected_sorted(&dx[lvl], u), &projected_sorted(&dy[lvl], u)))
                .collect();
            dists.iter().sum::<f64>() / dists.len() as f64
        })
        .collect();
    Ok(MsSwd {
        distance: per_level.iter().sum::<f64>() / levels as f64,
        per_level,
    })
}

/// Mean over the seeded directions of `|sum(u)|` at level 0: the distance a
/// uniform unit shift produces when only the low-pass level is used.
pub fn projected_shift_oracle(cfg: &PyramidConfig, rows: usize, cols: usize) -> f64 {
    let p = cfg.patch_size.min(rows).min(cols);
    let dirs = directions(cfg, 0, p * p);
    dirs.iter().map(|u| u.iter().sum::<f64>().abs()).sum::<f64>() / dirs.len() as f64
}
