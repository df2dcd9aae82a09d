//! Radially averaged power spectral density of 2-D frames.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::EnsembleTensor;

const MIN_SIDE: usize = 8;

/// Power per integer radial wavenumber.
///
/// The periodogram is normalized as `|F(k)|^2 / (rows * cols)^2`, so that the
/// sum of all periodogram cells is the frame's mean square (Parseval).
/// `power[k]` is the mean over the `counts[k]` cells of annulus `k`, then
/// averaged over all frames.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSpectrum {
    pub wavenumbers: Vec<usize>,
    pub power: Vec<f64>,
    pub counts: Vec<usize>,
}

impl RadialSpectrum {
    /// `sum_k power[k] * counts[k]`, equal to the mean square of the frames.
    pub fn total_power(&self) -> f64 {
        self.power
            .iter()
            .zip(&self.counts)
            .map(|(p, &c)| p * c as f64)
            .sum()
    }

    pub fn peak_wavenumber(&self) -> usize {
        self.power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| self.wavenumbers[k])
            .unwrap_or(0)
    }
}

fn signed_freq(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Annulus index of every periodogram cell, row-major.
fn radial_bins(rows: usize, cols: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let ky = signed_freq(r, rows);
            let kx = signed_freq(c, cols);
            out.push((kx * kx + ky * ky).sqrt().round() as usize);
        }
    }
    out
}

struct Fft2 {
    rows: usize,
    cols: usize,
    row_fft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            row_fft: planner.plan_fft_forward(cols),
            col_fft: planner.plan_fft_forward(rows),
        }
    }

    /// Periodogram `|F|^2 / (rows * cols)^2`, row-major.
    fn periodogram(&self, frame: &[f64]) -> Vec<f64> {
        let (h, w) = (self.rows, self.cols);
        let mut data: Vec<Complex<f64>> = frame.iter().map(|&v| Complex::new(v, 0.0)).collect();
        for row in data.chunks_exact_mut(w) {
            self.row_fft.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); h];
        for c in 0..w {
            for r in 0..h {
                col[r] = data[r * w + c];
            }
            self.col_fft.process(&mut col);
            for r in 0..h {
                data[r * w + c] = col[r];
            }
        }
        let norm = ((h * w) as f64).powi(2);
        data.iter().map(|z| z.norm_sqr() / norm).collect()
    }
}

/// Radially averaged PSD averaged over every `(sample, time)` frame.
pub fn radial_psd(t: &EnsembleTensor) -> Result<RadialSpectrum> {
    let shape = t.shape();
    if shape.rows < MIN_SIDE || shape.cols < MIN_SIDE {
        return Err(Error::Shape(format!(
            "PSD needs frames of at least {MIN_SIDE}x{MIN_SIDE}, got {}x{}",
            shape.rows, shape.cols
        )));
    }
    let bins = radial_bins(shape.rows, shape.cols);
    let n_bins = bins.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; n_bins];
    for &b in &bins {
        counts[b] += 1;
    }
    let fft = Fft2::new(shape.rows, shape.cols);
    let n = shape.pixels();
    let per_frame: Vec<Vec<f64>> = t
        .as_slice()
        .par_chunks_exact(n)
        .map(|frame| {
            let f: Vec<f64> = frame.iter().map(|&v| v as f64).collect();
            let mut sums = vec![0.0; n_bins];
            for (p, &b) in fft.periodogram(&f).iter().zip(&bins) {
                sums[b] += p;
            }
            sums
        })
        .collect();
    let frames = per_frame.len() as f64;
    let mut power = vec![0.0; n_bins];
    for sums in &per_frame {
        for (acc, s) in power.iter_mut().zip(sums) {
            *acc += s;
        }
    }
    for (p, &c) in power.iter_mut().zip(&counts) {
        *p /= frames * c as f64;
    }
    Ok(RadialSpectrum {
        wavenumbers: (0..n_bins).collect(),
        power,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    #[test]
    fn constant_field_puts_everything_at_zero() {
        let t = EnsembleTensor::from_fn(Shape::new(1, 2, 8, 8), |_, _, _, _| 3.0).unwrap();
        let s = radial_psd(&t).unwrap();
        assert!((s.power[0] - 9.0).abs() < 1e-12);
        assert!(s.power[1..].iter().all(|p| p.abs() < 1e-20));
    }

    #[test]
    fn cosine_peaks_at_its_wavenumber() {
        let t = EnsembleTensor::from_fn(Shape::new(1, 1, 16, 16), |_, _, _, c| {
            (2.0 * std::f32::consts::PI * 4.0 * c as f32 / 16.0).cos()
        })
        .unwrap();
        let s = radial_psd(&t).unwrap();
        assert_eq!(s.peak_wavenumber(), 4);
        let off: f64 = s
            .power
            .iter()
            .zip(&s.counts)
            .enumerate()
            .filter(|(k, _)| *k != 4)
            .map(|(_, (p, &c))| p * c as f64)
            .sum();
        assert!(off < 1e-12);
    }

    #[test]
    fn parseval_on_a_rectangular_frame() {
        let t = EnsembleTensor::from_fn(Shape::new(2, 3, 8, 12), |s, t, r, c| {
            ((s * 31 + t * 17 + r * 7 + c * 3) % 13) as f32 - 6.0
        })
        .unwrap();
        let s = radial_psd(&t).unwrap();
        let ms = t.as_slice().iter().map(|&v| (v as f64).powi(2)).sum::<f64>()
            / t.as_slice().len() as f64;
        assert!((s.total_power() - ms).abs() < 1e-8 * ms.max(1.0));
    }

    #[test]
    fn small_frames_are_rejected() {
        let t = EnsembleTensor::zeros(Shape::new(1, 1, 4, 8));
        assert!(radial_psd(&t).is_err());
    }
}
