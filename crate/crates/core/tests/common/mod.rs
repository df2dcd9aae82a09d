//! Independent reference implementations shared by the integration tests.
//!
//! Everything here is written as straight-line loops over tensor indices and
//! deliberately shares no code with the library beyond reading the tensor.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xextremes::{EnsembleTensor, ExtremalMatrix, Shape};

/// Mid-rank plotting position of `x` among all `(sample, time)` values of
/// pixel `(r, c)`.
pub fn pooled_cdf(t: &EnsembleTensor, r: usize, c: usize, x: f64) -> f64 {
    let s = t.shape();
    let (mut below, mut ties) = (0.0, 0.0);
    for a in 0..s.samples {
        for b in 0..s.time {
            let v = t.get(a, b, r, c);
            if v < x {
                below += 1.0;
            } else if v == x {
                ties += 1.0;
            }
        }
    }
    (below + (ties + 1.0) / 2.0) / (s.snapshots() as f64 + 1.0)
}

/// Moore neighbors of `(r, c)` truncated at the boundary.
pub fn moore(rows: usize, cols: usize, r: usize, c: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            if dr == 0 && dc == 0 {
                continue;
            }
            let (rr, cc) = (r as i64 + dr, c as i64 + dc);
            if rr >= 0 && cc >= 0 && (rr as usize) < rows && (cc as usize) < cols {
                out.push((rr as usize, cc as usize));
            }
        }
    }
    out
}

/// DeepX values for every `(sample, time, row, col)`, Moore neighborhood,
/// evaluated term by term from the definitions.
pub fn deepx_brute_force(
    t: &EnsembleTensor,
    theta_a: f64,
    theta_b: f64,
    l: f64,
    q: f64,
    chi: &ExtremalMatrix,
    eps: f64,
) -> Vec<f64> {
    let s = t.shape();
    let (h, w) = (s.rows, s.cols);
    let n = h * w;
    let mut out = vec![0.0; s.len()];
    for smp in 0..s.samples {
        let x = |tt: usize, p: usize| t.get(smp, tt, p / w, p % w);
        for step in 1..s.time {
            let b = |prev: usize| (-((step - prev) as f64) / l).exp();
            let past = |p: usize| (0..step).map(|prev| b(prev) * x(prev, p)).sum::<f64>();
            let mut denom = 0.0;
            for j in 0..n {
                denom += past(j);
            }
            if denom.abs() < eps {
                denom = eps;
            }
            let mut total = 0.0;
            for j in 0..n {
                total += x(step, j);
            }
            let extreme = |p: usize| pooled_cdf(t, p / w, p % w, x(step, p)) > q;
            let mut z = vec![0.0; n];
            for i in 0..n {
                let mu_a = total * past(i) / denom;
                let mut weighted = 0.0;
                for j in 0..n {
                    if extreme(i) && extreme(j) {
                        weighted += chi.get(i, j).unwrap_or(0.0) * x(step, j);
                    }
                }
                let mu_b = weighted * past(i) / denom;
                z[i] = x(step, i) - (theta_a * mu_a + theta_b * mu_b);
            }
            let ss: f64 = z.iter().map(|v| v * v).sum();
            if ss < eps {
                continue;
            }
            for i in 0..n {
                let nsum: f64 = moore(h, w, i / w, i % w)
                    .into_iter()
                    .map(|(r, c)| z[r * w + c])
                    .sum();
                let idx = ((smp * s.time + step) * h + i / w) * w + i % w;
                out[idx] = (n as f64 - 1.0) * z[i] / ss * nsum;
            }
        }
    }
    out
}

pub fn uniform_tensor(shape: Shape, lo: f32, hi: f32, seed: u64) -> EnsembleTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EnsembleTensor::from_fn(shape, |_, _, _, _| rng.random_range(lo..hi)).unwrap()
}

/// A random chi matrix with unit diagonal.
pub fn random_chi(n: usize, q: f64, seed: u64) -> ExtremalMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..n * n)
        .map(|k| Some(if k / n == k % n { 1.0 } else { rng.random_range(0.0..1.0) }))
        .collect();
    ExtremalMatrix::from_values(n, q, vals).unwrap()
}

/// Bernoulli(p) exceedance indicators (0/1) on a `rows x cols` grid.
pub fn bernoulli_tensor(snapshots: usize, rows: usize, cols: usize, p: f64, seed: u64) -> EnsembleTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EnsembleTensor::from_fn(Shape::new(1, snapshots, rows, cols), |_, _, _, _| {
        rng.random_bool(p) as u8 as f32
    })
    .unwrap()
}

/// 3x3 indicators at marginal probability `p` where each snapshot is fully
/// synchronized with probability `rho` (one shared draw for all nine cells)
/// and independent otherwise.
pub fn synchronized_tensor(snapshots: usize, p: f64, rho: f64, seed: u64) -> EnsembleTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = Vec::with_capacity(snapshots * 9);
    for _ in 0..snapshots {
        if rng.random_bool(rho) {
            let v = rng.random_bool(p) as u8 as f32;
            vals.extend([v; 9]);
        } else {
            vals.extend((0..9).map(|_| rng.random_bool(p) as u8 as f32));
        }
    }
    EnsembleTensor::from_vec(Shape::new(1, snapshots, 3, 3), vals).unwrap()
}
