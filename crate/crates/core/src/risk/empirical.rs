//! Empirical unseen-extreme probabilities from an ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{PixelRisk, RiskField};
use super::thresholds::ThresholdMap;
use crate::error::{Error, Result};
use crate::grid::Neighborhood;
use crate::tensor::EnsembleTensor;

/// What counts as one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EventUnit {
    /// Every `(sample, time)` snapshot.
    #[default]
    Snapshot,
    /// Consecutive blocks of this many snapshots (sample-major order), each
    /// reduced to its per-pixel maximum; a trailing partial block is dropped.
    Block(usize),
}

/// Per-pixel block maxima, flat and frame-major like the tensor payload.
fn block_maxima(t: &EnsembleTensor, len: usize) -> Result<Vec<f32>> {
    if len == 0 {
        return Err(Error::Config("block length must be positive".into()));
    }
    let n = t.shape().pixels();
    let snapshots = t.shape().snapshots();
    if snapshots < len {
        return Err(Error::InsufficientData(format!(
            "{snapshots} snapshots do not fill one block of {len}"
        )));
    }
    let mut out = Vec::with_capacity(snapshots / len * n);
    for block in t.as_slice().chunks_exact(len * n) {
        let mut m = block[..n].to_vec();
        for frame in block[n..].chunks_exact(n) {
            for (a, &b) in m.iter_mut().zip(frame) {
                *a = a.max(b);
            }
        }
        out.extend(m);
    }
    Ok(out)
}

/// Community, checkmate and stalemate frequencies at every pixel.
///
/// A trial hits the target when `x_target >= alpha_target` and hits a
/// neighbor `j` when `x_j >= alpha_{j | target}`. Community = target hit or
/// any neighbor hit; checkmate = target hit; stalemate = some neighbor hit
/// while the target is not.
pub fn empirical_risks(
    ensemble: &EnsembleTensor,
    thresholds: &ThresholdMap,
    nb: Neighborhood,
    unit: EventUnit,
) -> Result<RiskField> {
    let s = ensemble.shape();
    if (s.rows, s.cols) != (thresholds.rows, thresholds.cols) {
        return Err(Error::Shape(format!(
            "ensemble frames are {}x{}, thresholds cover {}x{}",
            s.rows, s.cols, thresholds.rows, thresholds.cols
        )));
    }
    if let Some(built) = thresholds.neighborhood {
        if built != nb {
            return Err(Error::Config(format!(
                "thresholds were matched for {built}, risks requested for {nb}"
            )));
        }
    }
    let blocked;
    let data: &[f32] = match unit {
        EventUnit::Snapshot => ensemble.as_slice(),
        EventUnit::Block(len) => {
            blocked = block_maxima(ensemble, len)?;
            &blocked
        }
    };
    let n = s.pixels();
    let trials = (data.len() / n) as f64;
    let pixels: Vec<PixelRisk> = (0..n)
        .into_par_iter()
        .map(|i| {
            let neighbors: Vec<(usize, f64)> = nb
                .neighbors(s.rows, s.cols, i / s.cols, i % s.cols)
                .into_iter()
                .map(|j| (j, thresholds.neighbor_threshold(i, j)))
                .collect();
            let alpha = thresholds.target[i];
            let (mut community, mut checkmate, mut stalemate) = (0u64, 0u64, 0u64);
            for f in data.chunks_exact(n) {
                let target_hit = f[i] as f64 >= alpha;
                let neighbor_hit = neighbors.iter().any(|&(j, a)| f[j] as f64 >= a);
                if target_hit {
                    checkmate += 1;
                } else if neighbor_hit {
                    stalemate += 1;
                }
                if target_hit || neighbor_hit {
                    community += 1;
                }
            }
            let mut px = PixelRisk::from_unnormalized(
                community as f64 / trials,
                checkmate as f64 / trials,
                stalemate as f64 / trials,
                community,
            );
            // normalize on counts so checkmate + stalemate = 1 up to one rounding
            if community > 0 {
                px.p_checkmate = Some(checkmate as f64 / community as f64);
                px.p_stalemate = Some(stalemate as f64 / community as f64);
            }
            px
        })
        .collect();
    Ok(RiskField {
        rows: s.rows,
        cols: s.cols,
        pixels,
    })
}
