//! Closed-form risks for spatially random and fully dependent reference processes.

use serde::{Deserialize, Serialize};

use super::field::{PixelRisk, RiskField};
use crate::error::{Error, Result};
use crate::grid::Neighborhood;

/// Exceedance probabilities of a target and its neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomProcessParams {
    pub p_target: f64,
    pub p_neighbors: Vec<f64>,
}

/// Community, normalized checkmate and normalized stalemate probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskTriple {
    pub community: f64,
    pub checkmate: f64,
    pub stalemate: f64,
}

impl RandomProcessParams {
    /// Every cell exceeds with probability `p`; `k` neighbors.
    pub fn uniform(p: f64, k: usize) -> Self {
        RandomProcessParams {
            p_target: p,
            p_neighbors: vec![p; k],
        }
    }

    /// A record of `record_length` years exceeded with probability `1 / record_length`.
    pub fn from_record_length(record_length: usize, k: usize) -> Result<Self> {
        if record_length == 0 {
            return Err(Error::Config("record length must be positive".into()));
        }
        Ok(Self::uniform(1.0 / record_length as f64, k))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_neighbors.is_empty() {
            return Err(Error::Config("neighborhood is empty".into()));
        }
        let bad = std::iter::once(&self.p_target)
            .chain(&self.p_neighbors)
            .find(|p| !(**p > 0.0 && **p <= 1.0));
        match bad {
            Some(p) => Err(Error::Config(format!("probability {p} outside (0, 1]"))),
            None => Ok(()),
        }
    }
}

/// Independent exceedances at every cell.
pub fn analytic_random_risks(p: &RandomProcessParams) -> Result<RiskTriple> {
    p.validate()?;
    let none_neighbor: f64 = p.p_neighbors.iter().map(|pi| 1.0 - pi).product();
    let community = 1.0 - none_neighbor * (1.0 - p.p_target);
    Ok(RiskTriple {
        community,
        checkmate: p.p_target / community,
        stalemate: (1.0 - none_neighbor) * (1.0 - p.p_target) / community,
    })
}

/// Perfectly synchronized exceedances: the rarest cell only exceeds when the
/// more frequent ones do, so the community event is the most frequent one.
pub fn analytic_dependent_risks(p: &RandomProcessParams) -> Result<RiskTriple> {
    p.validate()?;
    let community = p.p_neighbors.iter().copied().fold(p.p_target, f64::max);
    let checkmate = p.p_target / community;
    Ok(RiskTriple {
        community,
        checkmate,
        stalemate: 1.0 - checkmate,
    })
}

/// Random-process risks on a grid with uniform probability `p`; boundary
/// pixels use their truncated neighborhoods.
pub fn analytic_random_field(
    rows: usize,
    cols: usize,
    p: f64,
    nb: Neighborhood,
) -> Result<RiskField> {
    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let k = nb.neighbors(rows, cols, r, c).len();
            let tri = analytic_random_risks(&RandomProcessParams::uniform(p, k)).map_err(|e| {
                Error::Config(format!("pixel ({r}, {c}): {e}"))
            })?;
            pixels.push(PixelRisk {
                p_community: tri.community,
                p_checkmate: Some(tri.checkmate),
                p_stalemate: Some(tri.stalemate),
                p_checkmate_unnormalized: tri.checkmate * tri.community,
                p_stalemate_unnormalized: tri.stalemate * tri.community,
                n_community_hits: 0,
            });
        }
    }
    Ok(RiskField { rows, cols, pixels })
}
