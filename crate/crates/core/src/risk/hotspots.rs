//! High-risk flags and their persistence between two periods.

use serde::Serialize;

use super::field::RiskField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HotspotFlags {
    pub rows: usize,
    pub cols: usize,
    /// `P_community > 1 / S`.
    pub community_high: Vec<bool>,
    /// `P_checkmate` strictly above the baseline's; undefined pixels are never flagged.
    pub checkmate_above_random: Vec<bool>,
}

impl HotspotFlags {
    pub fn n_community_high(&self) -> usize {
        self.community_high.iter().filter(|&&f| f).count()
    }

    pub fn n_checkmate_above_random(&self) -> usize {
        self.checkmate_above_random.iter().filter(|&&f| f).count()
    }
}

pub fn classify_hotspots(
    risks: &RiskField,
    record_length: usize,
    baseline: &RiskField,
) -> Result<HotspotFlags> {
    if (risks.rows, risks.cols) != (baseline.rows, baseline.cols) {
        return Err(Error::Shape(format!(
            "risks are {}x{}, baseline is {}x{}",
            risks.rows, risks.cols, baseline.rows, baseline.cols
        )));
    }
    if record_length == 0 {
        return Err(Error::Config("record length must be positive".into()));
    }
    let cut = 1.0 / record_length as f64;
    Ok(HotspotFlags {
        rows: risks.rows,
        cols: risks.cols,
        community_high: risks.pixels.iter().map(|p| p.p_community > cut).collect(),
        checkmate_above_random: risks
            .pixels
            .iter()
            .zip(&baseline.pixels)
            .map(|(p, b)| match (p.p_checkmate, b.p_checkmate) {
                (Some(x), Some(y)) => x > y,
                _ => false,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Persistence {
    /// Share of historical hotspots still flagged in the future; `None`
    /// without historical hotspots.
    pub ratio: Option<f64>,
    pub n_hist: usize,
    pub n_future: usize,
    pub n_persistent: usize,
    pub n_new: usize,
}

pub fn persistence(hist: &[bool], fut: &[bool]) -> Result<Persistence> {
    if hist.len() != fut.len() {
        return Err(Error::Shape(format!(
            "flag grids differ in size: {} vs {}",
            hist.len(),
            fut.len()
        )));
    }
    let count = |f: &dyn Fn(bool, bool) -> bool| {
        hist.iter().zip(fut).filter(|(&h, &u)| f(h, u)).count()
    };
    let n_hist = count(&|h, _| h);
    let n_persistent = count(&|h, u| h && u);
    Ok(Persistence {
        ratio: (n_hist > 0).then(|| n_persistent as f64 / n_hist as f64),
        n_hist,
        n_future: count(&|_, u| u),
        n_persistent,
        n_new: count(&|h, u| !h && u),
    })
}
