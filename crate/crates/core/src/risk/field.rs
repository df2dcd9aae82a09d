//! Per-pixel community / checkmate / stalemate probabilities and their CSV form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelRisk {
    pub p_community: f64,
    /// Normalized by `p_community`; `None` where `p_community` is zero.
    pub p_checkmate: Option<f64>,
    pub p_stalemate: Option<f64>,
    pub p_checkmate_unnormalized: f64,
    pub p_stalemate_unnormalized: f64,
    pub n_community_hits: u64,
}

impl PixelRisk {
    /// Builds a pixel from unnormalized probabilities.
    pub fn from_unnormalized(community: f64, checkmate: f64, stalemate: f64, hits: u64) -> Self {
        let defined = community > 0.0;
        PixelRisk {
            p_community: community,
            p_checkmate: defined.then(|| checkmate / community),
            p_stalemate: defined.then(|| stalemate / community),
            p_checkmate_unnormalized: checkmate,
            p_stalemate_unnormalized: stalemate,
            n_community_hits: hits,
        }
    }

    pub fn defined(&self) -> bool {
        self.p_checkmate.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskField {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub pixels: Vec<PixelRisk>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    pixel_row: usize,
    pixel_col: usize,
    p_community: f64,
    p_checkmate: Option<f64>,
    p_stalemate: Option<f64>,
    n_community_hits: u64,
    defined: bool,
}

impl RiskField {
    pub fn get(&self, row: usize, col: usize) -> &PixelRisk {
        &self.pixels[row * self.cols + col]
    }

    pub fn n_defined(&self) -> usize {
        self.pixels.iter().filter(|p| p.defined()).count()
    }

    /// Largest `|checkmate + stalemate - 1|` over defined pixels.
    pub fn max_normalization_error(&self) -> f64 {
        self.pixels
            .iter()
            .filter_map(|p| Some((p.p_checkmate? + p.p_stalemate? - 1.0).abs()))
            .fold(0.0, f64::max)
    }

    /// Columns `pixel_row, pixel_col, p_community, p_checkmate, p_stalemate,
    /// n_community_hits, defined`; undefined probabilities are empty fields.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for (k, p) in self.pixels.iter().enumerate() {
            wtr.serialize(CsvRow {
                pixel_row: k / self.cols,
                pixel_col: k % self.cols,
                p_community: p.p_community,
                p_checkmate: p.p_checkmate,
                p_stalemate: p.p_stalemate,
                n_community_hits: p.n_community_hits,
                defined: p.defined(),
            })?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`RiskField::write_csv`]. Unnormalized
    /// probabilities are reconstructed from the normalized ones.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let rows: Vec<CsvRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        if rows.is_empty() {
            return Err(Error::Table("risk table is empty".into()));
        }
        let n_rows = rows.iter().map(|r| r.pixel_row).max().unwrap() + 1;
        let n_cols = rows.iter().map(|r| r.pixel_col).max().unwrap() + 1;
        if rows.len() != n_rows * n_cols {
            return Err(Error::Table(format!(
                "{} rows do not tile a {n_rows}x{n_cols} grid",
                rows.len()
            )));
        }
        let mut pixels = vec![None; n_rows * n_cols];
        for r in rows {
            let k = r.pixel_row * n_cols + r.pixel_col;
            if pixels[k].is_some() {
                return Err(Error::Table(format!(
                    "duplicate pixel ({}, {})",
                    r.pixel_row, r.pixel_col
                )));
            }
            pixels[k] = Some(PixelRisk {
                p_community: r.p_community,
                p_checkmate: r.p_checkmate,
                p_stalemate: r.p_stalemate,
                p_checkmate_unnormalized: r.p_checkmate.unwrap_or(0.0) * r.p_community,
                p_stalemate_unnormalized: r.p_stalemate.unwrap_or(0.0) * r.p_community,
                n_community_hits: r.n_community_hits,
            });
        }
        Ok(RiskField {
            rows: n_rows,
            cols: n_cols,
            pixels: pixels.into_iter().map(|p| p.expect("tiled")).collect(),
        })
    }
}
