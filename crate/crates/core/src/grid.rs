//! Grid metadata and pixel neighborhoods.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which cells count as spatial neighbors. Neighborhoods are truncated at the
/// grid boundary, never wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(into = "String", try_from = "String")]
pub enum Neighborhood {
    /// The 8 surrounding cells.
    #[default]
    Moore8,
    /// The 4 edge-adjacent cells.
    VonNeumann4,
    /// All cells within Chebyshev distance `k` (a `(2k+1)^2 - 1` square).
    Radius(usize),
}

impl Neighborhood {
    /// Neighbor offsets `(dr, dc)`, excluding the cell itself.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        match *self {
            Neighborhood::Moore8 => Neighborhood::Radius(1).offsets(),
            Neighborhood::VonNeumann4 => vec![(-1, 0), (0, -1), (0, 1), (1, 0)],
            Neighborhood::Radius(k) => {
                let k = k as isize;
                let mut out = Vec::new();
                for dr in -k..=k {
                    for dc in -k..=k {
                        if dr != 0 || dc != 0 {
                            out.push((dr, dc));
                        }
                    }
                }
                out
            }
        }
    }

    /// Number of neighbors of an interior cell.
    pub fn interior_size(&self) -> usize {
        self.offsets().len()
    }

    /// Flat indices of the in-grid neighbors of `(row, col)`, in ascending order.
    pub fn neighbors(&self, rows: usize, cols: usize, row: usize, col: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .offsets()
            .into_iter()
            .filter_map(|(dr, dc)| {
                let r = row as isize + dr;
                let c = col as isize + dc;
                (r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols)
                    .then(|| r as usize * cols + c as usize)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Neighbor lists for every pixel of a `rows x cols` grid.
    pub fn adjacency(&self, rows: usize, cols: usize) -> Vec<Vec<usize>> {
        (0..rows * cols)
            .map(|p| self.neighbors(rows, cols, p / cols, p % cols))
            .collect()
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Neighborhood::Moore8 => f.write_str("moore-8"),
            Neighborhood::VonNeumann4 => f.write_str("von-neumann-4"),
            Neighborhood::Radius(k) => write!(f, "radius-{k}"),
        }
    }
}

impl From<Neighborhood> for String {
    fn from(nb: Neighborhood) -> String {
        nb.to_string()
    }
}

impl TryFrom<String> for Neighborhood {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Neighborhood {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moore-8" | "moore" => Ok(Neighborhood::Moore8),
            "von-neumann-4" | "von-neumann" => Ok(Neighborhood::VonNeumann4),
            other => other
                .strip_prefix("radius-")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(Neighborhood::Radius)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "unknown neighborhood {other:?} (moore-8, von-neumann-4, radius-k)"
                    ))
                }),
        }
    }
}

/// Grid dimensions plus optional per-pixel region labels and coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row-major region id per pixel; `None` for unlabeled pixels.
    pub pixel_labels: Option<Vec<Option<String>>>,
    pub lats: Option<Vec<f64>>,
    pub lons: Option<Vec<f64>>,
}

impl GridMeta {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        GridMeta {
            n_rows,
            n_cols,
            pixel_labels: None,
            lats: None,
            lons: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.n_rows * self.n_cols {
            return Err(Error::Shape(format!(
                "label grid has {} entries, grid has {}x{}",
                labels.len(),
                self.n_rows,
                self.n_cols
            )));
        }
        self.pixel_labels = Some(labels);
        Ok(self)
    }

    pub fn pixels(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Pixel indices per label, in label order.
    pub fn regions(&self) -> BTreeMap<String, Vec<usize>> {
        let mut map: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        if let Some(labels) = &self.pixel_labels {
            for (p, l) in labels.iter().enumerate() {
                if let Some(l) = l {
                    map.entry(l.clone()).or_default().push(p);
                }
            }
        }
        map
    }

    /// Reads a label table with columns `pixel_row,pixel_col,country_id`.
    /// Pixels absent from the table stay unlabeled.
    pub fn read_labels(n_rows: usize, n_cols: usize, path: impl AsRef<Path>) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            pixel_row: usize,
            pixel_col: usize,
            country_id: String,
        }
        let mut labels = vec![None; n_rows * n_cols];
        let mut rdr = csv::Reader::from_path(path)?;
        for row in rdr.deserialize() {
            let row: Row = row?;
            if row.pixel_row >= n_rows || row.pixel_col >= n_cols {
                return Err(Error::Shape(format!(
                    "label at ({}, {}) outside {n_rows}x{n_cols} grid",
                    row.pixel_row, row.pixel_col
                )));
            }
            let id = row.country_id.trim();
            if !id.is_empty() {
                labels[row.pixel_row * n_cols + row.pixel_col] = Some(id.to_string());
            }
        }
        GridMeta::new(n_rows, n_cols).with_labels(labels)
    }
}
