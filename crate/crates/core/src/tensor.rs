//! Ensemble tensor container and its on-disk format.
//!
//! Layout of a container file:
//!
//! | offset | size | content                                     |
//! |--------|------|---------------------------------------------|
//! | 0      | 8    | magic `XTNSR01\n`                           |
//! | 8      | 1    | dtype code, `0x01` = little-endian `f32`    |
//! | 9      | 1    | rank, always 4                              |
//! | 10     | 16   | dims `(samples, time, rows, cols)` as `u32` |
//! | 26     | ...  | payload, row-major (sample-major)           |

use std::fs;
use std::path::Path;

use ndarray::{Array4, ArrayView2, Axis};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"XTNSR01\n";
pub const DTYPE_F32: u8 = 0x01;
pub const HEADER_LEN: usize = 8 + 1 + 1 + 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Shape {
    pub samples: usize,
    pub time: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub fn new(samples: usize, time: usize, rows: usize, cols: usize) -> Self {
        Shape {
            samples,
            time,
            rows,
            cols,
        }
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub fn snapshots(&self) -> usize {
        self.samples * self.time
    }

    pub fn len(&self) -> usize {
        self.snapshots() * self.pixels()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dims(&self) -> (usize, usize, usize, usize) {
        (self.samples, self.time, self.rows, self.cols)
    }
}

/// A `(sample, time, row, col)` field ensemble with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTensor {
    values: Array4<f32>,
}

impl EnsembleTensor {
    /// Wraps an array, rejecting empty shapes and non-finite entries.
    pub fn new(values: Array4<f32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape(format!(
                "tensor must be nonempty, got {:?}",
                values.dim()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().to_owned()
        };
        Ok(EnsembleTensor { values })
    }

    pub fn zeros(shape: Shape) -> Self {
        EnsembleTensor {
            values: Array4::zeros(shape.dims()),
        }
    }

    /// Builds a tensor from a flat sample-major vector of values.
    pub fn from_vec(shape: Shape, values: Vec<f32>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::Shape(format!(
                "{} values do not fill shape {:?}",
                values.len(),
                shape
            )));
        }
        let arr = Array4::from_shape_vec(shape.dims(), values)
            .map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(arr)
    }

    pub fn from_fn<F>(shape: Shape, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize) -> f32,
    {
        Self::new(Array4::from_shape_fn(shape.dims(), |(s, t, r, c)| {
            f(s, t, r, c)
        }))
    }

    pub fn shape(&self) -> Shape {
        let (s, t, r, c) = self.values.dim();
        Shape::new(s, t, r, c)
    }

    pub fn values(&self) -> &Array4<f32> {
        &self.values
    }

    pub fn into_values(self) -> Array4<f32> {
        self.values
    }

    pub fn as_slice(&self) -> &[f32] {
        self.values
            .as_slice()
            .expect("tensor is kept in standard layout")
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize, r: usize, c: usize) -> f64 {
        self.values[[s, t, r, c]] as f64
    }

    /// Snapshot `(s, t)` as a `rows x cols` view.
    pub fn frame(&self, s: usize, t: usize) -> ArrayView2<'_, f32> {
        self.values.index_axis(Axis(0), s).index_axis_move(Axis(0), t)
    }

    /// Snapshot `(s, t)` flattened row-major, as `f64`.
    pub fn frame_vec(&self, s: usize, t: usize) -> Vec<f64> {
        let p = self.shape().pixels();
        let start = (s * self.shape().time + t) * p;
        self.as_slice()[start..start + p]
            .iter()
            .map(|&v| v as f64)
            .collect()
    }

    /// All observations of one pixel pooled over samples and time,
    /// in sample-major order.
    pub fn pixel_series(&self, pixel: usize) -> Vec<f64> {
        let shape = self.shape();
        let p = shape.pixels();
        self.as_slice()
            .iter()
            .skip(pixel)
            .step_by(p)
            .map(|&v| v as f64)
            .collect()
    }

    /// One sample flattened to a `time * rows * cols` vector.
    pub fn sample_vec(&self, s: usize) -> Vec<f64> {
        let len = self.shape().time * self.shape().pixels();
        self.as_slice()[s * len..(s + 1) * len]
            .iter()
            .map(|&v| v as f64)
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let shape = self.shape();
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * shape.len());
        out.extend_from_slice(MAGIC);
        out.push(DTYPE_F32);
        out.push(4);
        for d in [shape.samples, shape.time, shape.rows, shape.cols] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in self.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            if bytes.len() >= 8 && &bytes[..8] != MAGIC {
                return Err(Error::BadMagic);
            }
            return Err(Error::TruncatedHeader {
                expected: HEADER_LEN,
                actual: bytes.len(),
            });
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes[8] != DTYPE_F32 {
            return Err(Error::UnsupportedDtype { code: bytes[8] });
        }
        if bytes[9] != 4 {
            return Err(Error::UnsupportedRank { rank: bytes[9] });
        }
        let mut dims = [0usize; 4];
        for (k, d) in dims.iter_mut().enumerate() {
            let off = 10 + 4 * k;
            *d = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as usize;
        }
        let shape = Shape::new(dims[0], dims[1], dims[2], dims[3]);
        let expected = shape.len();
        let payload = &bytes[HEADER_LEN..];
        let actual = payload.len() / 4;
        if actual < expected {
            return Err(Error::TruncatedPayload {
                expected,
                actual,
                offset: HEADER_LEN,
            });
        }
        if payload.len() != 4 * expected {
            return Err(Error::TrailingBytes {
                extra: payload.len() - 4 * expected,
                offset: HEADER_LEN + 4 * expected,
            });
        }
        let values: Vec<f32> = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_vec(shape, values)
    }
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<EnsembleTensor> {
    let bytes = fs::read(path)?;
    EnsembleTensor::from_bytes(&bytes)
}

pub fn save_tensor(t: &EnsembleTensor, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, t.to_bytes())?;
    Ok(())
}
