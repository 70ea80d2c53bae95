//! `MWF1` matrix files: magic, then row and column counts as little-endian
//! u32, then row-major little-endian f32 values.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::melwarp::FeatureMatrix;

pub const MAGIC: &[u8; 4] = b"MWF1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::MatrixFormat(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows.saturating_mul(cols),
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(Error::MatrixFormat("missing MWF1 header".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let (rows, cols) = (word(4), word(8));
        let body = &bytes[HEADER_LEN..];
        if Some(body.len()) != rows.checked_mul(cols).and_then(|n| n.checked_mul(4)) {
            return Err(Error::MatrixFormat(format!(
                "{rows}x{cols} header but {} payload bytes",
                body.len()
            )));
        }
        let data = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self { rows, cols, data })
    }

    /// Column-wise mean.
    pub fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0f64; self.cols];
        for r in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(r)) {
                *s += f64::from(*v);
            }
        }
        let n = self.rows.max(1) as f64;
        sums.into_iter().map(|s| s / n).collect()
    }
}

impl From<&FeatureMatrix> for Matrix {
    fn from(m: &FeatureMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.values().iter().map(|&v| v as f32).collect(),
        }
    }
}

pub fn write_matrix(path: impl AsRef<Path>, matrix: &Matrix) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&matrix.to_bytes())?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    Matrix::from_bytes(&bytes)
}
