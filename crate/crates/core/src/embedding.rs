//! Node embedding matrices and their on-disk formats.
//!
//! Binary layout (little endian):
//!
//! | bytes | content                      |
//! |-------|------------------------------|
//! | 8     | magic `b"AFEMBED\0"`         |
//! | 4     | format version (`u32`, = 1)  |
//! | 8     | row count (`u64`)            |
//! | 4     | dimension (`u32`)            |
//! | 4·r·d | row-major `f32` entries      |

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::scalar::Real;

pub const MAGIC: &[u8; 8] = b"AFEMBED\0";
pub const FORMAT_VERSION: u32 = 1;

/// `rows × dim` matrix; row `v` is the vector of node `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    rows: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> EmbeddingMatrix<T> {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            rows,
            dim,
            data: vec![T::zero(); rows * dim],
        }
    }

    pub fn from_rows(rows: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::InvalidParam(format!(
                "{} entries for a {rows}x{dim} matrix",
                data.len()
            )));
        }
        Ok(EmbeddingMatrix { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, v: NodeId) -> &[T] {
        &self.data[v * self.dim..(v + 1) * self.dim]
    }

    pub fn row_checked(&self, v: NodeId) -> Result<&[T]> {
        if v >= self.rows {
            return Err(Error::UnknownNode(v));
        }
        Ok(self.row(v))
    }

    pub fn distance(&self, u: NodeId, v: NodeId) -> T {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn cast<U: Real>(&self) -> EmbeddingMatrix<U> {
        EmbeddingMatrix {
            rows: self.rows,
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|x| U::from_f64_lossy(x.to_f64_lossy()))
                .collect(),
        }
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        let dim = u32::try_from(self.dim).map_err(|_| Error::Format("dimension too large".into()))?;
        w.write_all(&dim.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.data.len() * 4);
        for x in &self.data {
            buf.extend_from_slice(&(x.to_f64_lossy() as f32).to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()?;
        Ok(())
    }

    /// Delimited text: one line per node, the token followed by `dim` values.
    pub fn write_delimited<W: Write>(&self, tokens: &[String], mut w: W, delimiter: char) -> Result<()> {
        if tokens.len() != self.rows {
            return Err(Error::InvalidParam(format!(
                "{} tokens for {} rows",
                tokens.len(),
                self.rows
            )));
        }
        for (v, tok) in tokens.iter().enumerate() {
            write!(w, "{tok}")?;
            for x in self.row(v) {
                write!(w, "{delimiter}{}", x.to_f64_lossy() as f32)?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl EmbeddingMatrix<f32> {
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        r.read_exact(&mut b8)?;
        let rows = usize::try_from(u64::from_le_bytes(b8)).map_err(|_| Error::Format("row count".into()))?;
        r.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        let len = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::Format("matrix too large".into()))?;
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        if raw.len() != len * 4 {
            return Err(Error::Format(format!(
                "expected {} payload bytes, found {}",
                len * 4,
                raw.len()
            )));
        }
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(EmbeddingMatrix { rows, dim, data })
    }
}
