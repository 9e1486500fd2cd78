//! Lifted vectors and the block-Hankel data matrices built from them.
//!
//! A lifted vector stacks consecutive samples of a vector sequence; the data
//! matrix collects column-shifted lifted vectors, giving the block-Hankel
//! structure every regression stage of the pipeline operates on.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Stacks `seq[q], seq[q+1], ..., seq[r_idx]` into one column vector.
pub fn lift(seq: &[DVector<f64>], q: usize, r_idx: usize) -> Result<DVector<f64>> {
    if q > r_idx || r_idx >= seq.len() {
        return Err(Error::IndexOutOfRange(format!(
            "lift window [{q}, {r_idx}] invalid for sequence of length {}",
            seq.len()
        )));
    }
    let d = seq[q].len();
    let mut out = DVector::zeros((r_idx - q + 1) * d);
    for (block, w) in seq[q..=r_idx].iter().enumerate() {
        out.rows_mut(block * d, d).copy_from(w);
    }
    Ok(out)
}

/// Block-Hankel matrix whose column `j` is the lifted vector over the window
/// `[q + j, r_idx + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    block_dim: usize,
    q: usize,
    r_idx: usize,
    l: usize,
}

impl DataMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Dimension of the underlying per-step vector.
    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    /// Number of stacked blocks per column, `r_idx - q + 1`.
    pub fn block_rows(&self) -> usize {
        self.r_idx - self.q + 1
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r_idx(&self) -> usize {
        self.r_idx
    }

    /// Shift count; the matrix has `l + 1` columns.
    pub fn l(&self) -> usize {
        self.l
    }
}

/// Builds the data matrix with `l + 1` shifted lifted-vector columns.
pub fn build_data_matrix(
    seq: &[DVector<f64>],
    q: usize,
    r_idx: usize,
    l: usize,
) -> Result<DataMatrix> {
    if q > r_idx {
        return Err(Error::IndexOutOfRange(format!("window start {q} exceeds end {r_idx}")));
    }
    let needed = r_idx + l + 1;
    if needed > seq.len() {
        return Err(Error::InsufficientSamples { needed, available: seq.len() });
    }
    let d = seq[q].len();
    let rows = (r_idx - q + 1) * d;
    let mut values = DMatrix::zeros(rows, l + 1);
    for j in 0..=l {
        let col = lift(seq, q + j, r_idx + j)?;
        values.set_column(j, &col);
    }
    Ok(DataMatrix { values, block_dim: d, q, r_idx, l })
}
