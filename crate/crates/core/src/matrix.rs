//! Dense row-major matrices and the pairwise distance kernel.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Features are accumulated in blocks of this many entries; block partial sums
/// are then added in ascending block order.
const DIST_BLOCK: usize = 4096;

/// An `n × p` matrix of finite reals. Rows are samples, columns features.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Requires `rows >= 2`,
    /// `cols >= 1` and finite entries.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows < 2 {
            return Err(Error::invalid(format!("need at least 2 rows, got {rows}")));
        }
        if cols < 1 {
            return Err(Error::invalid("need at least 1 column"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at row {}, column {}",
                idx / cols,
                idx % cols
            )));
        }
        Ok(DataMatrix { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {cols}",
                rows[i].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    /// Applies `f` to every entry. The result is validated again.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.cols, values)
    }
}

/// A square symmetric matrix with full (mirrored) storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    values: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from full row-major storage. Entries must be finite and the
    /// matrix exactly symmetric.
    pub fn new(order: usize, values: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("symmetric matrix of order 0"));
        }
        if values.len() != order * order {
            return Err(Error::invalid(format!(
                "expected {} values for order {order}, got {}",
                order * order,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("symmetric matrix has non-finite entries"));
        }
        for i in 0..order {
            for j in i + 1..order {
                if values[i * order + j] != values[j * order + i] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymmetricMatrix { order, values })
    }

    /// Builds from the upper triangle given by `f(i, j)` for `i <= j`,
    /// mirroring bit-identically into the lower triangle.
    pub fn from_upper(order: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![0.0; order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                values[i * order + j] = v;
                values[j * order + i] = v;
            }
        }
        Self::new(order, values)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.order + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.order, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Result<Self> {
        let m = idx.len();
        let mut values = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                values.push(self.get(i, j));
            }
        }
        Self::new(m, values)
    }
}

/// Squared Euclidean distance between two equal-length slices, summed in
/// fixed-size blocks so that the result does not depend on scheduling.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut total = 0.0;
    for (ca, cb) in a.chunks(DIST_BLOCK).zip(b.chunks(DIST_BLOCK)) {
        let mut part = 0.0;
        for (x, y) in ca.iter().zip(cb) {
            let d = x - y;
            part += d * d;
        }
        total += part;
    }
    total
}

/// All pairwise squared Euclidean distances between rows of `x`.
///
/// Rows of the upper triangle are computed in parallel; every entry is
/// produced by a single sequential accumulation, so the output is
/// bit-identical for any worker count.
pub fn pairwise_sq_dists(x: &DataMatrix) -> SymmetricMatrix {
    let n = x.rows();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ri = x.row(i);
            (i + 1..n).map(|j| sq_dist(ri, x.row(j))).collect()
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SymmetricMatrix { order: n, values }
}

/// Elementwise square root of a squared-distance matrix.
pub fn euclidean_from_sq(sq: &SymmetricMatrix) -> SymmetricMatrix {
    SymmetricMatrix {
        order: sq.order,
        values: sq.values.iter().map(|v| v.max(0.0).sqrt()).collect(),
    }
}
