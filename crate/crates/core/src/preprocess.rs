//! Log normalization, absolute correlation matrices, and salient-feature masks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DataMatrix, SymmetricMatrix};

/// `sign(x) · ln(1 + |x|)`: odd, monotone, and defined on all reals.
#[inline]
pub fn signed_log(x: f64) -> f64 {
    x.signum() * x.abs().ln_1p()
}

/// Inverse of [`signed_log`].
#[inline]
pub fn signed_log_inverse(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y.signum() * y.abs().exp_m1()
    }
}

pub fn signed_log_normalize(x: &DataMatrix) -> DataMatrix {
    x.map(signed_log)
        .expect("signed log of finite values is finite")
}

/// Absolute Pearson correlations between rows, diagonal exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(SymmetricMatrix);

impl CorrelationMatrix {
    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.0
    }

    /// Correlations restricted to the given samples.
    pub fn submatrix(&self, idx: &[usize]) -> Result<CorrelationMatrix> {
        Ok(CorrelationMatrix(self.0.submatrix(idx)?))
    }

    /// Mean off-diagonal entry over pairs within `idx`, or `None` for fewer
    /// than two samples.
    pub fn mean_within(&self, idx: &[usize]) -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                sum += self.get(i, j);
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Mean entry over all pairs `(i, j)` with `i` in `a` and `j` in `b`.
    pub fn mean_between(&self, a: &[usize], b: &[usize]) -> Option<f64> {
        if a.is_empty() || b.is_empty() {
            return None;
        }
        let sum: f64 = a
            .iter()
            .flat_map(|&i| b.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .sum();
        Some(sum / (a.len() * b.len()) as f64)
    }
}

/// Absolute Pearson correlation between every pair of rows, using
/// population (1/p) moments.
pub fn correlation_matrix(x: &DataMatrix) -> Result<CorrelationMatrix> {
    let n = x.rows();
    let p = x.cols() as f64;
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for (i, row) in x.iter_rows().enumerate() {
        let mean = row.iter().sum::<f64>() / p;
        let c: Vec<f64> = row.iter().map(|v| v - mean).collect();
        let ss = c.iter().map(|v| v * v).sum::<f64>();
        if ss == 0.0 {
            return Err(Error::Degenerate(format!("row {i} has zero variance")));
        }
        norms.push(ss.sqrt());
        centered.push(c);
    }
    let m = SymmetricMatrix::from_upper(n, |i, j| {
        if i == j {
            return 1.0;
        }
        let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
        (dot / (norms[i] * norms[j])).abs().min(1.0)
    })?;
    Ok(CorrelationMatrix(m))
}

/// Per-feature flags for values far from the mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SalientMask {
    pub mask: Vec<bool>,
    pub k_sigma: f64,
    /// Set when the input had zero spread and nothing could be flagged.
    pub zero_spread: bool,
}

impl SalientMask {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Flags entries with `|x − mean| > k_sigma · std` (population std, strict).
pub fn salient_mask(x: &[f64], k_sigma: f64) -> Result<SalientMask> {
    if x.len() < 2 {
        return Err(Error::invalid("salient mask needs at least 2 values"));
    }
    if x.iter().any(|v| !v.is_finite()) || !k_sigma.is_finite() {
        return Err(Error::invalid("salient mask input must be finite"));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std == 0.0 {
        log::warn!("salient mask: zero standard deviation, nothing flagged");
        return Ok(SalientMask {
            mask: vec![false; x.len()],
            k_sigma,
            zero_spread: true,
        });
    }
    let cut = k_sigma * std;
    Ok(SalientMask {
        mask: x.iter().map(|v| (v - mean).abs() > cut).collect(),
        k_sigma,
        zero_spread: false,
    })
}
