//! Linear PCA and Gaussian kernel PCA embeddings for method comparison.

use crate::diffusion::gaussian_affinity;
use crate::eigen::sym_eig;
use crate::error::{Error, Result};
use crate::matrix::{pairwise_sq_dists, DataMatrix, SymmetricMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearEmbedding {
    pub coords: DataMatrix,
    /// Share of total variance carried by each retained component.
    pub explained: Vec<f64>,
}

/// Principal component scores through the `n × n` Gram matrix of centered
/// rows, which is cheap when `n ≪ p`. Column `k` is `sqrt(λ_k) u_k`.
pub fn pca_embed(x: &DataMatrix, d: usize) -> Result<LinearEmbedding> {
    let (n, p) = (x.rows(), x.cols());
    if d == 0 || d > n.min(p) {
        return Err(Error::invalid(format!(
            "PCA dimension must be in 1..={}, got {d}",
            n.min(p)
        )));
    }
    let mut mean = vec![0.0; p];
    for row in x.iter_rows() {
        mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered: Vec<Vec<f64>> = x
        .iter_rows()
        .map(|r| r.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let gram = SymmetricMatrix::from_upper(n, |i, j| {
        centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum()
    })?;
    spectral_scores(&gram, d)
}

/// Kernel PCA with `K_ij = exp(−‖x_i − x_j‖² / ε)`, double-centered.
pub fn kernel_pca_embed(x: &DataMatrix, epsilon: f64, d: usize) -> Result<LinearEmbedding> {
    let n = x.rows();
    if d == 0 || d >= n {
        return Err(Error::invalid(format!(
            "kernel PCA dimension must be in 1..={}, got {d}",
            n - 1
        )));
    }
    let kernel = gaussian_affinity(&pairwise_sq_dists(x), epsilon)?;
    spectral_scores(&double_center(kernel.weights()), d)
}

/// `K − row means − column means + grand mean`.
pub fn double_center(k: &SymmetricMatrix) -> SymmetricMatrix {
    let n = k.order();
    let row_mean: Vec<f64> = (0..n)
        .map(|i| k.row(i).iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    SymmetricMatrix::from_upper(n, |i, j| k.get(i, j) - row_mean[i] - row_mean[j] + grand)
        .expect("centered kernel is finite")
}

fn spectral_scores(m: &SymmetricMatrix, d: usize) -> Result<LinearEmbedding> {
    let n = m.order();
    let eig = sym_eig(m)?;
    let clamped: Vec<f64> = eig.values().iter().map(|l| l.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let explained = clamped[..d]
        .iter()
        .map(|l| if total > 0.0 { l / total } else { 0.0 })
        .collect();
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        for (k, l) in clamped[..d].iter().enumerate() {
            values.push(l.sqrt() * eig.component(i, k));
        }
    }
    Ok(LinearEmbedding {
        coords: DataMatrix::new(n, d, values)?,
        explained,
    })
}

/// Rescales every column to unit maximum absolute value; all-zero columns
/// are left alone.
pub fn scale_columns(m: &DataMatrix) -> DataMatrix {
    let (n, d) = (m.rows(), m.cols());
    let peaks: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| m.get(i, j).abs()).fold(0.0, f64::max))
        .collect();
    let values = (0..n)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| if peaks[j] > 0.0 { m.get(i, j) / peaks[j] } else { m.get(i, j) })
        .collect();
    DataMatrix::new(n, d, values).expect("scaling preserves shape and finiteness")
}
