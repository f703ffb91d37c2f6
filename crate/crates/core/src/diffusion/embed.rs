use serde::{Deserialize, Serialize};

use super::AffinityGraph;
use crate::eigen::sym_eig;
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Eigenvalue ratio `|λ_{d+2}| / |λ_2|` below which further dimensions are
/// dropped.
const DECAY_RATIO: f64 = 0.05;

/// Requested embedding dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    Auto,
    Fixed(usize),
}

/// Diffusion coordinates `Ψ` together with the spectrum they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionEmbedding {
    /// Row `i` is sample `i`; column `k` is `λ_{k+2} v_{k+2}(x_i)` in
    /// 1-based eigen numbering.
    pub coords: DataMatrix,
    /// Retained eigenvalues `λ_2 … λ_{d+1}`.
    pub eigenvalues: Vec<f64>,
    /// Right eigenvectors of `P` matching `eigenvalues`, normalized to unit
    /// norm under the stationary measure.
    pub eigenvectors: Vec<Vec<f64>>,
    /// All eigenvalues of `P`, descending.
    pub full_spectrum: Vec<f64>,
    pub d: usize,
}

impl DiffusionEmbedding {
    /// First diffusion coordinate of every sample.
    pub fn first_coordinate(&self) -> Vec<f64> {
        self.coords.column(0)
    }
}

/// Embeds the samples of `graph` with the diffusion map at time 1.
///
/// Builds `D^{-1/2} W D^{-1/2}`, diagonalizes it, maps eigenvectors back to
/// right eigenvectors of `P = D⁻¹W` via `v = sqrt(ΣD) · D^{-1/2} u`, which
/// makes `Σ_i φ_i v(i)² = 1`, and scales each by its eigenvalue. The
/// trivial pair `(1, constant)` is skipped.
pub fn diffusion_embed(graph: &AffinityGraph, dim: Dim) -> Result<DiffusionEmbedding> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::invalid("diffusion embedding needs at least 2 samples"));
    }
    let eig = sym_eig(&graph.normalized())?;
    let full_spectrum = eig.values().to_vec();
    let d = match dim {
        Dim::Auto => choose_dim(&full_spectrum),
        Dim::Fixed(d) if (1..n).contains(&d) => d,
        Dim::Fixed(d) => {
            return Err(Error::invalid(format!(
                "embedding dimension must be in 1..={}, got {d}",
                n - 1
            )))
        }
    };

    let total = graph.weight_sum();
    let scale: Vec<f64> = graph.row_sums().iter().map(|di| (total / di).sqrt()).collect();
    let eigenvectors: Vec<Vec<f64>> = (1..=d)
        .map(|k| (0..n).map(|i| scale[i] * eig.component(i, k)).collect())
        .collect();
    let eigenvalues = full_spectrum[1..=d].to_vec();

    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        for (lambda, v) in eigenvalues.iter().zip(&eigenvectors) {
            values.push(lambda * v[i]);
        }
    }
    Ok(DiffusionEmbedding {
        coords: DataMatrix::new(n, d, values)?,
        eigenvalues,
        eigenvectors,
        full_spectrum,
        d,
    })
}

/// Smallest `d >= 1` with `|λ_{d+2}| / |λ_2| < 0.05` (1-based, missing
/// eigenvalues count as zero), capped at `n − 1`. Returns 1 when `λ_2` is
/// numerically zero.
pub fn choose_dim(spectrum: &[f64]) -> usize {
    let n = spectrum.len();
    if n < 3 || spectrum[1].abs() < 1e-12 {
        return 1;
    }
    let lead = spectrum[1].abs();
    (1..n)
        .find(|&d| spectrum.get(d + 1).map_or(0.0, |l| l.abs()) / lead < DECAY_RATIO)
        .unwrap_or(n - 1)
}

#[cfg(test)]
mod tests {
    use super::super::{diffusion_distance, gaussian_affinity};
    use super::*;
    use crate::matrix::{pairwise_sq_dists, SymmetricMatrix};
    use crate::synth::NormalStream;

    fn random_graph(n: usize, p: usize, seed: u64) -> AffinityGraph {
        let mut g = NormalStream::new(seed);
        let x = DataMatrix::new(n, p, (0..n * p).map(|_| g.next_normal()).collect()).unwrap();
        let d = pairwise_sq_dists(&x);
        let mean = d.as_slice().iter().sum::<f64>() / (n * n) as f64;
        gaussian_affinity(&d, mean).unwrap()
    }

    #[test]
    fn identical_points_collapse() {
        let g = gaussian_affinity(&SymmetricMatrix::new(4, vec![0.0; 16]).unwrap(), 1.0).unwrap();
        let e = diffusion_embed(&g, Dim::Fixed(3)).unwrap();
        assert!((e.full_spectrum[0] - 1.0).abs() < 1e-12);
        assert!(e.full_spectrum[1..].iter().all(|l| l.abs() < 1e-12));
        assert!(e.coords.as_slice().iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn two_point_closed_form() {
        let a: f64 = 0.3;
        // W off-diagonal a means d² = -ε ln a
        let d2 = -a.ln();
        let g = gaussian_affinity(&SymmetricMatrix::new(2, vec![0.0, d2, d2, 0.0]).unwrap(), 1.0)
            .unwrap();
        let e = diffusion_embed(&g, Dim::Fixed(1)).unwrap();
        let lambda = (1.0 - a) / (1.0 + a);
        assert!((e.eigenvalues[0] - lambda).abs() < 1e-12);
        // v_2 = (1, -1) under the stationary-weighted normalization
        assert!((e.coords.get(0, 0) - lambda).abs() < 1e-12);
        assert!((e.coords.get(1, 0) + lambda).abs() < 1e-12);
    }

    #[test]
    fn full_embedding_reproduces_diffusion_distance() {
        let g = random_graph(10, 3, 21);
        let e = diffusion_embed(&g, Dim::Fixed(9)).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let oracle = diffusion_distance(&g, i, j);
                let embedded: f64 = e
                    .coords
                    .row(i)
                    .iter()
                    .zip(e.coords.row(j))
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if i == j {
                    assert_eq!(embedded, 0.0);
                } else {
                    assert!((embedded - oracle).abs() / oracle <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn eigenvectors_of_markov_matrix() {
        let g = random_graph(12, 4, 5);
        let p = g.markov();
        let e = diffusion_embed(&g, Dim::Fixed(11)).unwrap();
        for (lambda, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
            for i in 0..12 {
                let pv: f64 = (0..12).map(|j| p[i * 12 + j] * v[j]).sum();
                assert!((pv - lambda * v[i]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn dimension_validation() {
        let g = random_graph(5, 2, 1);
        assert!(diffusion_embed(&g, Dim::Fixed(5)).is_err());
        assert!(diffusion_embed(&g, Dim::Fixed(0)).is_err());
        assert_eq!(diffusion_embed(&g, Dim::Fixed(4)).unwrap().d, 4);
    }

    #[test]
    fn choose_dim_rules() {
        assert_eq!(choose_dim(&[1.0, 0.9, 0.001, 0.0005]), 1);
        assert_eq!(choose_dim(&[1.0, 0.0, 0.0, 0.0]), 1);
        assert_eq!(choose_dim(&[1.0, 0.9, 0.8, 0.7, 0.01]), 3);
        assert_eq!(choose_dim(&[1.0, 0.9, 0.8, 0.7]), 3);
        assert_eq!(choose_dim(&[1.0, 0.5]), 1);
    }
}
