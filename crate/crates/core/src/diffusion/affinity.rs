use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Gaussian kernel matrix `W` with its bandwidth and row sums `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    weights: SymmetricMatrix,
    epsilon: f64,
    row_sums: Vec<f64>,
}

impl AffinityGraph {
    pub fn n(&self) -> usize {
        self.weights.order()
    }

    pub fn weights(&self) -> &SymmetricMatrix {
        &self.weights
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    /// Sum of all weights, `L = Σ_ij W_ij`.
    pub fn weight_sum(&self) -> f64 {
        self.row_sums.iter().sum()
    }

    /// Stationary distribution of the random walk, `φ_i = D_ii / Σ D`.
    pub fn stationary(&self) -> Vec<f64> {
        let total = self.weight_sum();
        self.row_sums.iter().map(|d| d / total).collect()
    }

    /// Row-stochastic transition matrix `P = D⁻¹ W`, row-major.
    pub fn markov(&self) -> Vec<f64> {
        let n = self.n();
        let mut p = Vec::with_capacity(n * n);
        for i in 0..n {
            let d = self.row_sums[i];
            p.extend(self.weights.row(i).iter().map(|w| w / d));
        }
        p
    }

    /// Symmetric conjugate `D^{-1/2} W D^{-1/2}`, which shares the
    /// eigenvalues of `P`.
    pub fn normalized(&self) -> SymmetricMatrix {
        let inv_sqrt: Vec<f64> = self.row_sums.iter().map(|d| 1.0 / d.sqrt()).collect();
        SymmetricMatrix::from_upper(self.n(), |i, j| {
            self.weights.get(i, j) * inv_sqrt[i] * inv_sqrt[j]
        })
        .expect("normalized affinity is finite and symmetric")
    }
}

/// `W_ij = exp(−d²_ij / ε)` from a matrix of squared distances.
pub fn gaussian_affinity(sq_dists: &SymmetricMatrix, epsilon: f64) -> Result<AffinityGraph> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if sq_dists.as_slice().iter().any(|&d| d < 0.0) {
        return Err(Error::invalid("squared distances must be nonnegative"));
    }
    let n = sq_dists.order();
    let weights = SymmetricMatrix::from_upper(n, |i, j| {
        if i == j {
            1.0
        } else {
            (-sq_dists.get(i, j) / epsilon).exp()
        }
    })?;
    let row_sums = (0..n).map(|i| weights.row(i).iter().sum()).collect();
    Ok(AffinityGraph {
        weights,
        epsilon,
        row_sums,
    })
}

/// One-step diffusion distance evaluated straight from the transition
/// matrix: `sqrt(Σ_k (P_ik − P_jk)² / φ_k)`.
pub fn diffusion_distance(graph: &AffinityGraph, i: usize, j: usize) -> f64 {
    let w = graph.weights();
    let d = graph.row_sums();
    let total = graph.weight_sum();
    let mut acc = 0.0;
    for k in 0..graph.n() {
        let diff = w.get(i, k) / d[i] - w.get(j, k) / d[j];
        acc += diff * diff / (d[k] / total);
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_give_all_ones() {
        let g = gaussian_affinity(&SymmetricMatrix::new(3, vec![0.0; 9]).unwrap(), 0.5).unwrap();
        assert!(g.weights().as_slice().iter().all(|&w| w == 1.0));
        assert_eq!(g.row_sums(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn distance_equal_to_epsilon() {
        let d = SymmetricMatrix::new(2, vec![0.0, 2.5, 2.5, 0.0]).unwrap();
        let g = gaussian_affinity(&d, 2.5).unwrap();
        assert!((g.weights().get(0, 1) - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn three_points_on_a_line() {
        // squared distances between 0, 1, 2
        let d = SymmetricMatrix::new(3, vec![0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0]).unwrap();
        let g = gaussian_affinity(&d, 1.0).unwrap();
        let e1 = (-1.0f64).exp();
        let e4 = (-4.0f64).exp();
        let expect = [[1.0, e1, e4], [e1, 1.0, e1], [e4, e1, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.weights().get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        assert!((g.row_sums()[0] - (1.0 + e1 + e4)).abs() < 1e-15);
        assert!((g.row_sums()[1] - (1.0 + 2.0 * e1)).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        let d = SymmetricMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(gaussian_affinity(&d, 0.0).is_err());
        assert!(gaussian_affinity(&d, -1.0).is_err());
        assert!(gaussian_affinity(&d, f64::NAN).is_err());
    }

    #[test]
    fn markov_rows_sum_to_one() {
        let d = SymmetricMatrix::new(3, vec![0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0]).unwrap();
        let g = gaussian_affinity(&d, 0.7).unwrap();
        for row in g.markov().chunks(3) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diffusion_distance_basics() {
        let d = SymmetricMatrix::new(3, vec![0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0]).unwrap();
        let g = gaussian_affinity(&d, 1.0).unwrap();
        assert_eq!(diffusion_distance(&g, 1, 1), 0.0);
        assert!((diffusion_distance(&g, 0, 2) - diffusion_distance(&g, 2, 0)).abs() < 1e-14);
        let same = gaussian_affinity(&SymmetricMatrix::new(3, vec![0.0; 9]).unwrap(), 1.0).unwrap();
        assert_eq!(diffusion_distance(&same, 0, 2), 0.0);
    }
}
