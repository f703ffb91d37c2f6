//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Each rotation annihilates one off-diagonal entry; sweeping over all
//! pairs repeatedly drives the off-diagonal mass to zero while the
//! accumulated rotations converge to the eigenvectors. Slower than
//! tridiagonal QR by a constant factor, but unconditionally stable and
//! fully deterministic, which is what matters at the matrix sizes used here.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

const MAX_SWEEPS: usize = 100;
const REL_TOL: f64 = 1e-12;
/// Two entries whose magnitudes agree to this relative tolerance count as a
/// tie for the sign convention.
const SIGN_TIE_TOL: f64 = 1e-9;

/// Eigenvalues sorted descending, with orthonormal eigenvectors stored as
/// the columns of an `n × n` row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry `i` of eigenvector `k`.
    #[inline]
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.values.len() + k]
    }

    /// Eigenvector `k` as an owned vector.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.component(i, k)).collect()
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are returned in descending order (stable with respect to the
/// diagonal position they converged at). Each eigenvector is oriented so that
/// its largest-magnitude entry is positive, the lowest index winning ties.
pub fn sym_eig(a: &SymmetricMatrix) -> Result<EigenSystem> {
    let n = a.order();
    let mut m = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let threshold = REL_TOL * a.frobenius_norm();
    let mut converged = false;
    let mut off = off_diagonal_norm(&m, n);
    for _ in 0..MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
        off = off_diagonal_norm(&m, n);
    }
    if !converged && off > threshold {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));

    let values: Vec<f64> = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        let sign = orientation(&v, n, src);
        for i in 0..n {
            vectors[i * n + dst] = sign * v[i * n + src];
        }
    }
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Applies the Jacobi rotation that zeroes `m[p][q]`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        // |theta| overflowed: the rotation angle is ~1/(2 theta)
        0.5 / theta
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        let np = c * akp - s * akq;
        let nq = s * akp + c * akq;
        m[k * n + p] = np;
        m[p * n + k] = np;
        m[k * n + q] = nq;
        m[q * n + k] = nq;
    }
    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

/// +1 or -1 so that the largest-magnitude entry of column `col` is positive.
fn orientation(v: &[f64], n: usize, col: usize) -> f64 {
    let max_abs = (0..n).map(|i| v[i * n + col].abs()).fold(0.0, f64::max);
    let lead = (0..n)
        .find(|&i| v[i * n + col].abs() >= max_abs * (1.0 - SIGN_TIE_TOL))
        .unwrap_or(0);
    if v[lead * n + col] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Orients a vector in place with the same rule as [`sym_eig`].
pub fn orient(x: &mut [f64]) {
    let max_abs = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if let Some(lead) = x.iter().position(|v| v.abs() >= max_abs * (1.0 - SIGN_TIE_TOL)) {
        if x[lead] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}
