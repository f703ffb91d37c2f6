//! Seeded synthetic data with a planted dense/sparse two-cluster structure.

use serde::{Deserialize, Serialize};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Counter-based stream of standard normal variates.
///
/// Raw word `i` (0-based) is the SplitMix64 finalizer applied to
/// `seed + (i + 1) * 0x9E3779B97F4A7C15` (wrapping). Uniforms take the top
/// 53 bits. Normals come in Box–Muller pairs from two consecutive words:
/// `u1 = (w0 >> 11 + 1) * 2^-53` in (0, 1], `u2 = (w1 >> 11) * 2^-53` in
/// [0, 1), `z0 = sqrt(-2 ln u1) cos(2π u2)`, `z1 = sqrt(-2 ln u1) sin(2π u2)`.
#[derive(Debug, Clone)]
pub struct NormalStream {
    seed: u64,
    counter: u64,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            seed,
            counter: 0,
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN));
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform integer in `0..n`. `n` must be nonzero.
    pub fn next_below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_M53;
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Parameters of the dense/sparse two-cluster generator.
///
/// Spreads are RMS distances from the cluster center: each coordinate gets
/// noise with standard deviation `spread / sqrt(p)`, so `E‖x − c‖² =
/// spread²` independent of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_dense: usize,
    pub n_sparse: usize,
    pub p: usize,
    pub dense_spread: f64,
    pub sparse_spread: f64,
    pub separation: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Desk-scale stand-in for a 23-map study: 12 dense + 11 sparse samples,
    /// 5000 features.
    pub fn paper(seed: u64) -> Self {
        SynthSpec {
            n_dense: 12,
            n_sparse: 11,
            p: 5000,
            dense_spread: 1.0,
            sparse_spread: 2.0,
            separation: 2.5,
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.n_dense + self.n_sparse
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() < 4 || self.n_dense == 0 || self.n_sparse == 0 {
            return Err(Error::invalid(format!(
                "need n_dense, n_sparse >= 1 and n_dense + n_sparse >= 4 (got {} + {})",
                self.n_dense, self.n_sparse
            )));
        }
        if self.p == 0 {
            return Err(Error::invalid("p must be at least 1"));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.dense_spread) || !positive(self.sparse_spread) {
            return Err(Error::invalid("spreads must be positive"));
        }
        if self.dense_spread > self.sparse_spread {
            return Err(Error::invalid("dense_spread must not exceed sparse_spread"));
        }
        if !self.separation.is_finite() || self.separation < 0.0 {
            return Err(Error::invalid("separation must be nonnegative"));
        }
        Ok(())
    }
}

/// Generates the dataset and its planted partition (label 0 = dense,
/// label 1 = sparse).
///
/// Centers: `c1 = separation · a` and `c2 = c1 + separation · b` for random
/// orthonormal directions `a`, `b`, so `‖c1 − c2‖ = separation`. Rows are
/// shuffled with a seeded Fisher–Yates pass.
pub fn make_dense_sparse(spec: &SynthSpec) -> Result<(DataMatrix, Partition)> {
    spec.validate()?;
    let p = spec.p;
    let n = spec.n();
    let mut rng = NormalStream::new(spec.seed);

    let mut a: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
    let mut b: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
    normalize(&mut a);
    let proj: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    b.iter_mut().zip(&a).for_each(|(y, x)| *y -= proj * x);
    normalize(&mut b);

    let c1: Vec<f64> = a.iter().map(|v| spec.separation * v).collect();
    let c2: Vec<f64> = c1
        .iter()
        .zip(&b)
        .map(|(c, v)| c + spec.separation * v)
        .collect();

    let mut rows: Vec<(Vec<f64>, usize)> = Vec::with_capacity(n);
    let dense_sd = spec.dense_spread / (p as f64).sqrt();
    let sparse_sd = spec.sparse_spread / (p as f64).sqrt();
    for _ in 0..spec.n_dense {
        rows.push((c1.iter().map(|c| c + dense_sd * rng.next_normal()).collect(), 0));
    }
    for _ in 0..spec.n_sparse {
        rows.push((c2.iter().map(|c| c + sparse_sd * rng.next_normal()).collect(), 1));
    }
    for i in (1..n).rev() {
        let j = rng.next_below(i + 1);
        rows.swap(i, j);
    }

    let labels = rows.iter().map(|r| r.1).collect();
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok((DataMatrix::new(n, p, values)?, Partition::new(labels)?))
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pairwise_sq_dists;

    #[test]
    fn same_seed_same_stream() {
        let mut a = NormalStream::new(9);
        let mut b = NormalStream::new(9);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_normal().to_bits(), b.next_normal().to_bits());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = NormalStream::new(1);
        let mut b = NormalStream::new(2);
        let same = (0..1000).all(|_| a.next_normal() == b.next_normal());
        assert!(!same);
    }

    #[test]
    fn moments() {
        let mut g = NormalStream::new(2024);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| g.next_normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn uniform_range() {
        let mut g = NormalStream::new(0);
        for _ in 0..10_000 {
            let u = g.next_uniform();
            assert!((0.0..1.0).contains(&u));
            assert!(g.next_below(7) < 7);
        }
    }

    #[test]
    fn deterministic_generation() {
        let spec = SynthSpec::paper(3);
        let (x1, l1) = make_dense_sparse(&spec).unwrap();
        let (x2, l2) = make_dense_sparse(&spec).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(l1, l2);
    }

    #[test]
    fn planted_sizes() {
        let spec = SynthSpec::paper(8);
        let (x, truth) = make_dense_sparse(&spec).unwrap();
        assert_eq!((x.rows(), x.cols()), (23, 5000));
        assert_eq!(truth.sizes(), vec![12, 11]);
    }

    #[test]
    fn degenerate_control_still_valid() {
        let spec = SynthSpec {
            n_dense: 5,
            n_sparse: 5,
            p: 30,
            dense_spread: 1.0,
            sparse_spread: 1.0,
            separation: 0.0,
            seed: 4,
        };
        let (x, truth) = make_dense_sparse(&spec).unwrap();
        assert_eq!((x.rows(), x.cols()), (10, 30));
        assert_eq!(truth.k(), 2);
    }

    #[test]
    fn rejects_invalid_specs() {
        let mut s = SynthSpec::paper(0);
        s.n_dense = 1;
        s.n_sparse = 2;
        assert!(s.validate().is_err());
        let mut s = SynthSpec::paper(0);
        s.dense_spread = 0.0;
        assert!(s.validate().is_err());
        let mut s = SynthSpec::paper(0);
        s.dense_spread = 5.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn dense_tighter_than_sparse_tighter_than_cross() {
        let spec = SynthSpec {
            n_dense: 12,
            n_sparse: 11,
            p: 5000,
            dense_spread: 1.0,
            sparse_spread: 3.0,
            separation: 50.0,
            seed: 42,
        };
        let (x, truth) = make_dense_sparse(&spec).unwrap();
        let d = pairwise_sq_dists(&x);
        let (mut dd, mut ss, mut cc) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..x.rows() {
            for j in i + 1..x.rows() {
                let dist = d.get(i, j).sqrt();
                match (truth.label(i), truth.label(j)) {
                    (0, 0) => dd.push(dist),
                    (1, 1) => ss.push(dist),
                    _ => cc.push(dist),
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&dd) < mean(&ss));
        assert!(mean(&ss) < mean(&cc));
    }
}
