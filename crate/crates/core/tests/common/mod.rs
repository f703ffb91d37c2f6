#![allow(dead_code)]

use dmc::clustering::Linkage;
use dmc::matrix::{DataMatrix, SymmetricMatrix};
use dmc::synth::NormalStream;

pub fn random_points(g: &mut NormalStream, n: usize, p: usize) -> DataMatrix {
    DataMatrix::new(n, p, (0..n * p).map(|_| g.next_normal()).collect()).unwrap()
}

pub fn random_symmetric(g: &mut NormalStream, n: usize, scale: f64) -> SymmetricMatrix {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = scale * g.next_normal();
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    SymmetricMatrix::new(n, v).unwrap()
}

/// Squared distance written out directly, with no blocking.
pub fn naive_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s
}

pub fn naive_dists(x: &DataMatrix) -> Vec<Vec<f64>> {
    let n = x.rows();
    (0..n)
        .map(|i| (0..n).map(|j| naive_sq(x.row(i), x.row(j)).sqrt()).collect())
        .collect()
}

/// Diffusion distance at time 1 built straight from the points:
/// `sqrt(Σ_k (P_ik − P_jk)² / φ_k)` with `φ = D / ΣD`.
pub fn brute_diffusion_distance(x: &DataMatrix, eps: f64, i: usize, j: usize) -> f64 {
    let n = x.rows();
    let w: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| (-naive_sq(x.row(a), x.row(b)) / eps).exp()).collect())
        .collect();
    let deg: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let vol: f64 = deg.iter().sum();
    (0..n)
        .map(|k| {
            let diff = w[i][k] / deg[i] - w[j][k] / deg[j];
            diff * diff / (deg[k] / vol)
        })
        .sum::<f64>()
        .sqrt()
}

/// WCSS of an explicit labelling with 2 groups.
pub fn two_group_wcss(x: &DataMatrix, labels: &[usize]) -> f64 {
    let p = x.cols();
    let mut total = 0.0;
    for g in 0..2 {
        let rows: Vec<&[f64]> = (0..x.rows()).filter(|&i| labels[i] == g).map(|i| x.row(i)).collect();
        if rows.is_empty() {
            continue;
        }
        let mean: Vec<f64> = (0..p)
            .map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64)
            .collect();
        total += rows.iter().map(|r| naive_sq(r, &mean)).sum::<f64>();
    }
    total
}

/// Minimum WCSS over every split into two nonempty groups.
pub fn exhaustive_two_means(x: &DataMatrix) -> f64 {
    let n = x.rows();
    let mut best = f64::INFINITY;
    // sample 0 is pinned to group 0 to skip mirror images
    for mask in 0u32..(1 << (n - 1)) {
        let labels: Vec<usize> = (0..n)
            .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
            .collect();
        if labels.iter().all(|&l| l == 0) {
            continue;
        }
        best = best.min(two_group_wcss(x, &labels));
    }
    best
}

/// Merge record of the naive clustering: (left node, right node, height, size).
pub type NaiveMerge = (usize, usize, f64, usize);

/// Agglomerative clustering that recomputes every cluster distance from
/// the original dissimilarities at each step. Clusters are keyed by their
/// smallest member; the lexicographically lowest closest pair merges.
pub fn naive_agglomerative(d: &[Vec<f64>], linkage: Linkage) -> Vec<NaiveMerge> {
    let n = d.len();
    let mut clusters: Vec<Option<(usize, Vec<usize>)>> = (0..n).map(|i| Some((i, vec![i]))).collect();
    let mut merges = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..n {
            for b in a + 1..n {
                let (Some((_, ma)), Some((_, mb))) = (&clusters[a], &clusters[b]) else {
                    continue;
                };
                let pair: Vec<f64> = ma.iter().flat_map(|&i| mb.iter().map(move |&j| d[i][j])).collect();
                let h = match linkage {
                    Linkage::Single => pair.iter().cloned().fold(f64::INFINITY, f64::min),
                    Linkage::Complete => pair.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    Linkage::Average => pair.iter().sum::<f64>() / pair.len() as f64,
                };
                if best.is_none_or(|(_, _, bh)| h < bh) {
                    best = Some((a, b, h));
                }
            }
        }
        let (a, b, h) = best.unwrap();
        let (na, mut ma) = clusters[a].take().unwrap();
        let (nb, mb) = clusters[b].take().unwrap();
        ma.extend(mb);
        merges.push((na, nb, h, ma.len()));
        clusters[a] = Some((n + step, ma));
    }
    merges
}

/// Leading eigenvector of a symmetric matrix by power iteration.
pub fn power_iteration(m: &[Vec<f64>], iterations: usize) -> Vec<f64> {
    let n = m.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 1e-3).collect();
    for _ in 0..iterations {
        let mut w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
    }
    v
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
