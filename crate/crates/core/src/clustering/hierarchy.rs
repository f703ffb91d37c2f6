use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

/// One agglomeration step. Leaves are nodes `0..n`; the merge at step `s`
/// creates node `n + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub node: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Leaves in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n);
        if self.n == 0 {
            return order;
        }
        let root = if self.merges.is_empty() { 0 } else { self.n + self.merges.len() - 1 };
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if node < self.n {
                order.push(node);
            } else {
                let m = &self.merges[node - self.n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }
}

/// Agglomerative clustering on a dissimilarity matrix.
///
/// Clusters are tracked in slots named after their smallest leaf. Each step
/// merges the closest pair of slots, the lexicographically lowest pair on
/// ties, and updates distances with the Lance–Williams rule for the chosen
/// linkage. Every slot caches its nearest higher-indexed slot so a step
/// costs O(n) apart from cache repairs.
pub fn agglomerative(dists: &SymmetricMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = dists.order();
    for i in 0..n {
        if dists.get(i, i) != 0.0 {
            return Err(Error::invalid(format!("dissimilarity diagonal nonzero at {i}")));
        }
    }
    if dists.as_slice().iter().any(|&d| d < 0.0) {
        return Err(Error::invalid("dissimilarities must be nonnegative"));
    }

    let mut d = dists.as_slice().to_vec();
    let mut active = vec![true; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut nn: Vec<(usize, f64)> = (0..n).map(|a| nearest_above(&d, &active, n, a)).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut a = usize::MAX;
        for s in (0..n).filter(|&s| active[s] && nn[s].0 != usize::MAX) {
            if a == usize::MAX || nn[s].1 < nn[a].1 {
                a = s;
            }
        }
        let (b, height) = nn[a];

        merges.push(Merge {
            left: node[a],
            right: node[b],
            height,
            node: n + step,
            size: size[a] + size[b],
        });

        active[b] = false;
        for k in (0..n).filter(|&k| active[k] && k != a) {
            let (dak, dbk) = (d[a * n + k], d[b * n + k]);
            let merged = match linkage {
                Linkage::Single => dak.min(dbk),
                Linkage::Complete => dak.max(dbk),
                Linkage::Average => {
                    let (sa, sb) = (size[a] as f64, size[b] as f64);
                    // clamp keeps rounding from dipping below both inputs
                    ((sa * dak + sb * dbk) / (sa + sb)).max(dak.min(dbk))
                }
            };
            d[a * n + k] = merged;
            d[k * n + a] = merged;
        }
        size[a] += size[b];
        node[a] = n + step;

        nn[a] = nearest_above(&d, &active, n, a);
        for r in (0..a).filter(|&r| active[r]) {
            if nn[r].0 == a || nn[r].0 == b {
                nn[r] = nearest_above(&d, &active, n, r);
            } else if d[r * n + a] < nn[r].1 || (d[r * n + a] == nn[r].1 && a < nn[r].0) {
                nn[r] = (a, d[r * n + a]);
            }
        }
        for r in (a + 1..b).filter(|&r| active[r]) {
            if nn[r].0 == b {
                nn[r] = nearest_above(&d, &active, n, r);
            }
        }
    }
    Ok(Dendrogram { n, merges })
}

/// Closest active slot above `a` (lowest index on ties), or `usize::MAX`.
fn nearest_above(d: &[f64], active: &[bool], n: usize, a: usize) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for b in (a + 1..n).filter(|&b| active[b]) {
        if best.0 == usize::MAX || d[a * n + b] < best.1 {
            best = (b, d[a * n + b]);
        }
    }
    best
}

/// Cuts the tree into `k` clusters by undoing the `k − 1` highest merges.
/// Labels follow first appearance in sample order.
pub fn cut_dendrogram(tree: &Dendrogram, k: usize) -> Result<Partition> {
    let n = tree.n;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k must be in 1..={n}, got {k}")));
    }
    let mut parent: Vec<usize> = (0..n + tree.merges.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in &tree.merges[..n - k] {
        let (l, r) = (root(&mut parent, m.left), root(&mut parent, m.right));
        parent[l] = m.node;
        parent[r] = m.node;
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut parent, i)).collect();
    Partition::from_ids(&roots)
}
