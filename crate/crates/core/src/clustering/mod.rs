//! Partitions, the zero-threshold spectral split, and the comparison
//! clusterers (k-means and agglomerative hierarchical).

mod hierarchy;
mod kmeans;

use serde::Serialize;

use crate::diffusion::DiffusionEmbedding;
use crate::error::{Error, Result};

pub use hierarchy::{agglomerative, cut_dendrogram, Dendrogram, Linkage, Merge};
pub use kmeans::{kmeans, wcss, KMeansFit, DEFAULT_RESTARTS, MAX_ITERATIONS};

/// Cluster label per sample. Labels are `0..k` and every label is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("partition of zero samples"));
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("cluster label {missing} is unused")));
        }
        Ok(Partition { labels, k })
    }

    /// Relabels arbitrary ids by order of first appearance.
    pub fn from_ids<T: PartialEq>(ids: &[T]) -> Result<Self> {
        let mut seen: Vec<&T> = Vec::new();
        let labels = ids
            .iter()
            .map(|id| match seen.iter().position(|s| *s == id) {
                Some(l) => l,
                None => {
                    seen.push(id);
                    seen.len() - 1
                }
            })
            .collect();
        Self::new(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Sample indices of cluster `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == c).collect()
    }
}

/// True iff the two labelings agree up to a bijection of label ids.
pub fn partitions_equal(a: &Partition, b: &Partition) -> bool {
    if a.len() != b.len() || a.k() != b.k() {
        return false;
    }
    let mut forward = vec![None; a.k()];
    let mut backward = vec![None; b.k()];
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        match (forward[la], backward[lb]) {
            (None, None) => {
                forward[la] = Some(lb);
                backward[lb] = Some(la);
            }
            (Some(x), Some(y)) if x == lb && y == la => {}
            _ => return false,
        }
    }
    true
}

/// Result of thresholding the first diffusion coordinate at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSplit {
    pub partition: Partition,
    /// Set when every sample fell on one side and a single cluster resulted.
    pub degenerate: bool,
}

/// Two-way split by the sign of the first diffusion coordinate: label 1 for
/// `ψ ≥ 0`, label 0 for `ψ < 0`.
pub fn spectral_threshold(embedding: &DiffusionEmbedding) -> SpectralSplit {
    threshold_at_zero(&embedding.first_coordinate())
}

/// Sign split of an arbitrary coordinate vector; see [`spectral_threshold`].
pub fn threshold_at_zero(coord: &[f64]) -> SpectralSplit {
    let labels: Vec<usize> = coord.iter().map(|&c| usize::from(c >= 0.0)).collect();
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == labels.len() {
        log::warn!("spectral threshold: every sample on one side of zero; single cluster");
        return SpectralSplit {
            partition: Partition::new(vec![0; labels.len()]).expect("nonempty"),
            degenerate: true,
        };
    }
    SpectralSplit {
        partition: Partition::new(labels).expect("both labels present"),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(labels: &[usize]) -> Partition {
        Partition::new(labels.to_vec()).unwrap()
    }

    #[test]
    fn label_swap_is_equal() {
        assert!(partitions_equal(&p(&[0, 0, 1]), &p(&[1, 1, 0])));
        assert!(!partitions_equal(&p(&[0, 0, 1]), &p(&[0, 1, 1])));
        assert!(!partitions_equal(&p(&[0, 1, 1]), &p(&[0, 1, 2])));
        assert!(!partitions_equal(&p(&[0, 1]), &p(&[0, 1, 1])));
    }

    #[test]
    fn unused_labels_rejected() {
        assert!(Partition::new(vec![0, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn from_ids_relabels_by_first_appearance() {
        let part = Partition::from_ids(&["b", "a", "b", "c"]).unwrap();
        assert_eq!(part.labels(), &[0, 1, 0, 2]);
        assert_eq!(part.sizes(), vec![2, 1, 1]);
        assert_eq!(part.members(0), vec![0, 2]);
    }

    #[test]
    fn threshold_definition() {
        let s = threshold_at_zero(&[-0.3, -0.1, 0.2, 0.4]);
        assert_eq!(s.partition.labels(), &[0, 0, 1, 1]);
        assert!(!s.degenerate);
    }

    #[test]
    fn exact_zero_goes_positive() {
        let s = threshold_at_zero(&[-1.0, 0.0, 1.0]);
        assert_eq!(s.partition.labels(), &[0, 1, 1]);
    }

    #[test]
    fn all_zero_is_degenerate() {
        let s = threshold_at_zero(&[0.0; 4]);
        assert!(s.degenerate);
        assert_eq!(s.partition.k(), 1);
    }

    #[test]
    fn sign_flip_swaps_labels() {
        let c = [0.5, -0.2, 0.1, -0.7, 0.3];
        let flipped: Vec<f64> = c.iter().map(|v| -v).collect();
        assert!(partitions_equal(
            &threshold_at_zero(&c).partition,
            &threshold_at_zero(&flipped).partition
        ));
    }
}
