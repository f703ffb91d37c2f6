use rayon::prelude::*;

use super::Partition;
use crate::error::{Error, Result};
use crate::matrix::{sq_dist, DataMatrix};
use crate::synth::NormalStream;

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_ITERATIONS: usize = 300;

/// Best-of-restarts Lloyd fit.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub partition: Partition,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances to the cluster means.
    pub wcss: f64,
    /// Which restart produced this fit.
    pub restart: usize,
    pub iterations: usize,
    /// WCSS after every assignment step of the winning restart.
    pub history: Vec<f64>,
}

/// Lloyd's algorithm with `restarts` independent starts.
///
/// Restart `r` draws its first center uniformly from the rows using the
/// stream seeded with `seed + r`, then adds the point farthest from all
/// chosen centers until `k` centers exist. Iterations stop at an assignment
/// fixpoint or after [`MAX_ITERATIONS`]. A cluster that empties is re-seeded
/// with the point farthest from its own centroid. Restarts run in parallel;
/// the lowest WCSS wins, the lower restart index on ties.
pub fn kmeans(x: &DataMatrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansFit> {
    let n = x.rows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k must be in 1..={n}, got {k}")));
    }
    if restarts == 0 {
        return Err(Error::invalid("k-means needs at least one restart"));
    }
    let fits: Vec<KMeansFit> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(x, k, seed.wrapping_add(r as u64), r))
        .collect::<Result<_>>()?;
    Ok(fits
        .into_iter()
        .reduce(|best, f| if f.wcss < best.wcss { f } else { best })
        .expect("at least one restart"))
}

/// Within-cluster sum of squares of a partition, using cluster means.
pub fn wcss(x: &DataMatrix, partition: &Partition) -> f64 {
    let centroids = means(x, partition.labels(), partition.k());
    x.iter_rows()
        .zip(partition.labels())
        .map(|(row, &l)| sq_dist(row, &centroids[l]))
        .sum()
}

fn means(x: &DataMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; x.cols()]; k];
    let mut counts = vec![0usize; k];
    for (row, &l) in x.iter_rows().zip(labels) {
        counts[l] += 1;
        sums[l].iter_mut().zip(row).for_each(|(s, v)| *s += v);
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
    }
    sums
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(row, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centers(x: &DataMatrix, k: usize, rng: &mut NormalStream) -> Vec<Vec<f64>> {
    let n = x.rows();
    let mut centers = vec![x.row(rng.next_below(n)).to_vec()];
    let mut min_d: Vec<f64> = x.iter_rows().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let far = argmax(&min_d);
        centers.push(x.row(far).to_vec());
        let last = centers.last().expect("just pushed");
        for (m, row) in min_d.iter_mut().zip(x.iter_rows()) {
            *m = m.min(sq_dist(row, last));
        }
    }
    centers
}

/// Index of the largest value, lowest index on ties.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &d) in v.iter().enumerate() {
        if d > v[best] {
            best = i;
        }
    }
    best
}

fn lloyd(x: &DataMatrix, k: usize, seed: u64, restart: usize) -> Result<KMeansFit> {
    let mut rng = NormalStream::new(seed);
    let mut centroids = seed_centers(x, k, &mut rng);
    let mut labels: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        let assigned: Vec<(usize, f64)> = x.iter_rows().map(|r| nearest(r, &centroids)).collect();
        let new_labels: Vec<usize> = assigned.iter().map(|a| a.0).collect();
        history.push(assigned.iter().map(|a| a.1).sum());
        if new_labels == labels {
            break;
        }
        labels = new_labels;

        centroids = means(x, &labels, k);
        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        let mut taken = vec![false; x.rows()];
        for c in (0..k).filter(|&c| counts[c] == 0) {
            let spread: Vec<f64> = x
                .iter_rows()
                .zip(&labels)
                .enumerate()
                .map(|(i, (r, &l))| if taken[i] { -1.0 } else { sq_dist(r, &centroids[l]) })
                .collect();
            let far = argmax(&spread);
            taken[far] = true;
            centroids[c] = x.row(far).to_vec();
        }
    }

    let partition = match Partition::new(labels.clone()) {
        Ok(p) => p,
        Err(_) => {
            log::warn!("k-means restart {restart}: fewer than {k} distinct clusters");
            Partition::from_ids(&labels)?
        }
    };
    let wcss = wcss(x, &partition);
    Ok(KMeansFit {
        centroids: means(x, partition.labels(), partition.k()),
        partition,
        wcss,
        restart,
        iterations,
        history,
    })
}
