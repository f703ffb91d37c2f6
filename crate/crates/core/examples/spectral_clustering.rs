//! Spectral thresholding against k-means and average-linkage clustering on
//! several synthetic datasets.

use dmc::matrix::euclidean_from_sq;
use dmc::prelude::*;

fn main() -> Result<()> {
    for seed in 0..5 {
        let (x, truth) = make_dense_sparse(&SynthSpec::paper(seed))?;
        let data = signed_log_normalize(&x);
        let dists = pairwise_sq_dists(&data);
        let mut scan = epsilon_scan(&dists, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE)?;
        let eps = select_epsilon(&mut scan)?;
        let embedding = diffusion_embed(&gaussian_affinity(&dists, eps)?, Dim::Auto)?;

        let spectral = spectral_threshold(&embedding).partition;
        let km = kmeans(&data, 2, seed, 10)?.partition;
        let tree = agglomerative(&euclidean_from_sq(&dists), Linkage::Average)?;
        let hier = cut_dendrogram(&tree, 2)?;

        println!(
            "seed {seed}: eps {eps:.3}  spectral=truth {}  kmeans=spectral {}  hierarchical=spectral {}",
            partitions_equal(&spectral, &truth),
            partitions_equal(&km, &spectral),
            partitions_equal(&hier, &spectral),
        );
    }
    Ok(())
}
