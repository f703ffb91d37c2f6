//! Diffusion coordinates, automatic dimension choice, and the fact that
//! the full embedding reproduces diffusion distances exactly.

use dmc::prelude::*;

fn main() -> Result<()> {
    // two far-apart blobs: at a bandwidth on the plateau between the
    // within-blob and between-blob distance scales one coordinate suffices
    let spec = SynthSpec {
        n_dense: 12,
        n_sparse: 11,
        p: 2000,
        dense_spread: 1.0,
        sparse_spread: 3.0,
        separation: 50.0,
        seed: 5,
    };
    let (x, truth) = make_dense_sparse(&spec)?;
    let dists = pairwise_sq_dists(&x);
    let graph = gaussian_affinity(&dists, 200.0)?;
    let auto = diffusion_embed(&graph, Dim::Auto)?;
    println!("leading eigenvalues {:.4?}", &auto.full_spectrum[..4]);
    println!("chosen dimension d = {}", auto.d);
    let split = spectral_threshold(&auto);
    println!("sign split matches planted clusters: {}", partitions_equal(&split.partition, &truth));

    let full = diffusion_embed(&graph, Dim::Fixed(x.rows() - 1))?;
    let mut worst: f64 = 0.0;
    for i in 0..x.rows() {
        for j in 0..i {
            let oracle = diffusion_distance(&graph, i, j);
            let embedded: f64 = full
                .coords
                .row(i)
                .iter()
                .zip(full.coords.row(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max((embedded - oracle).abs() / oracle.max(1e-300));
        }
    }
    println!("max relative error, embedding vs diffusion distance: {worst:.2e}");
    Ok(())
}
