//! PCA and kernel PCA next to the diffusion map, written as an SVG overlay.

use dmc::baselines::scale_columns;
use dmc::plot::{render, Figure, Marker, Series};
use dmc::prelude::*;

fn two_columns(m: &DataMatrix) -> Vec<(f64, f64)> {
    scale_columns(m).iter_rows().map(|r| (r[0], r[1])).collect()
}

fn main() -> Result<()> {
    let (x, _) = make_dense_sparse(&SynthSpec::paper(2))?;
    let data = signed_log_normalize(&x);
    let dists = pairwise_sq_dists(&data);
    let mut scan = epsilon_scan(&dists, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE)?;
    let eps = select_epsilon(&mut scan)?;

    let diffusion = diffusion_embed(&gaussian_affinity(&dists, eps)?, Dim::Fixed(2))?;
    let pca = pca_embed(&data, 2)?;
    let kpca = kernel_pca_embed(&data, eps, 2)?;
    println!("PCA explained variance {:.3?}", pca.explained);
    println!("kernel PCA explained variance {:.3?}", kpca.explained);

    let series = [
        ("diffusion map", Marker::Cross, &diffusion.coords),
        ("PCA", Marker::Circle, &pca.coords),
        ("kernel PCA", Marker::Square, &kpca.coords),
    ]
    .map(|(name, marker, coords)| Series {
        name: name.into(),
        marker,
        points: two_columns(coords),
        labels: vec![],
    });
    let svg = render(&Figure::Comparison { series: &series, title: "Method comparison" })?;
    let path = std::env::temp_dir().join("dmc_comparison.svg");
    std::fs::write(&path, svg).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    println!("wrote {}", path.display());
    Ok(())
}
