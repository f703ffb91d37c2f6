//! Diffusion-map dimensionality reduction and spectral clustering for
//! datasets with few samples and very many features.
//!
//! The pipeline normalizes the data with a signed logarithm, builds a
//! Gaussian affinity graph whose bandwidth is picked from the linear region
//! of the log-log weight-sum curve, embeds the samples with the eigenvectors
//! of the random-walk matrix, and splits them by the sign of the first
//! diffusion coordinate. K-means, agglomerative clustering, PCA and kernel
//! PCA are provided for comparison, along with correlation analysis, file
//! I/O and SVG figures.
//!
//! ```no_run
//! use dmc::prelude::*;
//!
//! let (x, _truth) = make_dense_sparse(&SynthSpec::paper(1))?;
//! let dists = pairwise_sq_dists(&signed_log_normalize(&x));
//! let mut scan = epsilon_scan(&dists, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE)?;
//! let eps = select_epsilon(&mut scan)?;
//! let embedding = diffusion_embed(&gaussian_affinity(&dists, eps)?, Dim::Auto)?;
//! let split = spectral_threshold(&embedding);
//! println!("{:?}", split.partition.labels());
//! # Ok::<(), dmc::Error>(())
//! ```

pub mod baselines;
pub mod clustering;
pub mod diffusion;
pub mod eigen;
mod error;
pub mod io;
pub mod matrix;
pub mod pipeline;
pub mod plot;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::baselines::{kernel_pca_embed, pca_embed, LinearEmbedding};
    pub use crate::clustering::{
        agglomerative, cut_dendrogram, kmeans, partitions_equal, spectral_threshold, Dendrogram,
        Linkage, Partition,
    };
    pub use crate::diffusion::{
        choose_dim, diffusion_distance, diffusion_embed, epsilon_scan, gaussian_affinity,
        select_epsilon, AffinityGraph, DiffusionEmbedding, Dim, EpsilonScan, DEFAULT_DECADES,
        DEFAULT_POINTS_PER_DECADE,
    };
    pub use crate::eigen::{sym_eig, EigenSystem};
    pub use crate::matrix::{pairwise_sq_dists, DataMatrix, SymmetricMatrix};
    pub use crate::preprocess::{correlation_matrix, salient_mask, signed_log_normalize};
    pub use crate::synth::{make_dense_sparse, NormalStream, SynthSpec};
    pub use crate::{Error, Result};
}
