//! Diffusion maps: Gaussian affinities, bandwidth selection from the
//! weight-sum curve, and the spectral embedding of the Markov matrix.

mod affinity;
mod embed;
mod scan;

pub use affinity::{diffusion_distance, gaussian_affinity, AffinityGraph};
pub use embed::{choose_dim, diffusion_embed, DiffusionEmbedding, Dim};
pub use scan::{epsilon_scan, select_epsilon, EpsilonScan, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE};
