//! Kernel quantile discrepancy (kdiff) between point clouds built from time
//! series and random fields, together with MMD, MPdist and DTW baselines,
//! PAM k-medoids, parameter tuning on training splits, synthetic data
//! generators and a Monte-Carlo benchmark harness.

pub mod baselines;
pub mod clustering;
pub mod datagen;
pub mod embedding;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod pairwise;
pub mod rng;
pub mod tuning;
pub mod witness;

pub use baselines::{dtw, mmd2, mmd2_measures, mpdist, MeasureSpec, Method};
pub use clustering::{assign_to_medoids, clustering_error, ks_two_sample, pam_kmedoids, ClusteringResult, DistanceMatrix};
pub use embedding::{embed, EmbeddingCloud, Instance, InstanceKind};
pub use error::{Error, Result};
pub use kernels::{kernel_eval, knn_distance_scale, KernelSpec};
pub use witness::{kdiff, kdiff_squared, witness_profile, DiscreteMeasure};
