//! Shared fixtures for the benchmarks.

use ssac_core::{generate, Dataset, GenKind, GenSpec, Labeling};

/// A well-separated Gaussian mixture with `k` clusters of `per_cluster` points.
pub fn mixture(k: usize, per_cluster: usize, d: usize, seed: u64) -> (Dataset, Labeling) {
    let spec =
        GenSpec { d, n_per_cluster: per_cluster, separation: 20.0, seed, ..GenSpec::new(GenKind::GaussianMixture, k) };
    generate(&spec).expect("fixture parameters are valid")
}
