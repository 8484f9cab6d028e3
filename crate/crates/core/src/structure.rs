//! Checkers for the structural assumptions the algorithms are analysed under.

use crate::dataset::{Dataset, Labeling};
use crate::error::{Error, Result};
use crate::geom::{centroid_of, sq_dist};

/// γ-margin: for every pair of clusters i ≠ j, every x ∈ X_i and y ∈ X_j,
/// `γ·‖x − μ(X_i)‖ < ‖y − μ(X_i)‖` (plain Euclidean distances).
///
/// Vacuously true with a single non-empty cluster.
pub fn check_margin(data: &Dataset, labels: &Labeling, gamma: f64) -> Result<bool> {
    labels.check_matches(data)?;
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::invalid(format!("margin parameter gamma must exceed 1, got {gamma}")));
    }
    let clusters: Vec<Vec<usize>> = labels.clusters().into_iter().filter(|c| !c.is_empty()).collect();
    for (i, own) in clusters.iter().enumerate() {
        let mu = centroid_of(data, own)?;
        let radius = own.iter().map(|&x| sq_dist(data.point(x), &mu)).fold(0.0f64, f64::max).sqrt();
        for (j, other) in clusters.iter().enumerate() {
            if i == j {
                continue;
            }
            let closest = other.iter().map(|&y| sq_dist(data.point(y), &mu)).fold(f64::INFINITY, f64::min).sqrt();
            if gamma * radius >= closest {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// (k, ε)-irreducibility: Δ_{k−1}(X) ≥ (1 + ε)·Δ_k(X), with Δ supplied by
/// `optimal_cost` (normally [`crate::exact::optimal_cost`]).
///
/// When both costs are zero the inequality holds with equality.
pub fn check_irreducible<F>(data: &Dataset, k: usize, eps: f64, optimal_cost: F) -> Result<bool>
where
    F: Fn(&Dataset, usize) -> Result<f64>,
{
    if k < 2 {
        return Err(Error::invalid("irreducibility needs k >= 2"));
    }
    let coarse = optimal_cost(data, k - 1)?;
    let fine = optimal_cost(data, k)?;
    Ok(coarse >= (1.0 + eps) * fine)
}
