//! Squared-Euclidean geometry and the k-means objective.

use crate::dataset::{CenterSet, Dataset};
use crate::error::{Error, Result};

/// `‖p − q‖²`, checked.
pub fn squared_dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    Ok(sq_dist(p, q))
}

#[inline]
pub(crate) fn sq_dist(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Index of the closest center and its squared distance. Ties go to the
/// lowest index. `centers` must be non-empty.
#[inline]
pub(crate) fn nearest(centers: &CenterSet, p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let dist = sq_dist(p, c);
        if dist < best.1 {
            best = (j, dist);
        }
    }
    best
}

fn check_centers(centers: &CenterSet, d: usize) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    if centers.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: centers.dim() });
    }
    Ok(())
}

/// Φ(C, {p}): squared distance from `p` to its nearest center.
pub fn point_cost(centers: &CenterSet, p: &[f64]) -> Result<f64> {
    check_centers(centers, p.len())?;
    Ok(nearest(centers, p).1)
}

/// Φ(C, X) = Σ_x min_c ‖x − c‖².
pub fn cost(centers: &CenterSet, data: &Dataset) -> Result<f64> {
    check_centers(centers, data.dim())?;
    Ok(data.points().map(|p| nearest(centers, p).1).sum())
}

/// Φ(C, S) for a subset of the dataset given by indices (repeats count twice).
pub fn subset_cost(centers: &CenterSet, data: &Dataset, indices: &[usize]) -> Result<f64> {
    check_centers(centers, data.dim())?;
    let mut total = 0.0;
    for &i in indices {
        data.check_index(i)?;
        total += nearest(centers, data.point(i)).1;
    }
    Ok(total)
}

/// Nearest-center assignment of every point (lowest index on ties).
pub fn assign(centers: &CenterSet, data: &Dataset) -> Result<Vec<usize>> {
    check_centers(centers, data.dim())?;
    Ok(data.points().map(|p| nearest(centers, p).0).collect())
}

/// Coordinate-wise mean of a non-empty point collection.
pub fn centroid<'a, I>(points: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = points.into_iter();
    let first = iter.next().ok_or(Error::EmptySet)?;
    let mut sum = first.to_vec();
    let mut count = 1usize;
    for p in iter {
        if p.len() != sum.len() {
            return Err(Error::DimensionMismatch { expected: sum.len(), found: p.len() });
        }
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
        count += 1;
    }
    let inv = 1.0 / count as f64;
    sum.iter_mut().for_each(|s| *s *= inv);
    Ok(sum)
}

/// Δ₁(S): the optimal 1-means cost, i.e. the cost of `S` about its own centroid.
pub fn delta1<'a, I>(points: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]> + Clone,
{
    let mu = centroid(points.clone())?;
    Ok(points.into_iter().map(|p| sq_dist(p, &mu)).sum())
}

/// Centroid of the dataset rows named by `indices` (a multiset).
pub fn centroid_of(data: &Dataset, indices: &[usize]) -> Result<Vec<f64>> {
    for &i in indices {
        data.check_index(i)?;
    }
    centroid(indices.iter().map(|&i| data.point(i)))
}

pub fn delta1_of(data: &Dataset, indices: &[usize]) -> Result<f64> {
    let mu = centroid_of(data, indices)?;
    Ok(indices.iter().map(|&i| sq_dist(data.point(i), &mu)).sum())
}

/// Cost of a labeling when each cluster is served by its own centroid.
/// Empty clusters contribute nothing.
pub fn labeling_cost(data: &Dataset, labels: &crate::dataset::Labeling) -> Result<f64> {
    labels.check_matches(data)?;
    let mut total = 0.0;
    for members in labels.clusters() {
        if !members.is_empty() {
            total += delta1_of(data, &members)?;
        }
    }
    Ok(total)
}
