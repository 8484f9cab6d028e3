//! D²-sampling: draw points with probability proportional to their squared
//! distance from the nearest current center. With no centers the law is
//! uniform.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::dataset::{CenterSet, Dataset};
use crate::error::{Error, Result};
use crate::geom::nearest;

/// A point index paired with its (unnormalised) sampling mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub index: usize,
    pub weight: f64,
}

/// Per-point D² weights. All ones when `centers` is empty.
pub fn d2_weights(centers: &CenterSet, data: &Dataset) -> Result<Vec<WeightedPoint>> {
    Ok(weight_vec(centers, data)?
        .into_iter()
        .enumerate()
        .map(|(index, weight)| WeightedPoint { index, weight })
        .collect())
}

pub(crate) fn weight_vec(centers: &CenterSet, data: &Dataset) -> Result<Vec<f64>> {
    if centers.is_empty() {
        return Ok(vec![1.0; data.len()]);
    }
    if centers.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), found: centers.dim() });
    }
    Ok(data.points().map(|p| nearest(centers, p).1).collect())
}

/// Frozen D² distribution for one center set.
///
/// `weight(i)` doubles as Φ(C, {x_i}) when the center set is non-empty.
#[derive(Debug, Clone)]
pub struct D2Sampler {
    weights: Vec<f64>,
    total: f64,
    uniform: bool,
    dist: Option<WeightedIndex<f64>>,
}

impl D2Sampler {
    pub fn new(centers: &CenterSet, data: &Dataset) -> Result<Self> {
        let weights = weight_vec(centers, data)?;
        let total = weights.iter().sum();
        let uniform = centers.is_empty();
        let dist = if uniform { None } else { WeightedIndex::new(&weights).ok() };
        Ok(Self { weights, total, uniform, dist })
    }

    /// True when the center set is non-empty and every weight is zero.
    pub fn is_degenerate(&self) -> bool {
        !self.uniform && self.dist.is_none()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ weights; equals Φ(C, X) for a non-empty center set.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.weights[i] / self.total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.uniform {
            return Ok(rng.random_range(0..self.weights.len()));
        }
        match &self.dist {
            Some(dist) => Ok(dist.sample(rng)),
            None => Err(Error::DegenerateDistribution),
        }
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<usize>> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// `count` independent D²-draws with replacement.
pub fn d2_sample<R: Rng + ?Sized>(
    centers: &CenterSet,
    data: &Dataset,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    D2Sampler::new(centers, data)?.sample_many(count, rng)
}
