//! Seeded synthetic instances with planted labelings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, Labeling};
use crate::error::{Error, Result};
use crate::geom::sq_dist;
use crate::structure::check_margin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    GaussianMixture,
    MarginBalls,
    Grid,
    Line,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::GaussianMixture => "gaussian-mixture",
            GenKind::MarginBalls => "margin-balls",
            GenKind::Grid => "grid",
            GenKind::Line => "line",
        })
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-mixture" | "gaussian" => Ok(GenKind::GaussianMixture),
            "margin-balls" => Ok(GenKind::MarginBalls),
            "grid" => Ok(GenKind::Grid),
            "line" => Ok(GenKind::Line),
            other => Err(Error::invalid(format!("unknown generator kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub k: usize,
    pub d: usize,
    pub n_per_cluster: usize,
    /// Distance between cluster centers.
    pub separation: f64,
    /// Noise standard deviation, or ball radius for margin-balls.
    pub spread: f64,
    /// Required margin for margin-balls; ignored otherwise.
    pub gamma: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, k: usize) -> Self {
        Self { kind, k, d: 2, n_per_cluster: 10, separation: 10.0, spread: 1.0, gamma: 2.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.d == 0 || self.n_per_cluster == 0 {
            return Err(Error::invalid("k, d and n_per_cluster must all be at least 1"));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::invalid("separation must be positive"));
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return Err(Error::invalid("spread (sigma or radius) must be non-negative"));
        }
        if self.kind == GenKind::MarginBalls && !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma-margin requires gamma > 1 (every point gamma times closer to its own \
                 cluster mean than any outside point), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Retries allowed for margin-balls before giving up.
const MARGIN_RETRIES: usize = 10;

/// Generates the instance described by `spec`. Identical specs give
/// bit-identical output.
pub fn generate(spec: &GenSpec) -> Result<(Dataset, Labeling)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = match spec.kind {
        GenKind::GaussianMixture | GenKind::MarginBalls => simplex_centers(spec, &mut rng)?,
        GenKind::Grid => grid_centers(spec),
        GenKind::Line => (0..spec.k).map(|i| axis_point(spec.d, i as f64 * spec.separation)).collect(),
    };
    let labels: Vec<usize> = (0..spec.k).flat_map(|c| std::iter::repeat_n(c, spec.n_per_cluster)).collect();
    let labeling = Labeling::with_k(labels, spec.k)?;

    if spec.kind != GenKind::MarginBalls {
        let data = gaussian_points(&centers, spec, &mut rng)?;
        return Ok((data, labeling));
    }

    let mut radius = spec.spread.min(0.9 * spec.separation / (spec.gamma + 1.0));
    for _ in 0..MARGIN_RETRIES {
        let data = ball_points(&centers, spec, radius, &mut rng)?;
        if check_margin(&data, &labeling, spec.gamma)? {
            return Ok((data, labeling));
        }
        radius *= 0.7;
    }
    Err(Error::Generation(format!(
        "no {}-margin instance after {MARGIN_RETRIES} attempts (separation {}, final radius {radius})",
        spec.gamma, spec.separation
    )))
}

fn axis_point(d: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; d];
    p[0] = x;
    p
}

/// Pairwise-equidistant centers at `separation` when d ≥ k − 1, otherwise
/// random placements with pairwise distance at least `separation`.
fn simplex_centers(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let (k, d) = (spec.k, spec.d);
    let scale = spec.separation / std::f64::consts::SQRT_2;
    if k == 1 {
        return Ok(vec![vec![0.0; d]]);
    }
    if d >= k {
        return Ok((0..k)
            .map(|i| {
                let mut p = vec![0.0; d];
                p[i] = scale;
                p
            })
            .collect());
    }
    if d == k - 1 {
        // Basis vectors e_i expressed in the Helmert basis of the sum-zero
        // hyperplane; pairwise distances stay √2.
        return Ok((0..k)
            .map(|i| {
                (1..k)
                    .map(|m| {
                        let norm = ((m * (m + 1)) as f64).sqrt();
                        let coeff = match i.cmp(&m) {
                            std::cmp::Ordering::Less => 1.0,
                            std::cmp::Ordering::Equal => -(m as f64),
                            std::cmp::Ordering::Greater => 0.0,
                        };
                        scale * coeff / norm
                    })
                    .collect()
            })
            .collect());
    }
    let mut side = spec.separation * (k as f64).powf(1.0 / d as f64) * 2.0;
    let min_sq = spec.separation * spec.separation;
    for _ in 0..100 {
        let mut placed: Vec<Vec<f64>> = Vec::with_capacity(k);
        for _ in 0..1000 {
            let p: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..side)).collect();
            if placed.iter().all(|c| sq_dist(c, &p) >= min_sq) {
                placed.push(p);
                if placed.len() == k {
                    return Ok(placed);
                }
            }
        }
        side *= 1.5;
    }
    Err(Error::Generation(format!("could not place {k} separated centers in {d} dimensions")))
}

fn grid_centers(spec: &GenSpec) -> Vec<Vec<f64>> {
    if spec.d == 1 {
        return (0..spec.k).map(|i| vec![i as f64 * spec.separation]).collect();
    }
    let side = (spec.k as f64).sqrt().ceil() as usize;
    (0..spec.k)
        .map(|i| {
            let mut p = vec![0.0; spec.d];
            p[0] = (i % side) as f64 * spec.separation;
            p[1] = (i / side) as f64 * spec.separation;
            p
        })
        .collect()
}

fn gaussian_points(centers: &[Vec<f64>], spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let mut coords = Vec::with_capacity(centers.len() * spec.n_per_cluster * spec.d);
    for c in centers {
        for _ in 0..spec.n_per_cluster {
            for &m in c {
                let z: f64 = rng.sample(StandardNormal);
                coords.push(m + spec.spread * z);
            }
        }
    }
    Dataset::from_flat(coords, spec.d)
}

/// Uniform points in balls of `radius` around each center.
fn ball_points(centers: &[Vec<f64>], spec: &GenSpec, radius: f64, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let d = spec.d;
    let mut coords = Vec::with_capacity(centers.len() * spec.n_per_cluster * d);
    let mut dir = vec![0.0; d];
    for c in centers {
        for _ in 0..spec.n_per_cluster {
            let norm = loop {
                dir.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    break norm;
                }
            };
            let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
            coords.extend(c.iter().zip(&dir).map(|(m, v)| m + r * v / norm));
        }
    }
    Dataset::from_flat(coords, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::write_csv;

    fn csv_bytes(spec: &GenSpec) -> Vec<u8> {
        let (data, labels) = generate(spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &data, Some(&labels)).unwrap();
        buf
    }

    #[test]
    fn margin_balls_satisfy_margin() {
        let spec =
            GenSpec { separation: 10.0, spread: 1.0, gamma: 2.0, seed: 3, ..GenSpec::new(GenKind::MarginBalls, 2) };
        let (data, labels) = generate(&spec).unwrap();
        assert!(check_margin(&data, &labels, 2.0).unwrap());
    }

    #[test]
    fn grid_singletons() {
        let spec = GenSpec { n_per_cluster: 1, spread: 0.0, ..GenSpec::new(GenKind::Grid, 4) };
        let (data, labels) = generate(&spec).unwrap();
        assert_eq!(data.len(), 4);
        assert_eq!(labels.labels(), &[0, 1, 2, 3]);
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(sq_dist(data.point(i), data.point(j)) > 0.0);
            }
        }
    }

    #[test]
    fn deterministic_bytes() {
        for kind in [GenKind::GaussianMixture, GenKind::MarginBalls, GenKind::Grid, GenKind::Line] {
            let spec = GenSpec { seed: 17, ..GenSpec::new(kind, 3) };
            assert_eq!(csv_bytes(&spec), csv_bytes(&spec));
        }
        let a = GenSpec { seed: 1, ..GenSpec::new(GenKind::GaussianMixture, 3) };
        let b = GenSpec { seed: 2, ..a.clone() };
        assert_ne!(csv_bytes(&a), csv_bytes(&b));
    }

    #[test]
    fn simplex_centers_are_equidistant() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for (k, d) in [(3, 2), (4, 3), (3, 5)] {
            let spec = GenSpec { d, separation: 7.0, ..GenSpec::new(GenKind::GaussianMixture, k) };
            let centers = simplex_centers(&spec, &mut rng).unwrap();
            for i in 0..k {
                assert_eq!(centers[i].len(), d);
                for j in i + 1..k {
                    assert!((sq_dist(&centers[i], &centers[j]) - 49.0).abs() < 1e-9);
                }
            }
        }
        let spec = GenSpec { d: 1, separation: 5.0, ..GenSpec::new(GenKind::GaussianMixture, 4) };
        let centers = simplex_centers(&spec, &mut rng).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(sq_dist(&centers[i], &centers[j]) >= 25.0);
            }
        }
    }

    #[test]
    fn validation() {
        let bad_gamma = GenSpec { gamma: 1.0, ..GenSpec::new(GenKind::MarginBalls, 2) };
        assert!(matches!(generate(&bad_gamma), Err(Error::InvalidParameter(_))));
        let zero_k = GenSpec::new(GenKind::Grid, 0);
        assert!(generate(&zero_k).is_err());
        assert_eq!("margin-balls".parse::<GenKind>().unwrap(), GenKind::MarginBalls);
        assert!("spiral".parse::<GenKind>().is_err());
    }
}
