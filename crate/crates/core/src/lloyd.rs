//! Alternating (Lloyd) refinement, used only as an optional reporting post-pass.

use crate::dataset::{CenterSet, Dataset};
use crate::error::Result;
use crate::geom::{assign, cost};

/// Iterates assign/recenter from `start` until assignments stop changing or
/// `max_iters` passes. Clusters that empty out keep their previous center.
pub fn refine(data: &Dataset, start: &CenterSet, max_iters: usize) -> Result<(CenterSet, f64)> {
    let mut centers = start.clone();
    let mut labels = assign(&centers, data)?;
    for _ in 0..max_iters {
        let d = data.dim();
        let mut sums = vec![0.0; centers.len() * d];
        let mut counts = vec![0usize; centers.len()];
        for (p, &l) in data.points().zip(&labels) {
            counts[l] += 1;
            sums[l * d..(l + 1) * d].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        let mut next = CenterSet::empty(d);
        for (j, &count) in counts.iter().enumerate() {
            if count == 0 {
                next.push(centers.center(j))?;
            } else {
                let mean: Vec<f64> = sums[j * d..(j + 1) * d].iter().map(|s| s / count as f64).collect();
                next.push(&mean)?;
            }
        }
        centers = next;
        let relabeled = assign(&centers, data)?;
        if relabeled == labels {
            break;
        }
        labels = relabeled;
    }
    let c = cost(&centers, data)?;
    Ok((centers, c))
}
