//! Exhaustive k-means for tiny instances.
//!
//! Partitions are enumerated as restricted-growth strings in lexicographic
//! order with per-block running sums, so extending a block updates its Δ₁ in
//! O(d). Δ₁ of a block never decreases when a point joins it, so the partial
//! cost is a valid lower bound and branches at or above the incumbent are cut.

use crate::dataset::{CenterSet, Dataset, Labeling};
use crate::error::{Error, Result};
use crate::geom::centroid_of;

/// Largest instance the solver accepts.
pub const MAX_EXACT_POINTS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    /// Δ_k(X).
    pub optimal_cost: f64,
    pub labeling: Labeling,
    /// Centroids of the non-empty optimal blocks, in label order.
    pub centers: CenterSet,
}

struct Block {
    count: usize,
    sum: Vec<f64>,
    sum_sq: f64,
}

impl Block {
    fn new(d: usize) -> Self {
        Self { count: 0, sum: vec![0.0; d], sum_sq: 0.0 }
    }

    fn cost(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let norm: f64 = self.sum.iter().map(|s| s * s).sum();
        (self.sum_sq - norm / self.count as f64).max(0.0)
    }

    fn add(&mut self, p: &[f64], p_sq: f64) {
        self.count += 1;
        self.sum_sq += p_sq;
        self.sum.iter_mut().zip(p).for_each(|(s, v)| *s += v);
    }

    fn remove(&mut self, p: &[f64], p_sq: f64) {
        self.count -= 1;
        self.sum_sq -= p_sq;
        self.sum.iter_mut().zip(p).for_each(|(s, v)| *s -= v);
    }
}

struct Search<'a> {
    data: &'a Dataset,
    sq_norms: Vec<f64>,
    k: usize,
    blocks: Vec<Block>,
    block_costs: Vec<f64>,
    labels: Vec<usize>,
    best_cost: f64,
    best_labels: Vec<usize>,
}

impl Search<'_> {
    fn threshold(&self) -> f64 {
        if self.best_cost.is_finite() {
            self.best_cost - 1e-12 * self.best_cost.abs().max(f64::MIN_POSITIVE)
        } else {
            f64::INFINITY
        }
    }

    fn run(&mut self, i: usize, used: usize, partial: f64) {
        if partial >= self.threshold() {
            return;
        }
        if i == self.data.len() {
            self.best_cost = partial;
            self.best_labels.clone_from(&self.labels);
            return;
        }
        let p = self.data.point(i);
        let p_sq = self.sq_norms[i];
        let open = if used < self.k { used + 1 } else { used };
        for b in 0..open {
            let before = self.block_costs[b];
            self.blocks[b].add(p, p_sq);
            let after = self.blocks[b].cost();
            self.block_costs[b] = after;
            self.labels[i] = b;
            self.run(i + 1, used.max(b + 1), partial - before + after);
            self.blocks[b].remove(p, p_sq);
            self.block_costs[b] = before;
        }
    }
}

/// Optimal k-means partition into at most `k` non-empty blocks.
///
/// Among equal-cost optima the lexicographically smallest canonical labeling
/// wins.
pub fn solve_exact(data: &Dataset, k: usize) -> Result<ExactSolution> {
    let n = data.len();
    if n > MAX_EXACT_POINTS {
        return Err(Error::InstanceTooLarge { n, max: MAX_EXACT_POINTS });
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n}")));
    }
    let d = data.dim();
    // Centering keeps the running-sum cost formula well conditioned.
    let mean = crate::geom::centroid(data.points())?;
    let shifted: Vec<f64> = data.points().flat_map(|p| p.iter().zip(&mean).map(|(v, m)| v - m)).collect();
    let shifted = Dataset::from_flat(shifted, d)?;
    let mut search = Search {
        data: &shifted,
        sq_norms: shifted.points().map(|p| p.iter().map(|v| v * v).sum()).collect(),
        k,
        blocks: (0..k).map(|_| Block::new(d)).collect(),
        block_costs: vec![0.0; k],
        labels: vec![0; n],
        best_cost: f64::INFINITY,
        best_labels: Vec::new(),
    };
    search.run(0, 0, 0.0);

    let used = search.best_labels.iter().max().map_or(0, |m| m + 1);
    let labeling = Labeling::with_k(search.best_labels, used)?;
    let mut centers = CenterSet::empty(d);
    let mut optimal_cost = 0.0;
    for members in labeling.clusters() {
        let mu = centroid_of(data, &members)?;
        optimal_cost += members.iter().map(|&i| crate::geom::sq_dist(data.point(i), &mu)).sum::<f64>();
        centers.push(&mu)?;
    }
    Ok(ExactSolution { optimal_cost, labeling, centers })
}

/// Δ_k(X) alone.
pub fn optimal_cost(data: &Dataset, k: usize) -> Result<f64> {
    solve_exact(data, k).map(|s| s.optimal_cost)
}

/// Δ₁, …, Δ_{k_max}.
pub fn delta_sequence(data: &Dataset, k_max: usize) -> Result<Vec<f64>> {
    (1..=k_max).map(|k| optimal_cost(data, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cost, delta1_of};

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows(rows).unwrap()
    }

    /// Plain recursion over every label vector in `0..k`, no pruning, no
    /// incremental sums. Independent of the search above.
    fn brute_force(data: &Dataset, k: usize) -> f64 {
        fn rec(data: &Dataset, k: usize, labels: &mut Vec<usize>, best: &mut f64) {
            if labels.len() == data.len() {
                let mut total = 0.0;
                for b in 0..k {
                    let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == b).collect();
                    if !members.is_empty() {
                        total += delta1_of(data, &members).unwrap();
                    }
                }
                *best = best.min(total);
                return;
            }
            for b in 0..k {
                labels.push(b);
                rec(data, k, labels, best);
                labels.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(data, k, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn unit_square_two_means() {
        let x = ds(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let sol = solve_exact(&x, 2).unwrap();
        assert!((sol.optimal_cost - 1.0).abs() < 1e-12);
        assert!((brute_force(&x, 2) - 1.0).abs() < 1e-12);
        // Lexicographically smallest optimum pairs corners along the x axis.
        assert_eq!(sol.labeling.labels(), &[0, 0, 1, 1]);
        assert!((cost(&sol.centers, &x).unwrap() - sol.optimal_cost).abs() < 1e-12);
    }

    #[test]
    fn collinear_four_points() {
        let x = ds(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let sol = solve_exact(&x, 2).unwrap();
        assert!((sol.optimal_cost - 1.0).abs() < 1e-12);
        assert_eq!(sol.labeling.labels(), &[0, 0, 1, 1]);
        let seq = delta_sequence(&x, 4).unwrap();
        assert!((seq[0] - 5.0).abs() < 1e-12);
        assert!((seq[1] - 1.0).abs() < 1e-12);
        assert!((seq[2] - 0.5).abs() < 1e-12);
        assert_eq!(seq[3], 0.0);
    }

    #[test]
    fn k_equals_n_is_zero() {
        let x = ds(&[&[0.3, 1.0], &[5.0, -2.0], &[7.0, 7.0], &[1.0, 1.5], &[2.0, 2.0]]);
        assert_eq!(optimal_cost(&x, 5).unwrap(), 0.0);
    }

    #[test]
    fn identical_points_all_zero() {
        let x = ds(&[&[2.0, 2.0][..]; 5]);
        assert_eq!(delta_sequence(&x, 5).unwrap(), vec![0.0; 5]);
        let sol = solve_exact(&x, 3).unwrap();
        assert_eq!(sol.labeling.k(), 1);
    }

    #[test]
    fn too_large() {
        let rows: Vec<[f64; 1]> = (0..15).map(|i| [i as f64]).collect();
        let x = Dataset::from_rows(&rows).unwrap();
        assert!(matches!(solve_exact(&x, 2), Err(Error::InstanceTooLarge { n: 15, .. })));
    }

    #[test]
    fn matches_brute_force_on_small_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let n = rng.random_range(2..=7);
            let rows: Vec<[f64; 2]> =
                (0..n).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
            let x = Dataset::from_rows(&rows).unwrap();
            for k in 1..=n.min(3) {
                let got = optimal_cost(&x, k).unwrap();
                let want = brute_force(&x, k);
                assert!((got - want).abs() <= 1e-9 * (1.0 + want), "n={n} k={k}: {got} vs {want}");
            }
        }
    }
}
