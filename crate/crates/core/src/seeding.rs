//! k-means++ seeding and its same-cluster-query variant.
//!
//! The query variant retries each D²-draw up to ⌈log₂ k⌉ times per round and
//! keeps a draw only when the oracle says it lies in a cluster none of the
//! chosen points belongs to.

use rand::Rng;

use crate::dataset::{CenterSet, Dataset};
use crate::error::{Error, Result};
use crate::oracle::SameClusterOracle;
use crate::sampling::D2Sampler;

#[derive(Debug, Clone, PartialEq)]
pub struct SeedingResult {
    /// The chosen data points, in selection order.
    pub centers: CenterSet,
    pub chosen_indices: Vec<usize>,
    pub queries_used: u64,
    /// Rounds in which every retry landed in an already covered cluster.
    pub rounds_exhausted: usize,
    /// Set when the D² distribution became degenerate before `k` centers.
    pub stopped_early: bool,
    /// `centers` topped up to `k` with plain D²-draws, for cost reporting.
    pub report_centers: CenterSet,
    /// How many of `report_centers` are padding.
    pub padding: usize,
}

/// ⌈log₂ k⌉, with ⌈log₂ 1⌉ = 0.
pub fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Hard cap on the queries issued by [`query_kmeans_pp`]: (k−1)²·⌈log₂ k⌉.
pub fn query_budget(k: usize) -> u64 {
    let r = k.saturating_sub(1) as u64;
    r * r * ceil_log2(k) as u64
}

fn check_k(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > data.len() {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={}", data.len())));
    }
    Ok(())
}

/// Tops `centers` up to `k` entries with D²-draws, stopping if the
/// distribution degenerates. Returns the padded set and the number added.
pub fn pad_centers<R: Rng + ?Sized>(
    data: &Dataset,
    centers: &CenterSet,
    k: usize,
    rng: &mut R,
) -> Result<(CenterSet, usize)> {
    let mut padded = centers.clone();
    let mut added = 0;
    while padded.len() < k {
        let sampler = D2Sampler::new(&padded, data)?;
        if sampler.is_degenerate() {
            break;
        }
        let x = sampler.sample(rng)?;
        padded.push(data.point(x))?;
        added += 1;
    }
    Ok((padded, added))
}

/// Classic k-means++: one uniform point, then k−1 D²-draws. No queries.
pub fn kmeans_pp<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Result<SeedingResult> {
    check_k(data, k)?;
    let mut chosen = vec![rng.random_range(0..data.len())];
    let mut centers = CenterSet::from_indices(data, &chosen)?;
    let mut stopped_early = false;
    while chosen.len() < k {
        let sampler = D2Sampler::new(&centers, data)?;
        if sampler.is_degenerate() {
            stopped_early = true;
            break;
        }
        let x = sampler.sample(rng)?;
        chosen.push(x);
        centers.push(data.point(x))?;
    }
    let (report_centers, padding) = pad_centers(data, &centers, k, rng)?;
    Ok(SeedingResult {
        centers,
        chosen_indices: chosen,
        queries_used: 0,
        rounds_exhausted: 0,
        stopped_early,
        report_centers,
        padding,
    })
}

/// True iff `x` is in none of the clusters of `chosen`. Scans `chosen` in
/// order and stops at the first "same" answer. Returns the verdict and the
/// number of queries spent.
pub fn new_cluster<O: SameClusterOracle + ?Sized>(chosen: &[usize], x: usize, oracle: &mut O) -> Result<(bool, u64)> {
    let mut queries = 0;
    for &c in chosen {
        queries += 1;
        if oracle.same_cluster(c, x)? {
            return Ok((false, queries));
        }
    }
    Ok((true, queries))
}

/// k-means++ seeding with same-cluster queries.
pub fn query_kmeans_pp<O, R>(data: &Dataset, k: usize, oracle: &mut O, rng: &mut R) -> Result<SeedingResult>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    check_k(data, k)?;
    if oracle.len() != data.len() {
        return Err(Error::invalid(format!("oracle covers {} points but dataset has {}", oracle.len(), data.len())));
    }
    let attempts = ceil_log2(k);
    let mut chosen = vec![rng.random_range(0..data.len())];
    let mut centers = CenterSet::from_indices(data, &chosen)?;
    let mut queries_used = 0;
    let mut rounds_exhausted = 0;
    let mut stopped_early = false;

    'rounds: for _round in 2..=k {
        let sampler = D2Sampler::new(&centers, data)?;
        if sampler.is_degenerate() {
            stopped_early = true;
            break;
        }
        for _ in 0..attempts {
            let x = sampler.sample(rng)?;
            let (fresh, spent) = new_cluster(&chosen, x, oracle)?;
            queries_used += spent;
            if fresh {
                chosen.push(x);
                centers.push(data.point(x))?;
                continue 'rounds;
            }
        }
        rounds_exhausted += 1;
    }

    let (report_centers, padding) = pad_centers(data, &centers, k, rng)?;
    Ok(SeedingResult {
        centers,
        chosen_indices: chosen,
        queries_used,
        rounds_exhausted,
        stopped_early,
        report_centers,
        padding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Labeling;
    use crate::geom::cost;
    use crate::oracle::{GroundTruth, PerfectOracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(labels: &[usize]) -> PerfectOracle {
        PerfectOracle::new(GroundTruth::new(Labeling::new(labels.to_vec()).unwrap()))
    }

    #[test]
    fn log2_ceiling() {
        let got: Vec<usize> = (1..=9).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
        assert_eq!(query_budget(2), 1);
        assert_eq!(query_budget(3), 8);
        assert_eq!(query_budget(4), 18);
    }

    #[test]
    fn new_cluster_examples() {
        let mut o = oracle(&[0, 0, 1, 2, 3]);
        assert_eq!(new_cluster(&[], 1, &mut o).unwrap(), (true, 0));
        assert_eq!(new_cluster(&[0, 2, 3], 1, &mut o).unwrap(), (false, 1));
        assert_eq!(new_cluster(&[0, 2, 3], 4, &mut o).unwrap(), (true, 3));
        assert_eq!(o.stats().query_count, 4);
    }

    #[test]
    fn kmeans_pp_picks_every_distinct_point() {
        let x = Dataset::from_rows(&[[0.0, 0.0], [5.0, 1.0], [-3.0, 2.0], [9.0, 9.0]]).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = kmeans_pp(&x, 4, &mut rng).unwrap();
            let mut idx = r.chosen_indices.clone();
            idx.sort_unstable();
            assert_eq!(idx, vec![0, 1, 2, 3]);
            assert_eq!(cost(&r.centers, &x).unwrap(), 0.0);
            assert_eq!(r.queries_used, 0);
        }
    }

    #[test]
    fn kmeans_pp_stops_on_duplicates() {
        let x = Dataset::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = kmeans_pp(&x, 3, &mut rng).unwrap();
        assert!(r.stopped_early);
        assert_eq!(r.centers.len(), 1);
        assert_eq!(r.padding, 0);
    }

    #[test]
    fn two_singletons_forced() {
        let x = Dataset::from_rows(&[[0.0, 0.0], [10.0, 0.0]]).unwrap();
        for seed in 0..10 {
            let mut o = oracle(&[0, 1]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = query_kmeans_pp(&x, 2, &mut o, &mut rng).unwrap();
            assert_eq!(r.centers.len(), 2);
            assert_eq!(cost(&r.centers, &x).unwrap(), 0.0);
            assert!(r.queries_used <= 1);
            assert_eq!(r.queries_used, o.stats().query_count);
        }
    }

    #[test]
    fn chosen_points_cover_distinct_clusters() {
        let rows: Vec<[f64; 2]> =
            (0..4).flat_map(|c| (0..5).map(move |i| [c as f64 * 20.0 + i as f64 * 0.1, (c % 2) as f64])).collect();
        let labels: Vec<usize> = (0..20).map(|i| i / 5).collect();
        let x = Dataset::from_rows(&rows).unwrap();
        for seed in 0..50 {
            let mut o = oracle(&labels);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = query_kmeans_pp(&x, 4, &mut o, &mut rng).unwrap();
            let mut seen: Vec<usize> = r.chosen_indices.iter().map(|&i| labels[i]).collect();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), r.chosen_indices.len());
            assert!(r.queries_used <= query_budget(4));
            assert_eq!(r.queries_used, o.stats().query_count);
            assert_eq!(r.report_centers.len(), 4);
            assert_eq!(r.padding, 4 - r.centers.len());
        }
    }
}
