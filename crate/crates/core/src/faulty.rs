//! Query-k-means against an oracle whose answers are wrong with probability
//! q < ½.
//!
//! Buckets can no longer be formed by comparing against one member, so a
//! sample is partitioned by querying every pair, treating the answers as a
//! noisy graph and peeling off dense clusters. A cleanup pass then moves
//! misplaced vertices and merges fragments of one cluster. Coverage is
//! decided by majority vote against the stored representatives.

use rand::Rng;

use crate::dataset::{CenterSet, Dataset};
use crate::error::Result;
use crate::geom::centroid_of;
use crate::oracle::{validate_error_rate, SameClusterOracle};
use crate::ptas::{
    acceptance, boost, check_inputs, pick_uncovered, BoostedOutcome, PtasConfig, PtasRun, RoundTrace, SampleSizes,
    Uncovered, UniformDraw,
};
use crate::sampling::D2Sampler;
use crate::seeding::pad_centers;

/// Refinement passes per candidate cluster.
const MAX_REFINE_ITERS: usize = 50;
const MIN_CLUSTER_FLOOR: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct FaultyConfig {
    pub ptas: PtasConfig,
    pub q: f64,
    /// Recovered clusters lighter than this (counting multiplicity) are dropped.
    pub min_cluster_size: usize,
}

impl FaultyConfig {
    /// Defaults: N = 2¹³k³/ε², M and L as in [`PtasConfig`], and a recovery
    /// threshold of 2⁶k/ε, all at scale 1.
    pub fn new(k: usize, eps: f64, q: f64) -> Result<Self> {
        validate_error_rate(q)?;
        let ptas = PtasConfig::with_n_exponent(k, eps, 13)?;
        let mut cfg = Self { ptas, q, min_cluster_size: 0 };
        cfg.refresh_threshold();
        Ok(cfg)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        self.ptas = self.ptas.with_scale(scale)?;
        self.refresh_threshold();
        Ok(self)
    }

    pub fn with_repeats(mut self, repeats: usize) -> Result<Self> {
        self.ptas = self.ptas.with_repeats(repeats)?;
        Ok(self)
    }

    pub fn with_general_mode(mut self, on: bool) -> Self {
        self.ptas = self.ptas.with_general_mode(on);
        self.refresh_threshold();
        self
    }

    pub fn with_sizes(mut self, sizes: SampleSizes) -> Result<Self> {
        self.ptas = self.ptas.with_sizes(sizes)?;
        Ok(self)
    }

    pub fn with_min_cluster_size(mut self, size: usize) -> Self {
        self.min_cluster_size = size.max(1);
        self
    }

    fn refresh_threshold(&mut self) {
        let raw = 64.0 * self.ptas.k as f64 / self.ptas.working_eps() * self.ptas.scale;
        self.min_cluster_size = (raw.ceil() as usize).max(MIN_CLUSTER_FLOOR);
    }

    /// k·(N² + k·N + L² + L).
    pub fn query_budget(&self) -> u64 {
        let k = self.ptas.k as u64;
        let SampleSizes { n_samples, n_uniform, .. } = self.ptas.sizes();
        let (n, l) = (n_samples as u64, n_uniform as u64);
        k * (n * n + k * n + l * l + l)
    }
}

/// Fixed-width bit set over vertex positions.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    fn full(len: usize) -> Self {
        let mut b = Self::new(len);
        (0..len).for_each(|i| b.set(i));
        b
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// Ones of `self & other`.
    fn and_ones<'a>(&'a self, other: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.words.iter().zip(&other.words).enumerate().flat_map(|(wi, (&a, &b))| {
            let mut w = a & b;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// Answers of the oracle on every pair of distinct points in a sample.
///
/// Vertices are the distinct indices of the sample; `weight` is each one's
/// multiplicity. Copies of one index are identical under the memoized oracle,
/// so this is the pairwise graph on the multiset with its cliques of copies
/// collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoisyGraph {
    vertices: Vec<usize>,
    weights: Vec<usize>,
    adjacency: Vec<Bits>,
}

impl NoisyGraph {
    /// Queries each unordered pair of distinct indices once. Returns the graph
    /// and the number of queries.
    pub fn build<O: SameClusterOracle + ?Sized>(sample: &[usize], oracle: &mut O) -> Result<(Self, u64)> {
        let mut sorted = sample.to_vec();
        sorted.sort_unstable();
        let mut vertices: Vec<usize> = Vec::new();
        let mut weights: Vec<usize> = Vec::new();
        for &i in &sorted {
            if vertices.last() == Some(&i) {
                *weights.last_mut().unwrap() += 1;
            } else {
                vertices.push(i);
                weights.push(1);
            }
        }
        let v = vertices.len();
        let mut adjacency = vec![Bits::new(v); v];
        let mut queries = 0;
        for a in 0..v {
            for b in a + 1..v {
                queries += 1;
                if oracle.same_cluster(vertices[a], vertices[b])? {
                    adjacency[a].set(b);
                    adjacency[b].set(a);
                }
            }
        }
        Ok((Self { vertices, weights, adjacency }, queries))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn multiplicity(&self, vertex: usize) -> usize {
        self.weights[vertex]
    }

    /// Whether vertex positions `a` and `b` are joined.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].get(b)
    }

    /// Weight of `v` plus its neighbours inside `set`.
    fn support(&self, v: usize, set: &Bits) -> usize {
        let own = if set.get(v) { self.weights[v] } else { 0 };
        own + self.adjacency[v].and_ones(set).map(|u| self.weights[u]).sum::<usize>()
    }

    fn weight_of(&self, set: &Bits) -> usize {
        set.ones().map(|u| self.weights[u]).sum()
    }

    /// Dense-cluster peeling: take the heaviest remaining vertex, start from
    /// its closed neighbourhood, and repeatedly keep exactly the remaining
    /// vertices adjacent to more than half of the candidate's weight until
    /// the set stops changing. The candidate leaves the pool; once the pool
    /// is empty a majority cleanup pass runs and groups lighter than
    /// `min_cluster_size` are dropped.
    pub fn recover(&self, min_cluster_size: usize) -> Vec<Vec<usize>> {
        let v = self.vertices.len();
        let mut remaining = Bits::full(v);
        let mut groups = Vec::new();
        while !remaining.is_empty() {
            let seed = remaining
                .ones()
                .map(|u| (self.support(u, &remaining), u))
                .fold(None::<(usize, usize)>, |best, cur| match best {
                    Some(b) if b.0 >= cur.0 => Some(b),
                    _ => Some(cur),
                })
                .map(|(_, u)| u)
                .expect("remaining is non-empty");

            let mut cand = Bits::new(v);
            cand.set(seed);
            for u in self.adjacency[seed].and_ones(&remaining) {
                cand.set(u);
            }
            for _ in 0..MAX_REFINE_ITERS {
                let half = self.weight_of(&cand);
                let mut next = Bits::new(v);
                for u in remaining.ones() {
                    if 2 * self.support(u, &cand) > half {
                        next.set(u);
                    }
                }
                if next == cand {
                    break;
                }
                cand = next;
                if cand.is_empty() {
                    break;
                }
            }

            remaining.clear(seed);
            for u in cand.ones() {
                remaining.clear(u);
            }
            if cand.is_empty() {
                cand.set(seed);
            }
            groups.push(cand);
        }
        for _ in 0..MAX_REFINE_ITERS {
            self.cleanup(&mut groups);
            groups.retain(|g| !g.is_empty());
            if !self.merge_once(&mut groups) {
                break;
            }
        }
        self.rescue(&mut groups, min_cluster_size);

        let mut clusters = Vec::new();
        for g in groups {
            if !g.is_empty() && self.weight_of(&g) >= min_cluster_size {
                let mut members = Vec::new();
                for u in g.ones() {
                    members.extend(std::iter::repeat_n(self.vertices[u], self.weights[u]));
                }
                clusters.push(members);
            }
        }
        clusters
    }

    /// Vertices stranded in groups lighter than `min_cluster_size` join the
    /// heavy group they answer "same" to most often, when that share beats
    /// the group's typical outsider share by two binomial standard errors.
    /// A stray member of a noisy heavy cluster can fall just short of a
    /// strict majority; a vertex of a genuinely light cluster sits near the
    /// outsider share and stays put.
    fn rescue(&self, groups: &mut [Bits], min_cluster_size: usize) {
        let weights: Vec<usize> = groups.iter().map(|g| self.weight_of(g)).collect();
        let heavy: Vec<usize> = (0..groups.len()).filter(|&g| weights[g] >= min_cluster_size).collect();
        if heavy.len() < 2 {
            return;
        }
        let yes_into =
            |u: usize, g: usize| -> usize { self.adjacency[u].and_ones(&groups[g]).map(|x| self.weights[x]).sum() };
        // Outsider share of each heavy group, measured from the other heavy groups.
        let thresholds: Vec<f64> = heavy
            .iter()
            .map(|&g| {
                let (mut yes, mut outside) = (0usize, 0usize);
                for &h in heavy.iter().filter(|&&h| h != g) {
                    for u in groups[h].ones() {
                        yes += self.weights[u] * yes_into(u, g);
                        outside += self.weights[u];
                    }
                }
                let c = yes as f64 / (outside * weights[g]) as f64;
                c + 2.0 * (c * (1.0 - c) / weights[g] as f64).sqrt()
            })
            .collect();
        let mut moves = Vec::new();
        for light in (0..groups.len()).filter(|&g| weights[g] < min_cluster_size) {
            for u in groups[light].ones() {
                let best = heavy
                    .iter()
                    .zip(&thresholds)
                    .map(|(&g, &t)| (yes_into(u, g) as f64 / weights[g] as f64, t, g))
                    .filter(|&(share, t, _)| share > t)
                    .fold(None::<(f64, usize)>, |acc, (share, _, g)| match acc {
                        Some(a) if a.0 >= share => Some(a),
                        _ => Some((share, g)),
                    });
                if let Some((_, g)) = best {
                    moves.push((u, light, g));
                }
            }
        }
        for (u, from, to) in moves {
            groups[from].clear(u);
            groups[to].set(u);
        }
    }

    /// Merges the pair of groups whose cross answers are most often "same",
    /// if that weighted fraction exceeds one half. Fragments of one true
    /// cluster see about 1 − q across; distinct clusters see about q.
    fn merge_once(&self, groups: &mut Vec<Bits>) -> bool {
        let weights: Vec<usize> = groups.iter().map(|g| self.weight_of(g)).collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let yes: usize = groups[a]
                    .ones()
                    .map(|u| {
                        self.weights[u] * self.adjacency[u].and_ones(&groups[b]).map(|x| self.weights[x]).sum::<usize>()
                    })
                    .sum();
                let frac = yes as f64 / (weights[a] * weights[b]) as f64;
                if frac > 0.5 && best.is_none_or(|(f, _, _)| frac > f) {
                    best = Some((frac, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { return false };
        let absorbed = groups.remove(b);
        for u in absorbed.ones() {
            groups[a].set(u);
        }
        true
    }

    /// Majority reassignment: each vertex moves to the group holding the
    /// largest share of "same" answers among its other members, provided
    /// that share exceeds one half and beats its current group. Moves are
    /// computed from a snapshot and applied together until none remain.
    fn cleanup(&self, groups: &mut [Bits]) {
        let v = self.vertices.len();
        for _ in 0..MAX_REFINE_ITERS {
            let weights: Vec<usize> = groups.iter().map(|g| self.weight_of(g)).collect();
            let mut moves = Vec::new();
            for u in 0..v {
                let Some(home) = groups.iter().position(|g| g.get(u)) else { continue };
                let share = |gi: usize| {
                    let g = &groups[gi];
                    let others = weights[gi] - if g.get(u) { self.weights[u] } else { 0 };
                    if others == 0 {
                        return None;
                    }
                    let yes: usize = self.adjacency[u].and_ones(g).map(|x| self.weights[x]).sum();
                    Some(yes as f64 / others as f64)
                };
                let current = share(home).unwrap_or(0.0);
                let best = (0..groups.len()).filter(|&gi| gi != home).filter_map(|gi| share(gi).map(|s| (s, gi))).fold(
                    None::<(f64, usize)>,
                    |acc, cur| match acc {
                        Some(a) if a.0 >= cur.0 => Some(a),
                        _ => Some(cur),
                    },
                );
                if let Some((s, gi)) = best {
                    if s > 0.5 && s > current {
                        moves.push((u, home, gi));
                    }
                }
            }
            if moves.is_empty() {
                break;
            }
            for (u, from, to) in moves {
                groups[from].clear(u);
                groups[to].set(u);
            }
        }
    }
}

/// Partitions a sample multiset into recovered clusters of at least
/// `min_cluster_size` entries. Returns the clusters (each a multiset of point
/// indices, sorted) and the queries spent building the graph.
pub fn partition_sample<O: SameClusterOracle + ?Sized>(
    sample: &[usize],
    min_cluster_size: usize,
    oracle: &mut O,
) -> Result<(Vec<Vec<usize>>, u64)> {
    let (graph, queries) = NoisyGraph::build(sample, oracle)?;
    Ok((graph.recover(min_cluster_size), queries))
}

/// Majority vote: true iff some target is reported "same" with strictly more
/// than half of the entries of `group`. Targets are tried in order and the
/// scan stops at the first covering one.
pub fn is_covered<O: SameClusterOracle + ?Sized>(
    targets: &[usize],
    group: &[usize],
    oracle: &mut O,
) -> Result<(bool, u64)> {
    let mut queries = 0;
    for &t in targets {
        let mut yes = 0usize;
        for &u in group {
            queries += 1;
            if oracle.same_cluster(t, u)? {
                yes += 1;
            }
        }
        if 2 * yes > group.len() {
            return Ok((true, queries));
        }
    }
    Ok((false, queries))
}

/// Batch rejection sampler: L D²-draws are partitioned, parts voted into
/// `s`'s cluster are thinned with the usual acceptance probability.
pub fn faulty_uniform_sample_with<O, R>(
    sampler: &D2Sampler,
    s: usize,
    eps: f64,
    n_uniform: usize,
    min_cluster_size: usize,
    oracle: &mut O,
    rng: &mut R,
) -> Result<UniformDraw>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut draw = UniformDraw { sample: Vec::new(), queries: 0, clamped: 0 };
    if !sampler.is_uniform() && sampler.weight(s) == 0.0 {
        return Ok(draw);
    }
    let batch = sampler.sample_many(n_uniform, rng)?;
    let (parts, queries) = partition_sample(&batch, min_cluster_size, oracle)?;
    draw.queries += queries;
    for part in parts {
        let (covered, queries) = is_covered(&[s], &part, oracle)?;
        draw.queries += queries;
        if !covered {
            continue;
        }
        for &x in &part {
            let (p, clamped) = acceptance(sampler, eps, s, x);
            if clamped {
                draw.clamped += 1;
            }
            if rng.random::<f64>() < p {
                draw.sample.push(x);
            }
        }
    }
    Ok(draw)
}

pub fn faulty_uniform_sample<O, R>(
    data: &Dataset,
    centers: &CenterSet,
    s: usize,
    cfg: &FaultyConfig,
    oracle: &mut O,
    rng: &mut R,
) -> Result<UniformDraw>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    data.check_index(s)?;
    let sampler = D2Sampler::new(centers, data)?;
    faulty_uniform_sample_with(
        &sampler,
        s,
        cfg.ptas.working_eps(),
        cfg.ptas.sizes().n_uniform,
        cfg.min_cluster_size,
        oracle,
        rng,
    )
}

/// Recovers clusters in `sample`, discards those voted into a represented
/// cluster, and picks the cheapest point of the largest remaining one.
pub fn faulty_uncovered_cluster<O, F>(
    sample: &[usize],
    representatives: &[usize],
    k: usize,
    min_cluster_size: usize,
    point_cost: F,
    oracle: &mut O,
) -> Result<(Uncovered, u64)>
where
    O: SameClusterOracle + ?Sized,
    F: Fn(usize) -> f64,
{
    let (parts, mut queries) = partition_sample(sample, min_cluster_size, oracle)?;
    let open = k.saturating_sub(representatives.len());
    let mut uncovered = Vec::new();
    for part in parts {
        if uncovered.len() == open {
            break;
        }
        let (covered, spent) = is_covered(representatives, &part, oracle)?;
        queries += spent;
        if !covered {
            uncovered.push(part);
        }
    }
    Ok((pick_uncovered(&uncovered, point_cost), queries))
}

/// One run of the faulty-oracle algorithm.
pub fn faulty_query_kmeans_core<O, R>(
    data: &Dataset,
    cfg: &FaultyConfig,
    oracle: &mut O,
    rng: &mut R,
) -> Result<PtasRun>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    let k = cfg.ptas.k;
    check_inputs(data, k, oracle)?;
    let sizes = cfg.ptas.sizes();
    let eps = cfg.ptas.working_eps();
    let mut centers = CenterSet::empty(data.dim());
    let mut representatives = Vec::new();
    let mut trace = Vec::with_capacity(k);
    let mut queries_used = 0;
    let mut stopped_early = false;

    for round in 0..k {
        let sampler = D2Sampler::new(&centers, data)?;
        if sampler.is_degenerate() {
            stopped_early = true;
            break;
        }
        let sample = sampler.sample_many(sizes.n_samples, rng)?;
        let (found, mut queries) = faulty_uncovered_cluster(
            &sample,
            &representatives,
            k,
            cfg.min_cluster_size,
            |i| sampler.weight(i),
            oracle,
        )?;
        let mut record = RoundTrace {
            round,
            sample_size: sample.len(),
            representative: None,
            accepted_size: 0,
            accepted: false,
            queries: 0,
            clamped: 0,
        };
        if let Uncovered::Found { point: s, .. } = found {
            let draw =
                faulty_uniform_sample_with(&sampler, s, eps, sizes.n_uniform, cfg.min_cluster_size, oracle, rng)?;
            queries += draw.queries;
            record.representative = Some(s);
            record.accepted_size = draw.sample.len();
            record.clamped = draw.clamped;
            if draw.sample.len() >= sizes.min_accept {
                record.accepted = true;
                representatives.push(s);
                centers.push(&centroid_of(data, &draw.sample)?)?;
            }
        }
        record.queries = queries;
        queries_used += queries;
        trace.push(record);
    }

    let (report_centers, padding) = pad_centers(data, &centers, k, rng)?;
    Ok(PtasRun { centers, representatives, trace, queries_used, stopped_early, report_centers, padding })
}

/// Boosted faulty-oracle runs; each repeat gets its own oracle (and hence its
/// own answer cache).
pub fn faulty_query_kmeans<O, F>(
    data: &Dataset,
    cfg: &FaultyConfig,
    seed: u64,
    make_oracle: F,
) -> Result<BoostedOutcome>
where
    O: SameClusterOracle + Send,
    F: Fn(usize) -> Result<O> + Sync,
{
    boost(data, cfg.ptas.repeats, seed, make_oracle, |oracle, rng| faulty_query_kmeans_core(data, cfg, oracle, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Labeling;
    use crate::oracle::{FaultyOracle, GroundTruth, PerfectOracle};

    fn truth(labels: &[usize]) -> GroundTruth {
        GroundTruth::new(Labeling::new(labels.to_vec()).unwrap())
    }

    #[test]
    fn bits_roundtrip() {
        let mut b = Bits::new(130);
        for i in [0, 63, 64, 129] {
            b.set(i);
        }
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        b.clear(64);
        assert!(!b.get(64));
        let mut c = Bits::new(130);
        c.set(129);
        c.set(5);
        assert_eq!(b.and_ones(&c).collect::<Vec<_>>(), vec![129]);
    }

    #[test]
    fn noiseless_partition_is_exact() {
        let labels = [0, 1, 0, 2, 1, 0, 2, 2, 1];
        let mut o = PerfectOracle::new(truth(&labels));
        let sample = [0, 1, 2, 3, 4, 5, 6, 7, 8, 0, 3];
        let (mut parts, queries) = partition_sample(&sample, 1, &mut o).unwrap();
        assert_eq!(queries, 9 * 8 / 2);
        parts.sort();
        assert_eq!(parts, vec![vec![0, 0, 2, 5], vec![1, 4, 8], vec![3, 3, 6, 7]]);
    }

    #[test]
    fn small_parts_are_filtered() {
        let labels: Vec<usize> = (0..6).collect();
        let mut o = PerfectOracle::new(truth(&labels));
        let (parts, _) = partition_sample(&[0, 1, 2, 3, 4, 5], 2, &mut o).unwrap();
        assert!(parts.is_empty());
    }

    #[test]
    fn graph_rebuild_from_cache_is_identical() {
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let mut o = FaultyOracle::new(truth(&labels), 0.3, 9).unwrap();
        let sample: Vec<usize> = (0..40).collect();
        let (g1, _) = NoisyGraph::build(&sample, &mut o).unwrap();
        let (g2, _) = NoisyGraph::build(&sample, &mut o).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn covered_noiseless() {
        let labels = [0, 0, 0, 1, 1, 1];
        let mut o = PerfectOracle::new(truth(&labels));
        assert_eq!(is_covered(&[3, 0], &[1, 2], &mut o).unwrap(), (true, 4));
        assert_eq!(is_covered(&[0], &[1, 2], &mut o).unwrap(), (true, 2));
        assert_eq!(is_covered(&[0, 1], &[3, 4, 5], &mut o).unwrap(), (false, 6));
        assert_eq!(is_covered(&[], &[3], &mut o).unwrap(), (false, 0));
    }

    #[test]
    fn uncovered_part_absent_gives_empty_draw() {
        // s's cluster never appears in the batch: D² mass sits on cluster B only.
        let x = Dataset::from_rows(&[[0.0], [0.0], [10.0], [11.0], [12.0]]).unwrap();
        let labels = [0, 0, 1, 1, 1];
        let c = CenterSet::from_rows(1, &[[0.0]]).unwrap();
        let cfg = FaultyConfig::new(2, 0.5, 0.0)
            .unwrap()
            .with_sizes(SampleSizes { n_samples: 10, min_accept: 1, n_uniform: 200 })
            .unwrap()
            .with_min_cluster_size(1);
        let mut o = PerfectOracle::new(truth(&labels));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        use rand::SeedableRng;
        // s = 0 has zero cost w.r.t. C, so nothing can be accepted.
        let draw = faulty_uniform_sample(&x, &c, 0, &cfg, &mut o, &mut rng).unwrap();
        assert!(draw.sample.is_empty());
    }

    #[test]
    fn default_threshold_and_budget() {
        let cfg = FaultyConfig::new(3, 0.5, 0.2).unwrap();
        assert_eq!(cfg.min_cluster_size, 384);
        assert_eq!(cfg.ptas.sizes().n_samples, 8192 * 27 * 4);
        let scaled = cfg.clone().with_scale(1e-6).unwrap();
        assert_eq!(scaled.min_cluster_size, MIN_CLUSTER_FLOOR);
        assert!(FaultyConfig::new(3, 0.5, 0.5).is_err());
    }
}
