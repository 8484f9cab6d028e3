//! Query-k-means: a (1+ε)-approximation for k-means using same-cluster
//! queries.
//!
//! Each round D²-samples a multiset `S`, uses the oracle to bucket `S` by
//! cluster, picks the cheapest point `s` of the largest bucket not yet holding
//! a representative, and then thins a second stream of D²-draws from `s`'s
//! cluster by rejection so the survivors are a uniform sample of that cluster.
//! Their mean becomes the next center.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{CenterSet, Dataset};
use crate::error::{Error, Result};
use crate::geom::{centroid_of, cost};
use crate::oracle::SameClusterOracle;
use crate::sampling::D2Sampler;
use crate::seeding::pad_centers;

/// Sample-size knobs of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SampleSizes {
    /// N: D²-draws per round for locating an uncovered cluster.
    pub n_samples: usize,
    /// M: minimum accepted sample for a round to add a center.
    pub min_accept: usize,
    /// L: D²-draws per round fed to the rejection sampler.
    pub n_uniform: usize,
}

/// Smallest `M` a scaled configuration will use.
pub const MIN_ACCEPT_FLOOR: usize = 4;

impl SampleSizes {
    /// N = 2^n_log2·k³/ε², M = 64k/ε, L = 2²³·k²/ε⁴, each multiplied by
    /// `scale` and rounded up. M never drops below [`MIN_ACCEPT_FLOOR`] once
    /// scaled.
    pub fn theoretical(k: usize, eps: f64, scale: f64, n_log2: u32) -> Self {
        let k = k as f64;
        let n = 2f64.powi(n_log2 as i32) * k.powi(3) / (eps * eps);
        let m = 64.0 * k / eps;
        let l = 2f64.powi(23) * k * k / eps.powi(4);
        let up = |v: f64| (v * scale).ceil().max(1.0) as usize;
        let min_accept = if scale < 1.0 { up(m).max(MIN_ACCEPT_FLOOR) } else { up(m) };
        Self { n_samples: up(n), min_accept, n_uniform: up(l) }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PtasConfig {
    pub k: usize,
    /// Target accuracy ε ∈ (0, ½].
    pub eps: f64,
    /// Multiplier on the sample sizes. Anything below 1 voids the formal guarantee.
    pub scale: f64,
    pub repeats: usize,
    /// Run the core with ε/((4 + ε/2)k) so irreducibility need not hold.
    pub general_mode: bool,
    sizes: SampleSizes,
    custom_sizes: bool,
    n_log2: u32,
}

impl PtasConfig {
    pub const DEFAULT_REPEATS: usize = 10;

    pub fn new(k: usize, eps: f64) -> Result<Self> {
        Self::with_n_exponent(k, eps, 12)
    }

    pub(crate) fn with_n_exponent(k: usize, eps: f64, n_log2: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::invalid(format!("eps must lie in (0, 1/2], got {eps}")));
        }
        let mut cfg = Self {
            k,
            eps,
            scale: 1.0,
            repeats: Self::DEFAULT_REPEATS,
            general_mode: false,
            sizes: SampleSizes { n_samples: 1, min_accept: 1, n_uniform: 1 },
            custom_sizes: false,
            n_log2,
        };
        cfg.refresh();
        Ok(cfg)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::invalid(format!("scale must lie in (0, 1], got {scale}")));
        }
        self.scale = scale;
        self.refresh();
        Ok(self)
    }

    pub fn with_repeats(mut self, repeats: usize) -> Result<Self> {
        if repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        self.repeats = repeats;
        Ok(self)
    }

    pub fn with_general_mode(mut self, on: bool) -> Self {
        self.general_mode = on;
        self.refresh();
        self
    }

    /// Pins the sample sizes explicitly; later scale or mode changes keep them.
    pub fn with_sizes(mut self, sizes: SampleSizes) -> Result<Self> {
        if sizes.n_samples == 0 || sizes.min_accept == 0 || sizes.n_uniform == 0 {
            return Err(Error::invalid("sample sizes must be positive"));
        }
        self.sizes = sizes;
        self.custom_sizes = true;
        Ok(self)
    }

    fn refresh(&mut self) {
        if !self.custom_sizes {
            self.sizes = SampleSizes::theoretical(self.k, self.working_eps(), self.scale, self.n_log2);
        }
    }

    /// ε actually used inside a run.
    pub fn working_eps(&self) -> f64 {
        if self.general_mode {
            general_mode_eps(self.eps, self.k)
        } else {
            self.eps
        }
    }

    pub fn sizes(&self) -> SampleSizes {
        self.sizes
    }

    /// k·(k·N + L): the per-run query ceiling.
    pub fn query_budget(&self) -> u64 {
        let k = self.k as u64;
        k * (k * self.sizes.n_samples as u64 + self.sizes.n_uniform as u64)
    }
}

/// ε/((4 + ε/2)·k).
pub fn general_mode_eps(eps: f64, k: usize) -> f64 {
    eps / ((4.0 + eps / 2.0) * k as f64)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub sample_size: usize,
    /// The point `s` chosen to represent the new cluster, if any bucket was uncovered.
    pub representative: Option<usize>,
    pub accepted_size: usize,
    pub accepted: bool,
    pub queries: u64,
    /// How often the acceptance probability had to be clamped to 1.
    pub clamped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uncovered {
    /// Cheapest member of the largest bucket without a representative.
    Found { point: usize, bucket_size: usize },
    /// Every bucket holds a representative.
    AllCovered,
}

/// Buckets `sample` by oracle equivalence, seeding the first buckets with
/// `representatives`, and returns the cheapest member (by `point_cost`) of the
/// largest bucket that no representative seeded.
///
/// Each sampled point is compared with the first member of every bucket in
/// creation order. At most `k` buckets exist; a point that matches none when
/// all `k` are open is dropped. Returns the outcome and queries spent.
pub fn uncovered_cluster<O, F>(
    sample: &[usize],
    representatives: &[usize],
    k: usize,
    point_cost: F,
    oracle: &mut O,
) -> Result<(Uncovered, u64)>
where
    O: SameClusterOracle + ?Sized,
    F: Fn(usize) -> f64,
{
    let mut buckets: Vec<Vec<usize>> = representatives.iter().map(|&r| vec![r]).collect();
    let mut queries = 0;
    for &s in sample {
        let mut home = None;
        for (j, bucket) in buckets.iter().enumerate() {
            queries += 1;
            if oracle.same_cluster(s, bucket[0])? {
                home = Some(j);
                break;
            }
        }
        match home {
            Some(j) => buckets[j].push(s),
            None if buckets.len() < k.max(representatives.len()) => buckets.push(vec![s]),
            None => {}
        }
    }
    Ok((pick_uncovered(&buckets[representatives.len().min(buckets.len())..], point_cost), queries))
}

/// Largest bucket (earliest on ties), then its cheapest member (lowest index on ties).
pub(crate) fn pick_uncovered<F: Fn(usize) -> f64>(buckets: &[Vec<usize>], point_cost: F) -> Uncovered {
    let mut largest: Option<&Vec<usize>> = None;
    for b in buckets {
        if !b.is_empty() && largest.is_none_or(|l| b.len() > l.len()) {
            largest = Some(b);
        }
    }
    let Some(bucket) = largest else {
        return Uncovered::AllCovered;
    };
    let mut best = bucket[0];
    let mut best_cost = point_cost(best);
    for &s in &bucket[1..] {
        let c = point_cost(s);
        if c < best_cost || (c == best_cost && s < best) {
            best = s;
            best_cost = c;
        }
    }
    Uncovered::Found { point: best, bucket_size: bucket.len() }
}

/// Accepted multiset of one rejection-sampling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformDraw {
    pub sample: Vec<usize>,
    pub queries: u64,
    pub clamped: usize,
}

/// Probability with which a draw `x` from `s`'s cluster is kept:
/// (ε/128)·Φ(C,{s})/Φ(C,{x}), with the ratio taken as 1 when C is empty.
/// Returns the probability and whether it had to be clamped to 1.
#[inline]
pub(crate) fn acceptance(sampler: &D2Sampler, eps: f64, s: usize, x: usize) -> (f64, bool) {
    let ratio = if sampler.is_uniform() { 1.0 } else { sampler.weight(s) / sampler.weight(x) };
    let p = eps / 128.0 * ratio;
    if p > 1.0 {
        (1.0, true)
    } else {
        (p, false)
    }
}

/// Rejection sampler driven by an existing D² distribution.
pub fn uniform_sample_with<O, R>(
    sampler: &D2Sampler,
    s: usize,
    eps: f64,
    n_uniform: usize,
    oracle: &mut O,
    rng: &mut R,
) -> Result<UniformDraw>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut draw = UniformDraw { sample: Vec::new(), queries: 0, clamped: 0 };
    if !sampler.is_uniform() && sampler.weight(s) == 0.0 {
        // Zero acceptance probability everywhere.
        return Ok(draw);
    }
    for _ in 0..n_uniform {
        let x = sampler.sample(rng)?;
        draw.queries += 1;
        if !oracle.same_cluster(s, x)? {
            continue;
        }
        let (p, clamped) = acceptance(sampler, eps, s, x);
        if clamped {
            draw.clamped += 1;
        }
        if rng.random::<f64>() < p {
            draw.sample.push(x);
        }
    }
    Ok(draw)
}

/// L D²-draws w.r.t. `centers`, each kept when it shares `s`'s cluster and
/// survives the acceptance coin.
pub fn uniform_sample<O, R>(
    data: &Dataset,
    centers: &CenterSet,
    s: usize,
    cfg: &PtasConfig,
    oracle: &mut O,
    rng: &mut R,
) -> Result<UniformDraw>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    data.check_index(s)?;
    let sampler = D2Sampler::new(centers, data)?;
    uniform_sample_with(&sampler, s, cfg.working_eps(), cfg.sizes().n_uniform, oracle, rng)
}

/// Output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PtasRun {
    pub centers: CenterSet,
    pub representatives: Vec<usize>,
    pub trace: Vec<RoundTrace>,
    pub queries_used: u64,
    pub stopped_early: bool,
    /// `centers` padded to k with D²-drawn data points.
    pub report_centers: CenterSet,
    pub padding: usize,
}

impl PtasRun {
    pub fn failed_rounds(&self) -> usize {
        self.trace.iter().filter(|t| !t.accepted).count()
    }

    pub fn clamp_events(&self) -> usize {
        self.trace.iter().map(|t| t.clamped).sum()
    }
}

pub(crate) fn check_inputs<O: SameClusterOracle + ?Sized>(data: &Dataset, k: usize, oracle: &O) -> Result<()> {
    if k > data.len() {
        return Err(Error::invalid(format!("k = {k} exceeds the {} points", data.len())));
    }
    if oracle.len() != data.len() {
        return Err(Error::invalid(format!("oracle covers {} points but dataset has {}", oracle.len(), data.len())));
    }
    Ok(())
}

/// One run of k rounds.
pub fn query_kmeans_core<O, R>(data: &Dataset, cfg: &PtasConfig, oracle: &mut O, rng: &mut R) -> Result<PtasRun>
where
    O: SameClusterOracle + ?Sized,
    R: Rng + ?Sized,
{
    check_inputs(data, cfg.k, oracle)?;
    let sizes = cfg.sizes();
    let eps = cfg.working_eps();
    let mut centers = CenterSet::empty(data.dim());
    let mut representatives = Vec::new();
    let mut trace = Vec::with_capacity(cfg.k);
    let mut queries_used = 0;
    let mut stopped_early = false;

    for round in 0..cfg.k {
        let sampler = D2Sampler::new(&centers, data)?;
        if sampler.is_degenerate() {
            stopped_early = true;
            break;
        }
        let sample = sampler.sample_many(sizes.n_samples, rng)?;
        let (found, mut queries) = uncovered_cluster(&sample, &representatives, cfg.k, |i| sampler.weight(i), oracle)?;
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
            let draw = uniform_sample_with(&sampler, s, eps, sizes.n_uniform, oracle, rng)?;
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

    let (report_centers, padding) = pad_centers(data, &centers, cfg.k, rng)?;
    Ok(PtasRun { centers, representatives, trace, queries_used, stopped_early, report_centers, padding })
}

/// One repeat of a boosted run together with its reported cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRun {
    pub repeat: usize,
    /// Φ(report_centers, X).
    pub cost: f64,
    pub run: PtasRun,
    pub oracle_stats: crate::oracle::OracleStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedOutcome {
    pub runs: Vec<ScoredRun>,
    /// Index into `runs` of the cheapest run (earliest on ties).
    pub best: usize,
}

impl BoostedOutcome {
    pub fn best_run(&self) -> &ScoredRun {
        &self.runs[self.best]
    }

    pub fn best_centers(&self) -> &CenterSet {
        &self.runs[self.best].run.report_centers
    }
}

/// Random stream for repeat `repeat` of a run seeded with `seed`.
pub fn repeat_rng(seed: u64, repeat: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat as u64);
    rng
}

/// Runs `repeats` independent copies of `run_once` in parallel and keeps the
/// cheapest.
pub(crate) fn boost<O, F, G>(
    data: &Dataset,
    repeats: usize,
    seed: u64,
    make_oracle: F,
    run_once: G,
) -> Result<BoostedOutcome>
where
    O: SameClusterOracle + Send,
    F: Fn(usize) -> Result<O> + Sync,
    G: Fn(&mut O, &mut ChaCha8Rng) -> Result<PtasRun> + Sync,
{
    let runs = (0..repeats)
        .into_par_iter()
        .map(|repeat| {
            let mut oracle = make_oracle(repeat)?;
            let mut rng = repeat_rng(seed, repeat);
            let run = run_once(&mut oracle, &mut rng)?;
            let cost = if run.report_centers.is_empty() { f64::INFINITY } else { cost(&run.report_centers, data)? };
            Ok(ScoredRun { repeat, cost, run, oracle_stats: oracle.stats() })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, r)| match acc {
            Some((_, c)) if c <= r.cost => acc,
            _ => Some((i, r.cost)),
        })
        .map_or(0, |(i, _)| i);
    Ok(BoostedOutcome { runs, best })
}

/// Boosted Query-k-means: `cfg.repeats` independent runs, each with its own
/// oracle from `make_oracle(repeat)` and random stream from `seed`; the
/// cheapest wins.
pub fn query_kmeans<O, F>(data: &Dataset, cfg: &PtasConfig, seed: u64, make_oracle: F) -> Result<BoostedOutcome>
where
    O: SameClusterOracle + Send,
    F: Fn(usize) -> Result<O> + Sync,
{
    boost(data, cfg.repeats, seed, make_oracle, |oracle, rng| query_kmeans_core(data, cfg, oracle, rng))
}
