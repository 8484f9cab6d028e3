//! Simulated same-cluster oracles.
//!
//! Both oracles answer from a hidden [`GroundTruth`] and count every call.
//! The faulty oracle flips the true answer with probability `q` the first time
//! an unordered pair is asked and then repeats that answer forever.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Labeling;
use crate::error::{Error, Result};

/// The hidden partition an oracle answers from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labeling: Labeling,
}

impl GroundTruth {
    pub fn new(labeling: Labeling) -> Self {
        Self { labeling }
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn len(&self) -> usize {
        self.labeling.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labeling.is_empty()
    }

    pub fn k(&self) -> usize {
        self.labeling.k()
    }

    pub fn same(&self, i: usize, j: usize) -> Result<bool> {
        let n = self.len();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        Ok(self.labeling.label(i) == self.labeling.label(j))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleStats {
    pub query_count: u64,
    pub distinct_pair_count: u64,
}

#[inline]
fn pair_key(i: usize, j: usize) -> u64 {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    ((a as u64) << 32) | b as u64
}

#[derive(Debug, Clone, Default)]
struct Counter {
    queries: u64,
    seen: HashSet<u64>,
}

impl Counter {
    fn record(&mut self, i: usize, j: usize) {
        self.queries += 1;
        self.seen.insert(pair_key(i, j));
    }

    fn stats(&self) -> OracleStats {
        OracleStats { query_count: self.queries, distinct_pair_count: self.seen.len() as u64 }
    }
}

/// Anything that answers "are points `i` and `j` in the same cluster?".
pub trait SameClusterOracle {
    fn same_cluster(&mut self, i: usize, j: usize) -> Result<bool>;

    fn stats(&self) -> OracleStats;

    fn reset_stats(&mut self);

    /// Number of points the oracle can be asked about.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<O: SameClusterOracle + ?Sized> SameClusterOracle for &mut O {
    fn same_cluster(&mut self, i: usize, j: usize) -> Result<bool> {
        (**self).same_cluster(i, j)
    }

    fn stats(&self) -> OracleStats {
        (**self).stats()
    }

    fn reset_stats(&mut self) {
        (**self).reset_stats()
    }

    fn len(&self) -> usize {
        (**self).len()
    }
}

#[derive(Debug, Clone)]
pub struct PerfectOracle {
    truth: GroundTruth,
    counter: Counter,
}

impl PerfectOracle {
    pub fn new(truth: GroundTruth) -> Self {
        Self { truth, counter: Counter::default() }
    }

    pub fn from_labeling(labeling: Labeling) -> Self {
        Self::new(GroundTruth::new(labeling))
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }
}

impl SameClusterOracle for PerfectOracle {
    fn same_cluster(&mut self, i: usize, j: usize) -> Result<bool> {
        let answer = self.truth.same(i, j)?;
        self.counter.record(i, j);
        Ok(answer)
    }

    fn stats(&self) -> OracleStats {
        self.counter.stats()
    }

    fn reset_stats(&mut self) {
        self.counter = Counter::default();
    }

    fn len(&self) -> usize {
        self.truth.len()
    }
}

/// First answer issued for each unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultyAnswerCache {
    answers: HashMap<u64, bool>,
}

impl FaultyAnswerCache {
    pub fn get(&self, i: usize, j: usize) -> Option<bool> {
        self.answers.get(&pair_key(i, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }
}

/// Same-cluster oracle whose answer on each pair is wrong with probability `q`,
/// independently across pairs, and stable under repetition.
///
/// Self-pairs always answer `true` and never flip.
#[derive(Debug, Clone)]
pub struct FaultyOracle {
    truth: GroundTruth,
    q: f64,
    cache: FaultyAnswerCache,
    rng: ChaCha8Rng,
    counter: Counter,
}

impl FaultyOracle {
    pub fn new(truth: GroundTruth, q: f64, seed: u64) -> Result<Self> {
        Self::with_rng(truth, q, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(truth: GroundTruth, q: f64, rng: ChaCha8Rng) -> Result<Self> {
        validate_error_rate(q)?;
        Ok(Self { truth, q, cache: FaultyAnswerCache::default(), rng, counter: Counter::default() })
    }

    pub fn error_rate(&self) -> f64 {
        self.q
    }

    pub fn cache(&self) -> &FaultyAnswerCache {
        &self.cache
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }
}

pub fn validate_error_rate(q: f64) -> Result<()> {
    if (0.0..0.5).contains(&q) {
        Ok(())
    } else {
        Err(Error::invalid(format!("q must be < 1/2 (and >= 0) for the faulty oracle, got {q}")))
    }
}

impl SameClusterOracle for FaultyOracle {
    fn same_cluster(&mut self, i: usize, j: usize) -> Result<bool> {
        let truth = self.truth.same(i, j)?;
        self.counter.record(i, j);
        if i == j {
            return Ok(true);
        }
        let key = pair_key(i, j);
        if let Some(&answer) = self.cache.answers.get(&key) {
            return Ok(answer);
        }
        let answer = if self.q > 0.0 && self.rng.random_bool(self.q) { !truth } else { truth };
        self.cache.answers.insert(key, answer);
        Ok(answer)
    }

    fn stats(&self) -> OracleStats {
        self.counter.stats()
    }

    fn reset_stats(&mut self) {
        self.counter = Counter::default();
    }

    fn len(&self) -> usize {
        self.truth.len()
    }
}
