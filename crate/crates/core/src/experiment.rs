//! Experiment rows: running an algorithm on an instance, recording cost,
//! queries and seeds, and aggregating rows into summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Labeling};
use crate::error::{Error, Result};
use crate::exact::{solve_exact, MAX_EXACT_POINTS};
use crate::faulty::{faulty_query_kmeans, FaultyConfig};
use crate::geom::cost;
use crate::lloyd;
use crate::oracle::{FaultyOracle, GroundTruth, PerfectOracle, SameClusterOracle};
use crate::ptas::{query_kmeans, repeat_rng, BoostedOutcome, PtasConfig};
use crate::seeding::{kmeans_pp, query_kmeans_pp, SeedingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    KMeansPP,
    QueryKMeansPP,
    QueryKMeans,
    FaultyQueryKMeans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::KMeansPP, Algorithm::QueryKMeansPP, Algorithm::QueryKMeans, Algorithm::FaultyQueryKMeans];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::KMeansPP => "kmeans++",
            Algorithm::QueryKMeansPP => "query-kmeans++",
            Algorithm::QueryKMeans => "query-kmeans",
            Algorithm::FaultyQueryKMeans => "faulty-query-kmeans",
        }
    }

    pub fn uses_oracle(self) -> bool {
        self != Algorithm::KMeansPP
    }

    pub fn uses_eps(self) -> bool {
        matches!(self, Algorithm::QueryKMeans | Algorithm::FaultyQueryKMeans)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

/// One output row. CSV columns follow field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    /// Repeat index, or `best` for the summary row.
    pub row: String,
    pub algorithm: String,
    pub instance: String,
    pub data_seed: Option<u64>,
    pub algo_seed: u64,
    pub oracle_seed: Option<u64>,
    pub k: usize,
    pub eps: Option<f64>,
    pub q: Option<f64>,
    pub scale: Option<f64>,
    pub repeats: usize,
    pub achieved_cost: f64,
    pub delta_k: Option<f64>,
    pub ratio: Option<f64>,
    pub query_count: u64,
    pub distinct_pair_count: u64,
    /// Exhausted rounds (seeding) or rounds with |T| < M (approximation schemes).
    pub failed_rounds: usize,
    /// Centers added by D²-padding for reporting.
    pub padding: usize,
    pub lloyd_cost: Option<f64>,
    pub wall_millis: Option<u64>,
}

impl ExperimentResult {
    pub const BEST: &'static str = "best";

    pub fn is_best(&self) -> bool {
        self.row == Self::BEST
    }

    pub const COLUMNS: [&'static str; 20] = [
        "row",
        "algorithm",
        "instance",
        "data_seed",
        "algo_seed",
        "oracle_seed",
        "k",
        "eps",
        "q",
        "scale",
        "repeats",
        "achieved_cost",
        "delta_k",
        "ratio",
        "query_count",
        "distinct_pair_count",
        "failed_rounds",
        "padding",
        "lloyd_cost",
        "wall_millis",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub algorithm: Algorithm,
    pub k: usize,
    pub eps: f64,
    pub q: f64,
    pub scale: f64,
    pub repeats: usize,
    pub general_mode: bool,
    pub algo_seed: u64,
    pub oracle_seed: u64,
    pub instance: String,
    pub data_seed: Option<u64>,
    pub lloyd_refine: bool,
    pub timing: bool,
}

impl RunRequest {
    pub fn new(algorithm: Algorithm, k: usize) -> Self {
        Self {
            algorithm,
            k,
            eps: 0.5,
            q: 0.0,
            scale: 1.0,
            repeats: PtasConfig::DEFAULT_REPEATS,
            general_mode: false,
            algo_seed: 0,
            oracle_seed: 0,
            instance: String::new(),
            data_seed: None,
            lloyd_refine: false,
            timing: false,
        }
    }

    pub fn ptas_config(&self) -> Result<PtasConfig> {
        PtasConfig::new(self.k, self.eps)?
            .with_scale(self.scale)?
            .with_repeats(self.repeats)
            .map(|c| c.with_general_mode(self.general_mode))
    }

    pub fn faulty_config(&self) -> Result<FaultyConfig> {
        Ok(FaultyConfig::new(self.k, self.eps, self.q)?
            .with_scale(self.scale)?
            .with_repeats(self.repeats)?
            .with_general_mode(self.general_mode))
    }
}

struct Measured {
    cost: f64,
    centers: crate::dataset::CenterSet,
    queries: u64,
    distinct: u64,
    failed_rounds: usize,
    padding: usize,
}

fn from_seeding(data: &Dataset, r: &SeedingResult, distinct: u64) -> Result<Measured> {
    Ok(Measured {
        cost: cost(&r.report_centers, data)?,
        centers: r.report_centers.clone(),
        queries: r.queries_used,
        distinct,
        failed_rounds: r.rounds_exhausted,
        padding: r.padding,
    })
}

fn from_boosted(outcome: BoostedOutcome) -> Vec<Measured> {
    outcome
        .runs
        .into_iter()
        .map(|s| Measured {
            cost: s.cost,
            failed_rounds: s.run.failed_rounds(),
            padding: s.run.padding,
            queries: s.run.queries_used,
            distinct: s.oracle_stats.distinct_pair_count,
            centers: s.run.report_centers,
        })
        .collect()
}

/// Runs `req` on `data` and returns one row per repeat followed by a `best`
/// row. Δ_k is filled in whenever the exact solver can handle the instance.
///
/// The `best` row copies the cheapest repeat (earliest on ties) except for
/// the query columns, which total all repeats.
pub fn run_experiment(data: &Dataset, truth: Option<&Labeling>, req: &RunRequest) -> Result<Vec<ExperimentResult>> {
    if req.repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    let truth = match (req.algorithm.uses_oracle(), truth) {
        (true, None) => {
            return Err(Error::invalid(format!(
                "{} needs ground-truth labels (a `label` column) to simulate the oracle",
                req.algorithm
            )))
        }
        (true, Some(t)) => {
            t.check_matches(data)?;
            Some(GroundTruth::new(t.clone()))
        }
        (false, _) => None,
    };
    let started = Instant::now();

    let measured: Vec<Measured> = match req.algorithm {
        Algorithm::KMeansPP => (0..req.repeats)
            .into_par_iter()
            .map(|r| {
                let res = kmeans_pp(data, req.k, &mut repeat_rng(req.algo_seed, r))?;
                from_seeding(data, &res, 0)
            })
            .collect::<Result<_>>()?,
        Algorithm::QueryKMeansPP => {
            let truth = truth.as_ref().expect("checked above");
            (0..req.repeats)
                .into_par_iter()
                .map(|r| {
                    let mut oracle = PerfectOracle::new(truth.clone());
                    let res = query_kmeans_pp(data, req.k, &mut oracle, &mut repeat_rng(req.algo_seed, r))?;
                    from_seeding(data, &res, oracle.stats().distinct_pair_count)
                })
                .collect::<Result<_>>()?
        }
        Algorithm::QueryKMeans => {
            let truth = truth.as_ref().expect("checked above");
            let cfg = req.ptas_config()?;
            from_boosted(query_kmeans(data, &cfg, req.algo_seed, |_| Ok(PerfectOracle::new(truth.clone())))?)
        }
        Algorithm::FaultyQueryKMeans => {
            let truth = truth.as_ref().expect("checked above");
            let cfg = req.faulty_config()?;
            from_boosted(faulty_query_kmeans(data, &cfg, req.algo_seed, |r| {
                FaultyOracle::with_rng(truth.clone(), req.q, repeat_rng(req.oracle_seed, r))
            })?)
        }
    };
    let wall = req.timing.then(|| started.elapsed().as_millis() as u64);

    let delta_k = if data.len() <= MAX_EXACT_POINTS && req.k <= data.len() {
        Some(solve_exact(data, req.k)?.optimal_cost)
    } else {
        None
    };
    let ratio_of = |c: f64| {
        delta_k.map(|d| {
            if d > 0.0 {
                c / d
            } else if c <= 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        })
    };

    let template = |row: String, m: &Measured| -> Result<ExperimentResult> {
        let lloyd_cost = if req.lloyd_refine && !m.centers.is_empty() {
            Some(lloyd::refine(data, &m.centers, 100)?.1)
        } else {
            None
        };
        Ok(ExperimentResult {
            row,
            algorithm: req.algorithm.id().to_string(),
            instance: req.instance.clone(),
            data_seed: req.data_seed,
            algo_seed: req.algo_seed,
            oracle_seed: (req.algorithm == Algorithm::FaultyQueryKMeans).then_some(req.oracle_seed),
            k: req.k,
            eps: req.algorithm.uses_eps().then_some(req.eps),
            q: (req.algorithm == Algorithm::FaultyQueryKMeans).then_some(req.q),
            scale: req.algorithm.uses_eps().then_some(req.scale),
            repeats: req.repeats,
            achieved_cost: m.cost,
            delta_k,
            ratio: ratio_of(m.cost),
            query_count: m.queries,
            distinct_pair_count: m.distinct,
            failed_rounds: m.failed_rounds,
            padding: m.padding,
            lloyd_cost,
            wall_millis: wall,
        })
    };

    let mut rows = measured.iter().enumerate().map(|(r, m)| template(r.to_string(), m)).collect::<Result<Vec<_>>>()?;
    let best = measured.iter().enumerate().fold(0, |b, (i, m)| if m.cost < measured[b].cost { i } else { b });
    let mut summary = template(ExperimentResult::BEST.to_string(), &measured[best])?;
    summary.query_count = measured.iter().map(|m| m.queries).sum();
    summary.distinct_pair_count = measured.iter().map(|m| m.distinct).sum();
    rows.push(summary);
    Ok(rows)
}

pub fn write_results_csv<W: std::io::Write>(writer: W, rows: &[ExperimentResult]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(ExperimentResult::COLUMNS)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses rows written by [`write_results_csv`] or as JSON lines (one flat
/// object per line; detected by a leading `{`). On failure returns the
/// 1-based line numbers of every malformed row.
pub fn parse_results(text: &str) -> std::result::Result<Vec<ExperimentResult>, Vec<usize>> {
    let first = text.trim_start().chars().next();
    match first {
        None => Ok(Vec::new()),
        Some('{') => {
            let mut rows = Vec::new();
            let mut bad = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json_line(line) {
                    Some(r) => rows.push(r),
                    None => bad.push(i + 1),
                }
            }
            if bad.is_empty() {
                Ok(rows)
            } else {
                Err(bad)
            }
        }
        Some(_) => {
            let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
            let header_ok =
                rdr.headers().map(|h| h.iter().eq(ExperimentResult::COLUMNS.iter().copied())).unwrap_or(false);
            if !header_ok {
                return Err(vec![1]);
            }
            let mut rows = Vec::new();
            let mut bad = Vec::new();
            for record in rdr.records() {
                match record {
                    Ok(rec) => {
                        let line = rec.position().map_or(0, |p| p.line() as usize);
                        match rec.deserialize::<ExperimentResult>(None) {
                            Ok(r) if rec.len() == ExperimentResult::COLUMNS.len() => rows.push(r),
                            _ => bad.push(line),
                        }
                    }
                    Err(e) => bad.push(e.position().map_or(0, |p| p.line() as usize)),
                }
            }
            if bad.is_empty() {
                Ok(rows)
            } else {
                Err(bad)
            }
        }
    }
}

fn serde_json_line(line: &str) -> Option<ExperimentResult> {
    serde_json::from_str(line).ok()
}

/// Summary of one (algorithm, row kind, k, ε, q, scale) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    /// `run` for per-repeat rows, `best` for summary rows.
    pub row_kind: String,
    pub k: usize,
    pub eps: Option<f64>,
    pub q: Option<f64>,
    pub scale: Option<f64>,
    pub rows: usize,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub mean_queries: f64,
    /// Fraction of rows with ratio ≤ 1 + ε (only when both are present).
    pub success_fraction: Option<f64>,
}

pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "algorithm",
    "row_kind",
    "k",
    "eps",
    "q",
    "scale",
    "rows",
    "mean_ratio",
    "max_ratio",
    "mean_queries",
    "success_fraction",
];

fn opt_key(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// (algorithm, row kind, k, ε, q, scale), floats as their shortest text.
type GroupKey = (String, String, usize, String, String, String);

/// Groups rows deterministically and summarises each group.
pub fn aggregate(rows: &[ExperimentResult]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<GroupKey, Vec<&ExperimentResult>> = BTreeMap::new();
    for r in rows {
        let kind = if r.is_best() { "best" } else { "run" };
        groups
            .entry((r.algorithm.clone(), kind.to_string(), r.k, opt_key(r.eps), opt_key(r.q), opt_key(r.scale)))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, row_kind, k, _, _, _), members)| {
            let first = members[0];
            let ratios: Vec<f64> = members.iter().filter_map(|r| r.ratio).collect();
            let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
            let max_ratio = ratios.iter().copied().reduce(f64::max);
            let mean_queries = members.iter().map(|r| r.query_count as f64).sum::<f64>() / members.len() as f64;
            let success_fraction = first.eps.and_then(|eps| {
                (!ratios.is_empty())
                    .then(|| ratios.iter().filter(|&&r| r <= 1.0 + eps).count() as f64 / ratios.len() as f64)
            });
            AggregateRow {
                algorithm,
                row_kind,
                k,
                eps: first.eps,
                q: first.q,
                scale: first.scale,
                rows: members.len(),
                mean_ratio,
                max_ratio,
                mean_queries,
                success_fraction,
            }
        })
        .collect()
}

pub fn write_aggregate_csv<W: std::io::Write>(writer: W, rows: &[AggregateRow]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    wtr.write_record(AGGREGATE_COLUMNS)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
