//! k-means clustering with same-cluster queries.
//!
//! A [`SameClusterOracle`] answers whether two points share a cluster in a
//! hidden target labeling. [`query_kmeans_pp`] uses it to make k-means++
//! seeding pick one center per cluster. [`query_kmeans`] is a sampling-based
//! approximation scheme; [`faulty_query_kmeans`] is its variant for oracles
//! that answer wrongly with probability q < ½.
//!
//! [`solve_exact`] handles instances of up to 14 points and serves as ground
//! truth in experiments.

pub mod datagen;
pub mod dataset;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod faulty;
pub mod geom;
pub mod lloyd;
pub mod oracle;
pub mod ptas;
pub mod sampling;
pub mod seeding;
pub mod structure;

pub use datagen::{generate, GenKind, GenSpec};
pub use dataset::{read_csv, write_csv, CenterSet, Dataset, Labeling};
pub use error::{Error, Result};
pub use exact::{delta_sequence, optimal_cost, solve_exact, ExactSolution, MAX_EXACT_POINTS};
pub use experiment::{aggregate, parse_results, run_experiment, AggregateRow, Algorithm, ExperimentResult, RunRequest};
pub use faulty::{faulty_query_kmeans, faulty_query_kmeans_core, FaultyConfig};
pub use geom::{assign, centroid, cost, delta1, labeling_cost, squared_dist};
pub use oracle::{FaultyOracle, GroundTruth, OracleStats, PerfectOracle, SameClusterOracle};
pub use ptas::{query_kmeans, query_kmeans_core, repeat_rng, BoostedOutcome, PtasConfig, PtasRun, SampleSizes};
pub use sampling::{d2_sample, d2_weights, D2Sampler, WeightedPoint};
pub use seeding::{kmeans_pp, query_kmeans_pp, SeedingResult};
pub use structure::{check_irreducible, check_margin};
