//! Cluster-restricted collaborative filtering for users of a social network.
//!
//! The pipeline has four stages:
//!
//! 1. [`dataset`] ingests a sparse ratings matrix (with optional per-rating
//!    context tags) and a typed social graph.
//! 2. [`clustering`] partitions the rated users with a similarity-driven
//!    k-means whose first `k` users (in id order) seed the centroids and
//!    whose similarity function is the Pearson correlation from
//!    [`similarity`].
//! 3. [`recommender`] pre-filters ratings by context, predicts scores from
//!    the active user's cluster only, places rating-less users through
//!    their social neighbours, and emits ranked top-N lists.
//! 4. [`evaluation`] scores the whole pipeline with precision@N and
//!    recall@N over a seeded holdout split.
//!
//! The runnable programs under `examples/` walk through each stage, and the
//! `socialrec` binary wraps everything in a file-based command line tool
//! (see [`cli`]).

pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod recommender;
pub mod similarity;
pub mod synthetic;

pub use clustering::{cluster, ClusterSet, ClusteringConfig, ClusteringMode};
pub use dataset::{
    ingest_edges, ingest_ratings, ContextTags, Dataset, Dimension, ItemId, Rating, RatingsMatrix,
    Relation, SocialEdge, SocialGraph, UserId,
};
pub use error::{Error, Result};
pub use evaluation::{evaluate, EvaluationReport, SplitConfig};
pub use recommender::{recommend_top_n, ContextQuery, Prediction, RecommendationList};
pub use similarity::{pearson, Similarity, SimilarityOutcome};
