//! Core library for building a version-identification dataset from editorial
//! music-release metadata.
//!
//! The pipeline stages live in their own modules:
//!
//! - [`ingest`] — stream-parse compressed artist and release dumps into typed
//!   records (XML subset schema or JSONL).
//! - [`normalize`] — deterministic track-title normalization, in a full mode
//!   used for clique grouping and a lighter mode used for video matching.
//! - [`artist_graph`] — artist identity graph (aliases, memberships, name
//!   variations) and writer-set expansion.
//! - [`clique`] — two-step partitioning of track occurrences into cliques and
//!   versions.
//! - [`matcher`] — rule-based matching of versions against captured video
//!   candidate metadata, plus URL-collision deduplication.
//! - [`splitter`] — reproducible train/validation/test splits with reserved
//!   cliques and size-constrained sampling.
//! - [`analytics`] — dataset statistics (clique sizes, genre/style and
//!   duration distributions, artist counts).
//! - [`metrics`] — MAP and MR1 retrieval metrics over similarity matrices
//!   with clique labels and noise handling.

pub mod analytics;
pub mod artist_graph;
pub mod clique;
pub mod config;
pub mod ids;
pub mod ingest;
pub mod matcher;
pub mod metrics;
pub mod normalize;
pub mod splitter;

#[cfg(feature = "fixtures")]
pub mod fixtures;

pub use config::{CliqueConfig, MatchConfig, NormalizeConfig, SplitConfig, StatsConfig};
pub use ids::{ArtistId, ReleaseId};
pub use normalize::{NormalizedTitle, Normalizer};
