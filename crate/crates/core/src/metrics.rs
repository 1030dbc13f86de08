//! Retrieval metrics over a similarity matrix with clique labels: mean
//! average precision (MAP) and mean rank of the first relevant item (MR1).
//!
//! Noise tracks — works with no alternate versions, present only as
//! distractors — carry a distinguished label. They are never evaluated as
//! queries but remain in the candidate ranking, where they can push relevant
//! items down. Ties in similarity break by ascending candidate index so
//! results are reproducible across implementations.
//!
//! The core is row-at-a-time ([`StreamingEvaluator`]), so a large candidate
//! set never requires the full square matrix in memory; [`EvalInstance`]
//! wraps it for dense input. Per-query results are accumulated in row order
//! and reduced with a plain sequential sum, which keeps floating-point
//! output independent of any intra-row parallelism.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite similarity at row {row}, column {column}")]
    NonFiniteSimilarity { row: usize, column: usize },
    #[error("unanswerable-query: row {row} has no relevant candidate after masking")]
    UnanswerableQuery { row: usize },
    #[error("no non-noise queries to evaluate")]
    NoQueries,
}

/// Dense evaluation input: rows are queries, columns are candidates, higher
/// similarity means more similar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub similarity: Vec<Vec<f64>>,
    pub query_labels: Vec<String>,
    pub candidate_labels: Vec<String>,
    /// Label marking noise rows/columns, when present.
    pub noise_label: Option<String>,
    /// (query row, candidate column) pairs excluded from ranking — typically
    /// the item itself when rows and columns are the same collection.
    pub self_mask: Vec<(usize, usize)>,
}

impl EvalInstance {
    /// Diagonal self-mask for square instances.
    pub fn diagonal_mask(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, i)).collect()
    }
}

/// Evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub map: f64,
    pub mr1: f64,
    pub queries_evaluated: usize,
    pub noise_queries_skipped: usize,
    pub candidates: usize,
}

/// Row-at-a-time evaluator.
pub struct StreamingEvaluator {
    candidate_labels: Vec<String>,
    noise_label: Option<String>,
    mask: HashSet<(usize, usize)>,
    row: usize,
    average_precisions: Vec<f64>,
    first_ranks: Vec<f64>,
    noise_queries_skipped: usize,
}

impl StreamingEvaluator {
    pub fn new(
        candidate_labels: Vec<String>,
        noise_label: Option<String>,
        self_mask: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        StreamingEvaluator {
            candidate_labels,
            noise_label,
            mask: self_mask.into_iter().collect(),
            row: 0,
            average_precisions: Vec::new(),
            first_ranks: Vec::new(),
            noise_queries_skipped: 0,
        }
    }

    fn is_noise(&self, label: &str) -> bool {
        self.noise_label.as_deref() == Some(label)
    }

    /// Feeds the similarity row for the next query.
    pub fn push_row(&mut self, query_label: &str, scores: &[f64]) -> Result<(), MetricsError> {
        let row = self.row;
        self.row += 1;
        if scores.len() != self.candidate_labels.len() {
            return Err(MetricsError::DimensionMismatch(format!(
                "row {row} has {} scores for {} candidates",
                scores.len(),
                self.candidate_labels.len()
            )));
        }
        if let Some(column) = scores.iter().position(|s| !s.is_finite()) {
            return Err(MetricsError::NonFiniteSimilarity { row, column });
        }
        if self.is_noise(query_label) {
            self.noise_queries_skipped += 1;
            return Ok(());
        }

        let mut order: Vec<usize> = (0..scores.len())
            .filter(|&j| !self.mask.contains(&(row, j)))
            .collect();
        // Descending similarity, ties by ascending candidate index; the index
        // tiebreak is implicit because sort_by is stable over the ascending
        // base order.
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

        let mut hits = 0u64;
        let mut precision_sum = 0.0;
        let mut first_rank = None;
        for (offset, &candidate) in order.iter().enumerate() {
            if self.candidate_labels[candidate] == query_label {
                let rank = (offset + 1) as f64;
                hits += 1;
                precision_sum += hits as f64 / rank;
                if first_rank.is_none() {
                    first_rank = Some(rank);
                }
            }
        }
        match first_rank {
            None => Err(MetricsError::UnanswerableQuery { row }),
            Some(rank) => {
                self.average_precisions.push(precision_sum / hits as f64);
                self.first_ranks.push(rank);
                Ok(())
            }
        }
    }

    pub fn finish(self) -> Result<MetricsReport, MetricsError> {
        let evaluated = self.average_precisions.len();
        if evaluated == 0 {
            return Err(MetricsError::NoQueries);
        }
        let map = self.average_precisions.iter().sum::<f64>() / evaluated as f64;
        let mr1 = self.first_ranks.iter().sum::<f64>() / evaluated as f64;
        Ok(MetricsReport {
            map,
            mr1,
            queries_evaluated: evaluated,
            noise_queries_skipped: self.noise_queries_skipped,
            candidates: self.candidate_labels.len(),
        })
    }
}

fn run_instance(instance: &EvalInstance) -> Result<MetricsReport, MetricsError> {
    if instance.similarity.len() != instance.query_labels.len() {
        return Err(MetricsError::DimensionMismatch(format!(
            "{} similarity rows for {} query labels",
            instance.similarity.len(),
            instance.query_labels.len()
        )));
    }
    let mut evaluator = StreamingEvaluator::new(
        instance.candidate_labels.clone(),
        instance.noise_label.clone(),
        instance.self_mask.iter().copied(),
    );
    for (row, scores) in instance.similarity.iter().enumerate() {
        evaluator.push_row(&instance.query_labels[row], scores)?;
    }
    evaluator.finish()
}

/// Both metrics in one pass.
pub fn evaluate(instance: &EvalInstance) -> Result<MetricsReport, MetricsError> {
    run_instance(instance)
}

pub fn mean_average_precision(instance: &EvalInstance) -> Result<f64, MetricsError> {
    run_instance(instance).map(|r| r.map)
}

pub fn mean_rank_first_relevant(instance: &EvalInstance) -> Result<f64, MetricsError> {
    run_instance(instance).map(|r| r.mr1)
}

/// Cosine similarity; zero vectors compare as 0.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
