//! Reproducible train/validation/test splits over cliques.
//!
//! Reserved cliques (matched against external reference works) are pinned to
//! the test set; additional test cliques are sampled from a bounded
//! version-count range with a seeded ChaCha8 PRNG until the test set reaches
//! its target fraction. The remaining development cliques are shuffled by
//! the same stream and divided 90/10 into train and validation. Candidate
//! pools are sorted by clique id before any randomness, so the plan depends
//! only on the clique *set*, the parameters, and the seed — never on input
//! order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::artist_graph::ArtistGraph;
use crate::clique::{Clique, CliqueId};
use crate::config::SplitConfig;
use crate::normalize::Normalizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitSet {
    Train,
    Validation,
    Test,
}

/// The full split assignment plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub assignments: BTreeMap<CliqueId, SplitSet>,
    pub seed: u64,
    pub reserved_ids: BTreeSet<CliqueId>,
    pub target_test_fraction: f64,
    pub target_val_fraction_of_dev: f64,
    /// Inclusive version-count interval for sampled test cliques.
    pub sample_size_range: [usize; 2],
}

impl SplitPlan {
    pub fn count(&self, set: SplitSet) -> usize {
        self.assignments.values().filter(|&&s| s == set).count()
    }
}

/// An external reference work: a title plus writer names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalRef {
    pub title: String,
    pub writers: Vec<String>,
}

/// Reserved-clique lookup result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReservedMatch {
    pub reserved: BTreeSet<CliqueId>,
    pub unmatched: Vec<ExternalRef>,
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("reserved clique id {0:?} does not exist in the input")]
    UnknownReservedClique(CliqueId),
    #[error("invalid split parameter {field}: {message}")]
    InvalidParameter {
        field: &'static str,
        message: String,
    },
}

/// Finds cliques matching external reference works: the titles must be equal
/// after full normalization and the writer name-form sets must intersect.
pub fn find_reserved(
    cliques: &[Clique],
    refs: &[ExternalRef],
    graph: &ArtistGraph,
    normalizer: &Normalizer,
) -> ReservedMatch {
    // Writer name forms per clique, grouped by normalized title.
    let mut by_title: HashMap<&str, Vec<(&Clique, BTreeSet<String>)>> = HashMap::new();
    let mut form_cache: HashMap<crate::ids::ArtistId, BTreeSet<String>> = HashMap::new();
    for clique in cliques {
        let mut writer_forms: BTreeSet<String> = BTreeSet::new();
        for version in &clique.versions {
            for occurrence in &version.occurrences {
                for &writer in &occurrence.writer_ids_expanded {
                    let forms = form_cache
                        .entry(writer)
                        .or_insert_with(|| graph.name_forms(writer, normalizer));
                    writer_forms.extend(forms.iter().cloned());
                }
            }
        }
        by_title
            .entry(clique.normalized_title.as_str())
            .or_default()
            .push((clique, writer_forms));
    }

    let mut result = ReservedMatch::default();
    for external in refs {
        let title = normalizer.full(&external.title);
        let writer_names: BTreeSet<String> = external
            .writers
            .iter()
            .map(|w| normalizer.matching(w).into_string())
            .filter(|w| !w.is_empty())
            .collect();
        let mut matched = false;
        if let Some(entries) = by_title.get(title.as_str()) {
            for (clique, forms) in entries {
                if writer_names.iter().any(|w| forms.contains(w)) {
                    result.reserved.insert(clique.clique_id.clone());
                    matched = true;
                }
            }
        }
        if !matched {
            result.unmatched.push(external.clone());
        }
    }
    result
}

/// Builds the split plan. Deterministic given (clique set, reserved, config).
pub fn make_splits(
    cliques: &[Clique],
    reserved: &BTreeSet<CliqueId>,
    config: &SplitConfig,
) -> Result<SplitPlan, SplitError> {
    validate_config(config)?;
    let sizes: BTreeMap<&str, usize> = cliques
        .iter()
        .map(|c| (c.clique_id.as_str(), c.version_count()))
        .collect();
    for id in reserved {
        if !sizes.contains_key(id.as_str()) {
            return Err(SplitError::UnknownReservedClique(id.clone()));
        }
    }

    let total = cliques.len();
    let target = total as f64 * config.test_fraction;
    let mut assignments: BTreeMap<CliqueId, SplitSet> = BTreeMap::new();
    for id in reserved {
        assignments.insert(id.clone(), SplitSet::Test);
    }
    if reserved.len() as f64 > target {
        log::warn!(
            "reserved cliques ({}) already exceed the test target ({target:.1}); keeping all",
            reserved.len()
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Sampled test cliques come from the bounded version-count pool.
    let mut pool: Vec<&str> = sizes
        .iter()
        .filter(|(id, &size)| {
            !reserved.contains(**id)
                && size >= config.sample_size_min
                && size <= config.sample_size_max
        })
        .map(|(id, _)| *id)
        .collect();
    pool.sort_unstable();
    pool.shuffle(&mut rng);
    // Smallest sample count that lifts the test set to the target.
    let deficit = (target - reserved.len() as f64).ceil().max(0.0) as usize;
    for id in pool.into_iter().take(deficit) {
        assignments.insert(id.to_string(), SplitSet::Test);
    }

    // Remaining cliques form the development set, shuffled then cut 90/10.
    let mut development: Vec<&str> = sizes
        .keys()
        .copied()
        .filter(|id| !assignments.contains_key(*id))
        .collect();
    development.sort_unstable();
    development.shuffle(&mut rng);
    let validation_count =
        (development.len() as f64 * config.val_fraction_of_dev).round() as usize;
    for (index, id) in development.into_iter().enumerate() {
        let set = if index < validation_count {
            SplitSet::Validation
        } else {
            SplitSet::Train
        };
        assignments.insert(id.to_string(), set);
    }

    Ok(SplitPlan {
        assignments,
        seed: config.seed,
        reserved_ids: reserved.clone(),
        target_test_fraction: config.test_fraction,
        target_val_fraction_of_dev: config.val_fraction_of_dev,
        sample_size_range: [config.sample_size_min, config.sample_size_max],
    })
}

fn validate_config(config: &SplitConfig) -> Result<(), SplitError> {
    if !(0.0..=1.0).contains(&config.test_fraction) {
        return Err(SplitError::InvalidParameter {
            field: "test_fraction",
            message: format!("{} is not within [0, 1]", config.test_fraction),
        });
    }
    if !(0.0..=1.0).contains(&config.val_fraction_of_dev) {
        return Err(SplitError::InvalidParameter {
            field: "val_fraction_of_dev",
            message: format!("{} is not within [0, 1]", config.val_fraction_of_dev),
        });
    }
    if config.sample_size_min > config.sample_size_max {
        return Err(SplitError::InvalidParameter {
            field: "sample_size_min",
            message: format!(
                "range [{}, {}] is empty",
                config.sample_size_min, config.sample_size_max
            ),
        });
    }
    Ok(())
}
