//! Pipeline configuration file (TOML) and its validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use vforge_core::config::{CliqueConfig, MatchConfig, NormalizeConfig, SplitConfig, StatsConfig};

use crate::error::CliError;

/// Input and output locations.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub artists: Option<PathBuf>,
    pub releases: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub external_refs: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub artist_graph_cache: Option<PathBuf>,
}

/// Which cliques file downstream stages consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliqueSource {
    /// Post-matching, URL-deduplicated cliques.
    Dedupe,
    /// Metadata-only cliques straight from the clique stage.
    Cliques,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitStageConfig {
    #[serde(flatten)]
    pub params: SplitConfig,
    pub input: CliqueSource,
}

impl Default for SplitStageConfig {
    fn default() -> Self {
        SplitStageConfig {
            params: SplitConfig::default(),
            input: CliqueSource::Dedupe,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsStageConfig {
    #[serde(flatten)]
    pub params: StatsConfig,
    pub input: CliqueSource,
}

impl Default for StatsStageConfig {
    fn default() -> Self {
        StatsStageConfig {
            params: StatsConfig::default(),
            input: CliqueSource::Dedupe,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// JSONL rows `{"label": …, "vector": […]}`; cosine similarity is
    /// computed internally, rows serve as both queries and candidates.
    pub embeddings: Option<PathBuf>,
    /// JSONL rows `{"label": …, "scores": […]}` of a precomputed similarity
    /// matrix; requires `candidate_labels`.
    pub similarity: Option<PathBuf>,
    /// Text file, one candidate label per line (similarity mode).
    pub candidate_labels: Option<PathBuf>,
    pub noise_label: Option<String>,
    pub self_mask: Option<bool>,
}

/// The whole pipeline configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub normalize: NormalizeConfig,
    pub cliques: CliqueConfig,
    #[serde(rename = "match")]
    pub matching: MatchConfig,
    pub split: SplitStageConfig,
    pub stats: StatsStageConfig,
    pub eval: EvalConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let config: PipelineConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            field: "config".into(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, message: String| {
            Err(CliError::Config {
                field: field.into(),
                message,
            })
        };
        if self.normalize.articles.iter().any(|a| a.trim().is_empty()) {
            return bad("normalize.articles", "articles must be non-empty words".into());
        }
        if self.matching.max_duration_s == 0 {
            return bad("match.max_duration_s", "must be positive".into());
        }
        let split = &self.split.params;
        if !(0.0..=1.0).contains(&split.test_fraction) {
            return bad(
                "split.test_fraction",
                format!("{} is not within [0, 1]", split.test_fraction),
            );
        }
        if !(0.0..=1.0).contains(&split.val_fraction_of_dev) {
            return bad(
                "split.val_fraction_of_dev",
                format!("{} is not within [0, 1]", split.val_fraction_of_dev),
            );
        }
        if split.sample_size_min > split.sample_size_max {
            return bad(
                "split.sample_size_min",
                format!(
                    "range [{}, {}] is empty",
                    split.sample_size_min, split.sample_size_max
                ),
            );
        }
        if self.stats.params.duration_bin_width_s == 0 {
            return bad("stats.duration_bin_width_s", "must be positive".into());
        }
        if self.eval.embeddings.is_some() && self.eval.similarity.is_some() {
            return bad(
                "eval.embeddings",
                "set either eval.embeddings or eval.similarity, not both".into(),
            );
        }
        if self.eval.similarity.is_some() && self.eval.candidate_labels.is_none() {
            return bad(
                "eval.candidate_labels",
                "similarity mode requires a candidate labels file".into(),
            );
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Hash of the fully resolved configuration; any change invalidates
    /// every stage cache.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// A required path option, as a config error when absent.
    pub fn require_path(&self, field: &'static str) -> Result<&Path, CliError> {
        let value = match field {
            "paths.artists" => &self.paths.artists,
            "paths.releases" => &self.paths.releases,
            "paths.candidates" => &self.paths.candidates,
            _ => &None,
        };
        value.as_deref().ok_or_else(|| CliError::Config {
            field: field.into(),
            message: "required for this stage".into(),
        })
    }
}

/// Counters attached to a stage report and its manifest.
pub type Counters = BTreeMap<String, serde_json::Value>;
