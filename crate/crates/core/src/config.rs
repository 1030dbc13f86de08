//! Configuration types for the pipeline stages.
//!
//! Every knob has a default so that a minimal config file (or none at all)
//! yields a working pipeline. Heuristic literals (official-upload markers,
//! decoration tokens) are data, not code: platforms drift, configs follow.

use serde::{Deserialize, Serialize};

/// Title normalization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeConfig {
    /// Leading articles stripped from titles. Lower-case words.
    pub articles: Vec<String>,
    /// Treat square brackets like parentheses when deleting bracketed spans.
    pub strip_brackets: bool,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            articles: vec!["the".into(), "a".into(), "an".into()],
            strip_brackets: true,
        }
    }
}

/// Clique and version grouping settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliqueConfig {
    /// Merge versions whose member-expanded artist sets overlap
    /// (e.g. a solo credit vs. the group that contains the artist).
    pub merge_overlapping: bool,
}

/// Video candidate matching settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    /// Description phrases that mark an official distributor upload.
    /// Matched case-insensitively as substrings.
    pub official_markers: Vec<String>,
    /// Tokens stripped from video titles before the second matching attempt:
    /// remaster/lyric/quality decorations that do not distinguish versions.
    pub decoration_tokens: Vec<String>,
    /// Candidates longer than this many seconds are rejected.
    pub max_duration_s: u32,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            official_markers: vec!["Provided to YouTube by".into()],
            decoration_tokens: vec![
                "remaster".into(),
                "remastered".into(),
                "hd".into(),
                "4k".into(),
                "lyrics".into(),
                "lyric video".into(),
                "official video".into(),
                "audio".into(),
                "visualizer".into(),
            ],
            max_duration_s: 1200,
        }
    }
}

/// Split construction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    /// Seed for the split PRNG (ChaCha8). Same inputs + same seed = same plan.
    pub seed: u64,
    /// Fraction of all cliques targeted for the test set.
    pub test_fraction: f64,
    /// Fraction of the development set assigned to validation.
    pub val_fraction_of_dev: f64,
    /// Inclusive version-count range for sampled (non-reserved) test cliques.
    pub sample_size_min: usize,
    pub sample_size_max: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            seed: 42,
            test_fraction: 0.10,
            val_fraction_of_dev: 0.10,
            sample_size_min: 2,
            sample_size_max: 6,
        }
    }
}

/// Dataset statistics settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    /// Width of duration histogram bins, in seconds.
    pub duration_bin_width_s: u32,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            duration_bin_width_s: 30,
        }
    }
}
