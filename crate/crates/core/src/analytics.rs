//! Dataset statistics: clique-size distribution, genre/style distributions,
//! duration distribution, and artist counts.
//!
//! All statistics are pure functions of the dataset, so re-running a report
//! yields byte-identical output. Genre and style annotations are
//! release-level and are carried onto occurrences as an approximation; the
//! reports state this in their headers.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clique::{Clique, Version};
use crate::ids::ArtistId;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("empty-dataset: {0}")]
    EmptyDataset(&'static str),
    #[error("invalid bin width: must be positive")]
    InvalidBinWidth,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Clique-size summary, sizes measured in versions per clique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueSizeStats {
    pub clique_count: u64,
    pub version_count: u64,
    pub max_size: u64,
    /// Exact mean.
    pub mean_size: f64,
    /// Mean rounded to the nearest integer, for table-style reporting.
    pub mean_size_rounded: u64,
    /// Lower middle for even counts.
    pub median_size: u64,
}

pub fn clique_size_stats(cliques: &[Clique]) -> Result<CliqueSizeStats, AnalyticsError> {
    if cliques.is_empty() {
        return Err(AnalyticsError::EmptyDataset("no cliques"));
    }
    let mut sizes: Vec<u64> = cliques.iter().map(|c| c.version_count() as u64).collect();
    sizes.sort_unstable();
    let version_count: u64 = sizes.iter().sum();
    let mean = version_count as f64 / sizes.len() as f64;
    let median_index = if sizes.len().is_multiple_of(2) {
        sizes.len() / 2 - 1
    } else {
        sizes.len() / 2
    };
    Ok(CliqueSizeStats {
        clique_count: sizes.len() as u64,
        version_count,
        max_size: *sizes.last().expect("non-empty"),
        mean_size: mean,
        mean_size_rounded: mean.round() as u64,
        median_size: sizes[median_index],
    })
}

/// Histogram rows sorted by descending count, ties by ascending label.
pub type LabelHistogram = Vec<(String, u64)>;

fn label_distribution<'a>(
    versions: impl Iterator<Item = &'a Version>,
    field: impl Fn(&'a crate::clique::TrackOccurrence) -> &'a [String],
) -> LabelHistogram {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for version in versions {
        let distinct: BTreeSet<&str> = version
            .occurrences
            .iter()
            .flat_map(|o| field(o).iter().map(String::as_str))
            .collect();
        for label in distinct {
            *counts.entry(label.to_string()).or_default() += 1;
        }
    }
    let mut rows: LabelHistogram = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

/// Genre histogram: a version contributes once per distinct genre across its
/// occurrences.
pub fn genre_distribution<'a>(versions: impl Iterator<Item = &'a Version>) -> LabelHistogram {
    label_distribution(versions, |o| &o.genres)
}

/// Style histogram with the same counting rule as genres.
pub fn style_distribution<'a>(versions: impl Iterator<Item = &'a Version>) -> LabelHistogram {
    label_distribution(versions, |o| &o.styles)
}

/// Fixed-width duration histogram. Only non-empty bins are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationHistogram {
    pub bin_width_s: u32,
    /// bin index -> count; bin `i` covers `[i*width, (i+1)*width)`.
    pub bins: BTreeMap<u64, u64>,
    pub total_input: u64,
    pub counted: u64,
    pub skipped_negative: u64,
}

pub fn duration_histogram(
    durations: impl IntoIterator<Item = i64>,
    bin_width_s: u32,
) -> Result<DurationHistogram, AnalyticsError> {
    if bin_width_s == 0 {
        return Err(AnalyticsError::InvalidBinWidth);
    }
    let mut histogram = DurationHistogram {
        bin_width_s,
        bins: BTreeMap::new(),
        total_input: 0,
        counted: 0,
        skipped_negative: 0,
    };
    for duration in durations {
        histogram.total_input += 1;
        if duration < 0 {
            histogram.skipped_negative += 1;
            continue;
        }
        let bin = duration as u64 / bin_width_s as u64;
        *histogram.bins.entry(bin).or_default() += 1;
        histogram.counted += 1;
    }
    Ok(histogram)
}

impl DurationHistogram {
    pub fn reconciles(&self) -> bool {
        self.total_input == self.counted + self.skipped_negative
            && self.counted == self.bins.values().sum::<u64>()
    }
}

/// Artist counting mode. The single mode reduces each version to the first
/// id of its canonical artist key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtistCountMode {
    OnePerVersion,
}

/// Counts distinct artists, one per version, without expansion-added group
/// members (the artist key carries raw credits only).
pub fn artist_count(cliques: &[Clique], mode: ArtistCountMode) -> u64 {
    match mode {
        ArtistCountMode::OnePerVersion => {
            let distinct: BTreeSet<ArtistId> = cliques
                .iter()
                .flat_map(|c| c.versions.iter())
                .filter_map(|v| v.artist_key.first().copied())
                .collect();
            distinct.len() as u64
        }
    }
}

/// Writes a two-column histogram as CSV.
pub fn write_label_csv<W: Write>(
    rows: &LabelHistogram,
    header: (&str, &str),
    out: W,
) -> Result<(), AnalyticsError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([header.0, header.1])?;
    for (label, count) in rows {
        writer.write_record([label.as_str(), &count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the duration histogram as CSV with explicit bin bounds.
pub fn write_duration_csv<W: Write>(
    histogram: &DurationHistogram,
    out: W,
) -> Result<(), AnalyticsError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["bin_start_s", "bin_end_s", "count"])?;
    let width = histogram.bin_width_s as u64;
    for (&bin, &count) in &histogram.bins {
        writer.write_record([
            (bin * width).to_string(),
            ((bin + 1) * width).to_string(),
            count.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
