//! Two-step partitioning of track occurrences into cliques and versions.
//!
//! Step one groups occurrences by exact normalized-title equality. Step two
//! splits each title group into connected components where two occurrences
//! are adjacent iff their expanded writer sets intersect; chains are enough,
//! pairwise-complete sharing is not required. Within a component, occurrences
//! performed by the same artist set form a version; components that end up
//! with fewer than two versions are discarded.
//!
//! Title groups are independent work units and are processed in parallel;
//! the final output is assembled by sorting on clique id, so results do not
//! depend on thread scheduling or input order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::artist_graph::ArtistGraph;
use crate::ids::{ArtistId, ReleaseId};
use crate::ingest::ReleaseRecord;
use crate::normalize::{NormalizedTitle, Normalizer};

pub type CliqueId = String;
pub type VersionId = String;

/// One appearance of a track on one release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackOccurrence {
    pub release_id: ReleaseId,
    pub position: String,
    pub raw_title: String,
    pub normalized_title: NormalizedTitle,
    pub performer_ids: BTreeSet<ArtistId>,
    pub featuring_ids: BTreeSet<ArtistId>,
    pub writer_ids_expanded: BTreeSet<ArtistId>,
    pub genres: Vec<String>,
    pub styles: Vec<String>,
    pub year: Option<i32>,
    pub country: Option<String>,
}

impl TrackOccurrence {
    /// Canonical performer-plus-featuring key this occurrence belongs to.
    pub fn artist_key(&self) -> Vec<ArtistId> {
        self.performer_ids
            .union(&self.featuring_ids)
            .copied()
            .collect()
    }

    fn locator(&self) -> (ReleaseId, &str) {
        (self.release_id, self.position.as_str())
    }
}

/// A set of same-clique occurrences performed by one artist set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Version {
    /// Content-derived id: hash of the clique id and the artist key, stable
    /// across re-runs and input order.
    pub version_id: VersionId,
    pub artist_key: Vec<ArtistId>,
    pub occurrences: Vec<TrackOccurrence>,
    /// Matched video ids in rank order; filled by the matcher stage.
    #[serde(default)]
    pub urls: Vec<String>,
}

impl Version {
    /// First matched video id, if any.
    pub fn primary_url(&self) -> Option<&str> {
        self.urls.first().map(String::as_str)
    }
}

/// A work-level equivalence class with at least two versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clique {
    /// Content-derived id: hash of the normalized title and the lowest
    /// member locator (release id, position), stable across re-runs.
    pub clique_id: CliqueId,
    pub normalized_title: NormalizedTitle,
    pub versions: Vec<Version>,
}

impl Clique {
    pub fn version_count(&self) -> usize {
        self.versions.len()
    }

    pub fn occurrence_count(&self) -> usize {
        self.versions.iter().map(|v| v.occurrences.len()).sum()
    }
}

/// Why a track never became an occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    EmptyTitle,
    NoWriter,
    NoPerformer,
}

/// One item of the extraction stream.
#[derive(Debug, Clone)]
pub enum Extracted {
    Occurrence(Box<TrackOccurrence>),
    Dropped(DropReason),
}

/// Extraction drop counters; reconciles against the input track count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractCounters {
    pub tracks_seen: u64,
    pub emitted: u64,
    pub empty_title: u64,
    pub no_writer: u64,
    pub no_performer: u64,
}

impl ExtractCounters {
    pub fn reconciles(&self) -> bool {
        self.tracks_seen == self.emitted + self.empty_title + self.no_writer + self.no_performer
    }
}

/// Turns releases into one occurrence per (release, track).
///
/// Performer precedence: track artists when present, otherwise the release
/// artists; featuring artists ride along separately. Writer precedence:
/// track-level credits when present, otherwise release-level. Tracks with an
/// empty normalized title, no writers at either level, or no performers are
/// dropped with a reason.
pub fn extract_occurrences<'a>(
    releases: impl Iterator<Item = ReleaseRecord> + 'a,
    graph: &'a ArtistGraph,
    normalizer: &'a Normalizer,
) -> impl Iterator<Item = Extracted> + 'a {
    releases.flat_map(move |release| {
        let release_artist_ids: Vec<ArtistId> = release.artists.iter().map(|c| c.id).collect();
        let release_writer_ids = release.writer_ids.clone();
        let genres = release.genres.clone();
        let styles = release.styles.clone();
        let year = release.year;
        let country = release.country.clone();
        let release_id = release.id;

        release
            .tracks
            .into_iter()
            .map(move |track| {
                let normalized_title = normalizer.full(&track.title);
                if normalized_title.is_empty() {
                    return Extracted::Dropped(DropReason::EmptyTitle);
                }
                let writers: &[ArtistId] = if track.writer_ids.is_empty() {
                    &release_writer_ids
                } else {
                    &track.writer_ids
                };
                if writers.is_empty() {
                    return Extracted::Dropped(DropReason::NoWriter);
                }
                let performers: &[ArtistId] = if track.artist_ids.is_empty() {
                    &release_artist_ids
                } else {
                    &track.artist_ids
                };
                if performers.is_empty() {
                    return Extracted::Dropped(DropReason::NoPerformer);
                }
                Extracted::Occurrence(Box::new(TrackOccurrence {
                    release_id,
                    position: track.position,
                    raw_title: track.title,
                    normalized_title,
                    performer_ids: performers.iter().copied().collect(),
                    featuring_ids: track.featuring_ids.iter().copied().collect(),
                    writer_ids_expanded: graph.expand_writer_set(writers.iter().copied()),
                    genres: genres.clone(),
                    styles: styles.clone(),
                    year,
                    country: country.clone(),
                }))
            })
            .collect::<Vec<_>>()
    })
}

/// Drains an extraction stream into occurrences plus counters.
pub fn collect_occurrences(
    stream: impl Iterator<Item = Extracted>,
) -> (Vec<TrackOccurrence>, ExtractCounters) {
    let mut occurrences = Vec::new();
    let mut counters = ExtractCounters::default();
    for item in stream {
        counters.tracks_seen += 1;
        match item {
            Extracted::Occurrence(occ) => {
                counters.emitted += 1;
                occurrences.push(*occ);
            }
            Extracted::Dropped(DropReason::EmptyTitle) => counters.empty_title += 1,
            Extracted::Dropped(DropReason::NoWriter) => counters.no_writer += 1,
            Extracted::Dropped(DropReason::NoPerformer) => counters.no_performer += 1,
        }
    }
    (occurrences, counters)
}

/// Clique construction counters; `member_occurrences +
/// dropped_singleton_occurrences` equals the input occurrence count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueStats {
    pub input_occurrences: u64,
    pub cliques: u64,
    pub versions: u64,
    pub member_occurrences: u64,
    pub dropped_singleton_components: u64,
    pub dropped_singleton_occurrences: u64,
}

impl CliqueStats {
    pub fn reconciles(&self) -> bool {
        self.input_occurrences == self.member_occurrences + self.dropped_singleton_occurrences
    }
}

/// Union-find with union by size and path halving.
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(len: usize) -> Self {
        Dsu {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

fn short_hash(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            hasher.update([0x1f]);
        }
        hasher.update(part.as_bytes());
    }
    hex::encode(hasher.finalize())[..16].to_string()
}

fn artist_key_token(key: &[ArtistId]) -> String {
    key.iter()
        .map(|id| id.0.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Partitions occurrences into cliques. Deterministic for any input order.
pub fn build_cliques(
    occurrences: Vec<TrackOccurrence>,
    graph: &ArtistGraph,
    merge_overlapping: bool,
) -> (Vec<Clique>, CliqueStats) {
    let input_occurrences = occurrences.len() as u64;

    let mut title_groups: BTreeMap<String, Vec<TrackOccurrence>> = BTreeMap::new();
    for occ in occurrences {
        title_groups
            .entry(occ.normalized_title.as_str().to_string())
            .or_default()
            .push(occ);
    }

    let groups: Vec<(String, Vec<TrackOccurrence>)> = title_groups.into_iter().collect();
    let per_group: Vec<(Vec<Clique>, u64, u64)> = groups
        .into_par_iter()
        .map(|(title, group)| build_title_group(title, group, graph, merge_overlapping))
        .collect();

    let mut cliques = Vec::new();
    let mut stats = CliqueStats {
        input_occurrences,
        ..CliqueStats::default()
    };
    for (group_cliques, singleton_components, singleton_occurrences) in per_group {
        stats.dropped_singleton_components += singleton_components;
        stats.dropped_singleton_occurrences += singleton_occurrences;
        cliques.extend(group_cliques);
    }
    cliques.sort_by(|a, b| a.clique_id.cmp(&b.clique_id));
    stats.cliques = cliques.len() as u64;
    stats.versions = cliques.iter().map(|c| c.versions.len() as u64).sum();
    stats.member_occurrences = cliques.iter().map(|c| c.occurrence_count() as u64).sum();
    (cliques, stats)
}

/// Connected components of one title group under the shared-writer relation.
fn build_title_group(
    title: String,
    group: Vec<TrackOccurrence>,
    graph: &ArtistGraph,
    merge_overlapping: bool,
) -> (Vec<Clique>, u64, u64) {
    let mut dsu = Dsu::new(group.len());
    // Index writers to their first occurrence instead of comparing pairs:
    // set intersection becomes "both touched the same writer id".
    let mut first_seen: HashMap<ArtistId, usize> = HashMap::new();
    for (idx, occ) in group.iter().enumerate() {
        for &writer in &occ.writer_ids_expanded {
            match first_seen.entry(writer) {
                std::collections::hash_map::Entry::Occupied(e) => dsu.union(idx, *e.get()),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(idx);
                }
            }
        }
    }

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 0..group.len() {
        components.entry(dsu.find(idx)).or_default().push(idx);
    }

    let mut member_lists: Vec<Vec<TrackOccurrence>> = Vec::with_capacity(components.len());
    let mut slots: Vec<Option<TrackOccurrence>> = group.into_iter().map(Some).collect();
    for indices in components.into_values() {
        let members: Vec<TrackOccurrence> = indices
            .into_iter()
            .map(|i| slots[i].take().expect("occurrence consumed twice"))
            .collect();
        member_lists.push(members);
    }

    let normalized_title = NormalizedTitle::from_canonical(title);
    let mut cliques = Vec::new();
    let mut singleton_components = 0u64;
    let mut singleton_occurrences = 0u64;
    for members in member_lists {
        let occurrence_count = members.len() as u64;
        let min_locator = members
            .iter()
            .map(|o| o.locator())
            .min()
            .expect("component is non-empty");
        let clique_id = short_hash(&[
            "clique",
            normalized_title.as_str(),
            &format!("{}:{}", min_locator.0, min_locator.1),
        ]);
        let versions = group_versions(&clique_id, members, merge_overlapping, graph);
        if versions.len() >= 2 {
            cliques.push(Clique {
                clique_id,
                normalized_title: normalized_title.clone(),
                versions,
            });
        } else {
            singleton_components += 1;
            singleton_occurrences += occurrence_count;
        }
    }
    (cliques, singleton_components, singleton_occurrences)
}

/// Groups clique members into versions by their artist key.
///
/// With `merge_overlapping`, artist keys whose member-expanded id sets
/// intersect are unioned into one version (connected components over key
/// overlap), which collapses credit variants like a solo artist vs. the
/// group that contains them.
pub fn group_versions(
    clique_id: &str,
    members: Vec<TrackOccurrence>,
    merge_overlapping: bool,
    graph: &ArtistGraph,
) -> Vec<Version> {
    let mut by_key: BTreeMap<Vec<ArtistId>, Vec<TrackOccurrence>> = BTreeMap::new();
    for occ in members {
        by_key.entry(occ.artist_key()).or_default().push(occ);
    }

    let grouped: Vec<(Vec<ArtistId>, Vec<TrackOccurrence>)> = if merge_overlapping {
        merge_overlapping_keys(by_key, graph)
    } else {
        by_key.into_iter().collect()
    };

    let mut versions: Vec<Version> = grouped
        .into_iter()
        .map(|(artist_key, mut occurrences)| {
            occurrences.sort_by(|a, b| a.locator().cmp(&b.locator()));
            let version_id =
                short_hash(&["version", clique_id, &artist_key_token(&artist_key)]);
            Version {
                version_id,
                artist_key,
                occurrences,
                urls: Vec::new(),
            }
        })
        .collect();
    versions.sort_by(|a, b| a.artist_key.cmp(&b.artist_key));
    versions
}

fn merge_overlapping_keys(
    by_key: BTreeMap<Vec<ArtistId>, Vec<TrackOccurrence>>,
    graph: &ArtistGraph,
) -> Vec<(Vec<ArtistId>, Vec<TrackOccurrence>)> {
    let entries: Vec<(Vec<ArtistId>, Vec<TrackOccurrence>)> = by_key.into_iter().collect();
    let mut dsu = Dsu::new(entries.len());
    let mut first_seen: HashMap<ArtistId, usize> = HashMap::new();
    for (idx, (key, _)) in entries.iter().enumerate() {
        for id in graph.expand_writer_set(key.iter().copied()) {
            match first_seen.entry(id) {
                std::collections::hash_map::Entry::Occupied(e) => dsu.union(idx, *e.get()),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(idx);
                }
            }
        }
    }

    let mut merged: BTreeMap<usize, (BTreeSet<ArtistId>, Vec<TrackOccurrence>)> = BTreeMap::new();
    for (idx, (key, occs)) in entries.into_iter().enumerate() {
        let root = dsu.find(idx);
        let slot = merged.entry(root).or_default();
        slot.0.extend(key);
        slot.1.extend(occs);
    }
    merged
        .into_values()
        .map(|(key, occs)| (key.into_iter().collect(), occs))
        .collect()
}
