//! Shared oracle implementations for the integration suites.
//!
//! Everything here recomputes results through a different route than the
//! library: exhaustive pairwise closures instead of indexed union-find,
//! counting-based ranks instead of sort-based scans. Oracles are the ground
//! truth the pipeline is compared against.

use std::collections::{BTreeMap, BTreeSet};

use vforge_core::clique::Clique;
use vforge_core::ingest::{ArtistRecord, ReleaseRecord};
use vforge_core::metrics::EvalInstance;
use vforge_core::normalize::Normalizer;

/// A partition shape: cliques are sets of versions, versions are sets of
/// occurrence locators `(release_id, position)`.
pub type PartitionShape = BTreeSet<BTreeSet<BTreeSet<(u64, String)>>>;

pub fn pipeline_shape(cliques: &[Clique]) -> PartitionShape {
    cliques
        .iter()
        .map(|clique| {
            clique
                .versions
                .iter()
                .map(|version| {
                    version
                        .occurrences
                        .iter()
                        .map(|o| (o.release_id.0, o.position.clone()))
                        .collect()
                })
                .collect()
        })
        .collect()
}

struct OracleOccurrence {
    locator: (u64, String),
    title: String,
    artist_key: BTreeSet<u64>,
    writers: BTreeSet<u64>,
}

/// Fixpoint-sweep writer expansion, independent of the graph module's BFS.
fn oracle_expand(
    seed: &BTreeSet<u64>,
    alias: &BTreeMap<u64, BTreeSet<u64>>,
    members: &BTreeMap<u64, BTreeSet<u64>>,
) -> BTreeSet<u64> {
    let alias_close = |start: &BTreeSet<u64>| {
        let mut closed = start.clone();
        loop {
            let mut grew = false;
            for id in closed.clone() {
                if let Some(neighbors) = alias.get(&id) {
                    for &n in neighbors {
                        grew |= closed.insert(n);
                    }
                }
            }
            if !grew {
                return closed;
            }
        }
    };
    let closed = alias_close(seed);
    let mut member_seed = BTreeSet::new();
    for id in &closed {
        if let Some(m) = members.get(id) {
            member_seed.extend(m.iter().copied());
        }
    }
    let mut result = closed;
    result.extend(alias_close(&member_seed));
    result
}

/// Ground-truth partition by exhaustive pairwise title + writer-intersection
/// closure over the full dump.
pub fn oracle_partition(
    artists: &[ArtistRecord],
    releases: &[ReleaseRecord],
    normalizer: &Normalizer,
) -> PartitionShape {
    let mut alias: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut members: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for artist in artists {
        for a in &artist.alias_ids {
            alias.entry(artist.id.0).or_default().insert(a.0);
            alias.entry(a.0).or_default().insert(artist.id.0);
        }
        for m in &artist.member_ids {
            members.entry(artist.id.0).or_default().insert(m.0);
        }
        for g in &artist.group_ids {
            members.entry(g.0).or_default().insert(artist.id.0);
        }
    }

    let mut occurrences: Vec<OracleOccurrence> = Vec::new();
    for release in releases {
        for track in &release.tracks {
            let title = normalizer.full(&track.title).into_string();
            if title.is_empty() {
                continue;
            }
            let writer_seed: BTreeSet<u64> = if track.writer_ids.is_empty() {
                release.writer_ids.iter().map(|w| w.0).collect()
            } else {
                track.writer_ids.iter().map(|w| w.0).collect()
            };
            if writer_seed.is_empty() {
                continue;
            }
            let performers: BTreeSet<u64> = if track.artist_ids.is_empty() {
                release.artists.iter().map(|c| c.id.0).collect()
            } else {
                track.artist_ids.iter().map(|a| a.0).collect()
            };
            if performers.is_empty() {
                continue;
            }
            let mut artist_key = performers;
            artist_key.extend(track.featuring_ids.iter().map(|f| f.0));
            occurrences.push(OracleOccurrence {
                locator: (release.id.0, track.position.clone()),
                title,
                artist_key,
                writers: oracle_expand(&writer_seed, &alias, &members),
            });
        }
    }

    // Label propagation until fixpoint over the pairwise relation.
    let n = occurrences.len();
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in (i + 1)..n {
                if occurrences[i].title == occurrences[j].title
                    && !occurrences[i].writers.is_disjoint(&occurrences[j].writers)
                {
                    let (a, b) = (label[i], label[j]);
                    if a != b {
                        let low = a.min(b);
                        for l in label.iter_mut() {
                            if *l == a || *l == b {
                                *l = low;
                            }
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut components: BTreeMap<usize, Vec<&OracleOccurrence>> = BTreeMap::new();
    for (i, occ) in occurrences.iter().enumerate() {
        components.entry(label[i]).or_default().push(occ);
    }

    let mut shape = PartitionShape::new();
    for component in components.into_values() {
        let mut versions: BTreeMap<&BTreeSet<u64>, BTreeSet<(u64, String)>> = BTreeMap::new();
        for occ in component {
            versions
                .entry(&occ.artist_key)
                .or_default()
                .insert(occ.locator.clone());
        }
        if versions.len() >= 2 {
            shape.insert(versions.into_values().collect());
        }
    }
    shape
}

/// Counting-based MAP and MR1: candidate rank is computed by counting
/// strictly-better candidates, precisions are ordered by rank before
/// summation (the same addition sequence the scan produces, arrived at
/// independently).
pub fn oracle_metrics(instance: &EvalInstance) -> (f64, f64) {
    let mask: BTreeSet<(usize, usize)> = instance.self_mask.iter().copied().collect();
    let mut average_precisions = Vec::new();
    let mut first_ranks = Vec::new();
    for (row, scores) in instance.similarity.iter().enumerate() {
        let query = &instance.query_labels[row];
        if instance.noise_label.as_deref() == Some(query.as_str()) {
            continue;
        }
        let unmasked: Vec<usize> = (0..scores.len())
            .filter(|&j| !mask.contains(&(row, j)))
            .collect();
        let rank_of = |j: usize| -> usize {
            1 + unmasked
                .iter()
                .filter(|&&k| {
                    scores[k] > scores[j] || (scores[k] == scores[j] && k < j)
                })
                .count()
        };
        let mut relevant: Vec<usize> = unmasked
            .iter()
            .copied()
            .filter(|&j| instance.candidate_labels[j] == *query)
            .map(rank_of)
            .collect();
        relevant.sort_unstable();
        assert!(!relevant.is_empty(), "oracle: unanswerable query row {row}");
        let mut precision_sum = 0.0;
        for (i, rank) in relevant.iter().enumerate() {
            precision_sum += (i + 1) as f64 / *rank as f64;
        }
        average_precisions.push(precision_sum / relevant.len() as f64);
        first_ranks.push(relevant[0] as f64);
    }
    let n = average_precisions.len() as f64;
    (
        average_precisions.iter().sum::<f64>() / n,
        first_ranks.iter().sum::<f64>() / n,
    )
}

/// Pairwise brute-force union-find over the intersect relation, for direct
/// occurrence fixtures (titles + pre-expanded writer sets).
pub struct NaiveDsu {
    parent: Vec<usize>,
}

impl NaiveDsu {
    pub fn new(n: usize) -> Self {
        NaiveDsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] == x {
            x
        } else {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
            root
        }
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}
