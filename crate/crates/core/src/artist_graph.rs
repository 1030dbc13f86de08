//! Artist identity graph: alias edges, group membership edges, and the
//! expanded identity sets used for writer matching and version grouping.
//!
//! Construction is a single-writer phase ([`ArtistGraphBuilder`]); the built
//! graph is immutable and safe to share across threads. All adjacency is
//! stored in ordered maps so the graph is identical regardless of record
//! insertion order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ids::ArtistId;
use crate::ingest::ArtistRecord;
use crate::normalize::Normalizer;

/// Frozen artist identity graph.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ArtistGraph {
    nodes: BTreeMap<ArtistId, ArtistRecord>,
    /// Symmetric alias adjacency.
    alias_adj: BTreeMap<ArtistId, BTreeSet<ArtistId>>,
    /// Directed membership: group id -> member ids.
    members: BTreeMap<ArtistId, BTreeSet<ArtistId>>,
    /// Edge endpoints that never resolved to a node.
    dangling: BTreeSet<ArtistId>,
}

/// Accumulates artist records, then freezes them into an [`ArtistGraph`].
#[derive(Debug, Default)]
pub struct ArtistGraphBuilder {
    nodes: BTreeMap<ArtistId, ArtistRecord>,
}

impl ArtistGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_record(&mut self, record: ArtistRecord) {
        self.nodes.insert(record.id, record);
    }

    pub fn build(self) -> ArtistGraph {
        let mut alias_adj: BTreeMap<ArtistId, BTreeSet<ArtistId>> = BTreeMap::new();
        let mut members: BTreeMap<ArtistId, BTreeSet<ArtistId>> = BTreeMap::new();
        let mut endpoints: BTreeSet<ArtistId> = BTreeSet::new();

        for record in self.nodes.values() {
            for &alias in &record.alias_ids {
                if alias == record.id {
                    continue;
                }
                alias_adj.entry(record.id).or_default().insert(alias);
                alias_adj.entry(alias).or_default().insert(record.id);
                endpoints.insert(alias);
            }
            for &member in &record.member_ids {
                if member == record.id {
                    continue;
                }
                members.entry(record.id).or_default().insert(member);
                endpoints.insert(member);
            }
            for &group in &record.group_ids {
                if group == record.id {
                    continue;
                }
                members.entry(group).or_default().insert(record.id);
                endpoints.insert(group);
            }
        }

        let dangling = endpoints
            .into_iter()
            .filter(|id| !self.nodes.contains_key(id))
            .collect();

        ArtistGraph {
            nodes: self.nodes,
            alias_adj,
            members,
            dangling,
        }
    }
}

impl ArtistGraph {
    pub fn from_records(records: impl IntoIterator<Item = ArtistRecord>) -> Self {
        let mut builder = ArtistGraphBuilder::new();
        for record in records {
            builder.add_record(record);
        }
        builder.build()
    }

    pub fn node(&self, id: ArtistId) -> Option<&ArtistRecord> {
        self.nodes.get(&id)
    }

    pub fn contains(&self, id: ArtistId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Edge endpoints that referenced artists absent from the dump.
    pub fn dangling_refs(&self) -> &BTreeSet<ArtistId> {
        &self.dangling
    }

    pub fn members_of(&self, group: ArtistId) -> Option<&BTreeSet<ArtistId>> {
        self.members.get(&group)
    }

    /// Transitive closure of `seed` over alias edges.
    fn alias_closure(&self, seed: impl IntoIterator<Item = ArtistId>) -> BTreeSet<ArtistId> {
        let mut closed: BTreeSet<ArtistId> = seed.into_iter().collect();
        let mut queue: VecDeque<ArtistId> = closed.iter().copied().collect();
        while let Some(id) = queue.pop_front() {
            if let Some(neighbors) = self.alias_adj.get(&id) {
                for &next in neighbors {
                    if closed.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        closed
    }

    /// Expands a writer id set: transitive alias closure of the input, plus
    /// the members of every group encountered (one hop), plus the alias
    /// closure of those members. Unknown ids pass through unchanged.
    ///
    /// Membership expansion is deliberately one hop: a group credit must
    /// match its members' writer credits, but members' own groups are not
    /// re-expanded.
    pub fn expand_writer_set(
        &self,
        ids: impl IntoIterator<Item = ArtistId>,
    ) -> BTreeSet<ArtistId> {
        let closed = self.alias_closure(ids);
        let mut member_seed: BTreeSet<ArtistId> = BTreeSet::new();
        for id in &closed {
            if let Some(members) = self.members.get(id) {
                member_seed.extend(members.iter().copied());
            }
        }
        let mut result = closed;
        result.extend(self.alias_closure(member_seed));
        result
    }

    /// Normalized (matching mode) name forms of an artist: its name, its
    /// name variations, and — one alias hop away — its aliases' names and
    /// variations. Unknown ids yield an empty set.
    pub fn name_forms(&self, id: ArtistId, normalizer: &Normalizer) -> BTreeSet<String> {
        let mut forms = BTreeSet::new();
        let Some(record) = self.nodes.get(&id) else {
            log::warn!("name_forms: unknown artist id {id}");
            return forms;
        };
        let mut add_names = |record: &ArtistRecord| {
            forms.insert(normalizer.matching(&record.name).into_string());
            for variation in &record.name_variations {
                forms.insert(normalizer.matching(variation).into_string());
            }
        };
        add_names(record);
        if let Some(aliases) = self.alias_adj.get(&id) {
            for alias in aliases {
                if let Some(alias_record) = self.nodes.get(alias) {
                    add_names(alias_record);
                }
            }
        }
        forms.retain(|f| !f.is_empty());
        forms
    }

    /// Writes a binary cache of the graph keyed by the source dump checksum.
    pub fn save_cache(&self, path: &Path, key: &str) -> std::io::Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        let entry = CacheEntry {
            key: key.to_string(),
            graph: self.clone(),
        };
        let bytes = bincode::serialize(&entry)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        out.write_all(&bytes)
    }

    /// Loads a cached graph if the stored key matches `key`.
    pub fn load_cache(path: &Path, key: &str) -> Option<ArtistGraph> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .ok()?
            .read_to_end(&mut bytes)
            .ok()?;
        let entry: CacheEntry = bincode::deserialize(&bytes).ok()?;
        (entry.key == key).then_some(entry.graph)
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    graph: ArtistGraph,
}
