//! Typed dump records and per-record validation.
//!
//! Validation is shared by the XML and JSONL parsers: both assemble the
//! permissive `Raw*Parts` shapes and funnel them through `validate`, so a
//! malformed record is rejected with the same reason code regardless of the
//! wire format.

use serde::{Deserialize, Serialize};

use crate::ids::{ArtistId, ReleaseId};

/// An artist node: identity lists reference other artist ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtistRecord {
    pub id: ArtistId,
    pub name: String,
    pub name_variations: Vec<String>,
    pub alias_ids: Vec<ArtistId>,
    /// Members of this artist when it is a group; empty otherwise.
    pub member_ids: Vec<ArtistId>,
    /// Groups this artist is a member of.
    pub group_ids: Vec<ArtistId>,
}

/// One artist credit on a release: id plus the name as credited.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtistCredit {
    pub id: ArtistId,
    pub name: String,
}

/// One track on a release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTrack {
    pub position: String,
    pub title: String,
    /// Track-level artist credits; empty means the release artists apply.
    pub artist_ids: Vec<ArtistId>,
    pub featuring_ids: Vec<ArtistId>,
    /// Track-level "Written-By" credits.
    pub writer_ids: Vec<ArtistId>,
}

/// A release with its tracklist and the metadata carried onto occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseRecord {
    pub id: ReleaseId,
    pub title: String,
    pub artists: Vec<ArtistCredit>,
    /// Release-level "Written-By" credits.
    pub writer_ids: Vec<ArtistId>,
    pub tracks: Vec<RawTrack>,
    pub genres: Vec<String>,
    pub styles: Vec<String>,
    pub year: Option<i32>,
    pub country: Option<String>,
    pub label_names: Vec<String>,
    pub formats: Vec<String>,
    pub master_id: Option<u64>,
}

/// Why a record (or a single track) was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    MissingId,
    InvalidId,
    DuplicateId,
    MissingName,
    MissingTitle,
    EmptyTracklist,
    DuplicatePosition,
    InvalidJson,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::MissingId => "missing-id",
            RejectReason::InvalidId => "invalid-id",
            RejectReason::DuplicateId => "duplicate-id",
            RejectReason::MissingName => "missing-name",
            RejectReason::MissingTitle => "missing-title",
            RejectReason::EmptyTracklist => "empty-tracklist",
            RejectReason::DuplicatePosition => "duplicate-position",
            RejectReason::InvalidJson => "invalid-json",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A skipped record with its reason code and a human-readable locator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRecord {
    pub reason: RejectReason,
    pub detail: String,
}

impl RejectedRecord {
    pub fn new(reason: RejectReason, detail: impl Into<String>) -> Self {
        RejectedRecord {
            reason,
            detail: detail.into(),
        }
    }
}

/// One item of a parse stream: a valid record or a counted reject.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed<T> {
    Record(T),
    Rejected(RejectedRecord),
}

fn dedupe_ids(ids: Vec<u64>, self_id: u64) -> Vec<ArtistId> {
    let mut seen = std::collections::HashSet::new();
    ids.into_iter()
        .filter(|&v| v != 0 && v != self_id && seen.insert(v))
        .map(ArtistId)
        .collect()
}

fn clean_strings(values: Vec<String>) -> Vec<String> {
    values
        .into_iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

/// Record id as found on the wire: JSONL carries numbers, XML carries text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub(crate) enum RawId {
    Num(u64),
    Text(String),
}

impl RawId {
    fn parse_positive(&self) -> Option<u64> {
        match self {
            RawId::Num(v) if *v > 0 => Some(*v),
            RawId::Num(_) => None,
            RawId::Text(t) => t.trim().parse::<u64>().ok().filter(|&v| v > 0),
        }
    }

    fn display(&self) -> String {
        match self {
            RawId::Num(v) => v.to_string(),
            RawId::Text(t) => t.clone(),
        }
    }
}

impl From<&str> for RawId {
    fn from(v: &str) -> Self {
        RawId::Text(v.to_string())
    }
}

/// Permissive artist shape assembled by the parsers.
#[derive(Debug, Default, Clone, Deserialize)]
pub(crate) struct RawArtistParts {
    pub id: Option<RawId>,
    pub name: Option<String>,
    #[serde(default)]
    pub name_variations: Vec<String>,
    #[serde(default)]
    pub alias_ids: Vec<u64>,
    #[serde(default)]
    pub member_ids: Vec<u64>,
    #[serde(default)]
    pub group_ids: Vec<u64>,
}

impl RawArtistParts {
    pub(crate) fn validate(self) -> Result<ArtistRecord, RejectedRecord> {
        let id = match &self.id {
            None => return Err(RejectedRecord::new(RejectReason::MissingId, "artist without id")),
            Some(raw) => match raw.parse_positive() {
                Some(v) => v,
                None => {
                    return Err(RejectedRecord::new(
                        RejectReason::InvalidId,
                        format!("artist id {:?} is not a positive integer", raw.display()),
                    ))
                }
            },
        };
        let name = self.name.as_deref().unwrap_or("").trim().to_string();
        if name.is_empty() {
            return Err(RejectedRecord::new(
                RejectReason::MissingName,
                format!("artist {id} has no name"),
            ));
        }
        Ok(ArtistRecord {
            id: ArtistId(id),
            name,
            name_variations: clean_strings(self.name_variations),
            alias_ids: dedupe_ids(self.alias_ids, id),
            member_ids: dedupe_ids(self.member_ids, id),
            group_ids: dedupe_ids(self.group_ids, id),
        })
    }
}

/// Permissive track shape assembled by the parsers.
#[derive(Debug, Default, Clone, Deserialize)]
pub(crate) struct RawTrackParts {
    #[serde(default)]
    pub position: Option<String>,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub artist_ids: Vec<u64>,
    #[serde(default)]
    pub featuring_ids: Vec<u64>,
    #[serde(default)]
    pub writer_ids: Vec<u64>,
}

/// Permissive release shape assembled by the parsers.
#[derive(Debug, Default, Clone, Deserialize)]
pub(crate) struct RawReleaseParts {
    pub id: Option<RawId>,
    pub title: Option<String>,
    #[serde(default)]
    pub artists: Vec<RawCreditParts>,
    #[serde(default)]
    pub writer_ids: Vec<u64>,
    #[serde(default)]
    pub tracks: Vec<RawTrackParts>,
    #[serde(default)]
    pub genres: Vec<String>,
    #[serde(default)]
    pub styles: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub country: Option<String>,
    #[serde(default)]
    pub label_names: Vec<String>,
    #[serde(default)]
    pub formats: Vec<String>,
    #[serde(default)]
    pub master_id: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
pub(crate) struct RawCreditParts {
    pub id: Option<u64>,
    #[serde(default)]
    pub name: Option<String>,
}

impl RawReleaseParts {
    /// Validates the release. Individual tracks with an empty title are
    /// dropped (reported in the second tuple slot) without failing the whole
    /// release; a release whose tracklist ends up empty is rejected.
    pub(crate) fn validate(self) -> Result<(ReleaseRecord, Vec<RejectedRecord>), RejectedRecord> {
        let id = match &self.id {
            None => {
                return Err(RejectedRecord::new(RejectReason::MissingId, "release without id"))
            }
            Some(raw) => match raw.parse_positive() {
                Some(v) => v,
                None => {
                    return Err(RejectedRecord::new(
                        RejectReason::InvalidId,
                        format!("release id {:?} is not a positive integer", raw.display()),
                    ))
                }
            },
        };

        let mut track_rejects = Vec::new();
        let mut tracks = Vec::new();
        for (ordinal, raw) in self.tracks.into_iter().enumerate() {
            let title = raw.title.as_deref().unwrap_or("").trim().to_string();
            // Positions may be absent in the wild; fall back to the 1-based
            // ordinal so uniqueness below stays meaningful.
            let position = match raw.position.as_deref().map(str::trim) {
                Some(p) if !p.is_empty() => p.to_string(),
                _ => (ordinal + 1).to_string(),
            };
            if title.is_empty() {
                track_rejects.push(RejectedRecord::new(
                    RejectReason::MissingTitle,
                    format!("release {id} track {position} has no title"),
                ));
                continue;
            }
            tracks.push(RawTrack {
                position,
                title,
                artist_ids: dedupe_ids(raw.artist_ids, 0),
                featuring_ids: dedupe_ids(raw.featuring_ids, 0),
                writer_ids: dedupe_ids(raw.writer_ids, 0),
            });
        }

        if tracks.is_empty() {
            return Err(RejectedRecord::new(
                RejectReason::EmptyTracklist,
                format!("release {id} has no usable tracks"),
            ));
        }
        let mut positions = std::collections::HashSet::new();
        for track in &tracks {
            if !positions.insert(track.position.as_str()) {
                return Err(RejectedRecord::new(
                    RejectReason::DuplicatePosition,
                    format!("release {id} repeats position {:?}", track.position),
                ));
            }
        }

        let record = ReleaseRecord {
            id: ReleaseId(id),
            title: self.title.as_deref().unwrap_or("").trim().to_string(),
            artists: self
                .artists
                .into_iter()
                .filter_map(|c| {
                    let cid = c.id.filter(|&v| v > 0)?;
                    Some(ArtistCredit {
                        id: ArtistId(cid),
                        name: c.name.as_deref().unwrap_or("").trim().to_string(),
                    })
                })
                .collect(),
            writer_ids: dedupe_ids(self.writer_ids, 0),
            tracks,
            genres: clean_strings(self.genres),
            styles: clean_strings(self.styles),
            year: self.year,
            country: self
                .country
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty()),
            label_names: clean_strings(self.label_names),
            formats: clean_strings(self.formats),
            master_id: self.master_id.filter(|&v| v > 0),
        };
        Ok((record, track_rejects))
    }
}
