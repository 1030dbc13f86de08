//! Numeric identifier newtypes shared across the pipeline.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Unique numeric id of an artist entry in a dump. Always positive.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ArtistId(pub u64);

impl fmt::Display for ArtistId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for ArtistId {
    fn from(v: u64) -> Self {
        ArtistId(v)
    }
}

/// Unique numeric id of a release entry in a dump. Always positive.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ReleaseId(pub u64);

impl fmt::Display for ReleaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for ReleaseId {
    fn from(v: u64) -> Self {
        ReleaseId(v)
    }
}
