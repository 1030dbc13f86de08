//! Stream-parse compressed artist and release dumps into typed records.
//!
//! Both entry points detect gzip by magic bytes, hold at most one record in
//! memory at a time, and never abort on a dirty record: per-record field
//! violations become [`Parsed::Rejected`] items with a reason code while the
//! stream continues. Only unreadable input or document-level structural
//! corruption is fatal.

mod jsonl;
mod records;
mod xml;

use std::io::{BufReader, Chain, Cursor, Read};

use flate2::read::GzDecoder;
use thiserror::Error;

pub use jsonl::write_jsonl;
pub use records::{
    ArtistCredit, ArtistRecord, Parsed, RawTrack, RejectReason, RejectedRecord, ReleaseRecord,
};

use jsonl::{JsonlItem, JsonlLines};
use records::{RawArtistParts, RawReleaseParts};
use xml::{XmlEntry, XmlScanner};

/// Fatal ingestion failure. Per-record problems are not errors; they surface
/// as [`Parsed::Rejected`] stream items instead.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("xml parse error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Wire format of a dump file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    XmlDump,
    Jsonl,
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

enum SniffedReader<R: Read> {
    Plain(Chain<Cursor<Vec<u8>>, R>),
    Gzip(Box<GzDecoder<Chain<Cursor<Vec<u8>>, R>>>),
}

impl<R: Read> Read for SniffedReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        match self {
            SniffedReader::Plain(inner) => inner.read(buf),
            SniffedReader::Gzip(inner) => inner.read(buf),
        }
    }
}

/// Peeks the first two bytes to decide whether the stream is gzip-compressed.
fn sniff_gzip<R: Read>(mut input: R) -> std::io::Result<SniffedReader<R>> {
    let mut prefix = [0u8; 2];
    let mut filled = 0usize;
    while filled < 2 {
        match input.read(&mut prefix[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    let head = Cursor::new(prefix[..filled].to_vec());
    let rest = head.chain(input);
    if prefix[..filled] == GZIP_MAGIC {
        Ok(SniffedReader::Gzip(Box::new(GzDecoder::new(rest))))
    } else {
        Ok(SniffedReader::Plain(rest))
    }
}

enum ArtistSource<R: Read> {
    Xml(XmlScanner<BufReader<SniffedReader<R>>>),
    Jsonl(JsonlLines<BufReader<SniffedReader<R>>>),
}

enum ReleaseSource<R: Read> {
    Xml(XmlScanner<BufReader<SniffedReader<R>>>),
    Jsonl(JsonlLines<BufReader<SniffedReader<R>>>),
}

/// Streaming iterator over artist records.
pub struct ArtistStream<R: Read> {
    source: ArtistSource<R>,
    seen_ids: std::collections::HashSet<u64>,
    done: bool,
}

/// Streaming iterator over release records. A release with dirty tracks may
/// yield several items: one reject per dropped track, then the record.
pub struct ReleaseStream<R: Read> {
    source: ReleaseSource<R>,
    seen_ids: std::collections::HashSet<u64>,
    pending: std::collections::VecDeque<Parsed<ReleaseRecord>>,
    done: bool,
}

/// Opens a streaming parse of an artists dump.
pub fn parse_artists<R: Read>(input: R, format: DumpFormat) -> Result<ArtistStream<R>, IngestError> {
    let reader = BufReader::new(sniff_gzip(input)?);
    let source = match format {
        DumpFormat::XmlDump => ArtistSource::Xml(XmlScanner::new(reader, "artists")?),
        DumpFormat::Jsonl => ArtistSource::Jsonl(JsonlLines::new(reader)),
    };
    Ok(ArtistStream {
        source,
        seen_ids: std::collections::HashSet::new(),
        done: false,
    })
}

/// Opens a streaming parse of a releases dump.
pub fn parse_releases<R: Read>(
    input: R,
    format: DumpFormat,
) -> Result<ReleaseStream<R>, IngestError> {
    let reader = BufReader::new(sniff_gzip(input)?);
    let source = match format {
        DumpFormat::XmlDump => ReleaseSource::Xml(XmlScanner::new(reader, "releases")?),
        DumpFormat::Jsonl => ReleaseSource::Jsonl(JsonlLines::new(reader)),
    };
    Ok(ReleaseStream {
        source,
        seen_ids: std::collections::HashSet::new(),
        pending: std::collections::VecDeque::new(),
        done: false,
    })
}

impl<R: Read> Iterator for ArtistStream<R> {
    type Item = Result<Parsed<ArtistRecord>, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let raw: RawArtistParts = match &mut self.source {
            ArtistSource::Xml(scanner) => match scanner.next_artist() {
                Ok(XmlEntry::Entry(parts)) => parts,
                Ok(XmlEntry::End) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            },
            ArtistSource::Jsonl(lines) => match lines.next_value::<RawArtistParts>() {
                Ok(JsonlItem::Value(parts)) => parts,
                Ok(JsonlItem::Rejected(reject)) => return Some(Ok(Parsed::Rejected(reject))),
                Ok(JsonlItem::Eof) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            },
        };
        match raw.validate() {
            Ok(record) => {
                if !self.seen_ids.insert(record.id.0) {
                    return Some(Ok(Parsed::Rejected(RejectedRecord::new(
                        RejectReason::DuplicateId,
                        format!("artist id {} repeated", record.id),
                    ))));
                }
                Some(Ok(Parsed::Record(record)))
            }
            Err(reject) => Some(Ok(Parsed::Rejected(reject))),
        }
    }
}

impl<R: Read> Iterator for ReleaseStream<R> {
    type Item = Result<Parsed<ReleaseRecord>, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(item) = self.pending.pop_front() {
            return Some(Ok(item));
        }
        if self.done {
            return None;
        }
        let raw: RawReleaseParts = match &mut self.source {
            ReleaseSource::Xml(scanner) => match scanner.next_release() {
                Ok(XmlEntry::Entry(parts)) => parts,
                Ok(XmlEntry::End) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            },
            ReleaseSource::Jsonl(lines) => match lines.next_value::<RawReleaseParts>() {
                Ok(JsonlItem::Value(parts)) => parts,
                Ok(JsonlItem::Rejected(reject)) => return Some(Ok(Parsed::Rejected(reject))),
                Ok(JsonlItem::Eof) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            },
        };
        match raw.validate() {
            Ok((record, track_rejects)) => {
                for reject in track_rejects {
                    self.pending.push_back(Parsed::Rejected(reject));
                }
                if !self.seen_ids.insert(record.id.0) {
                    self.pending.push_back(Parsed::Rejected(RejectedRecord::new(
                        RejectReason::DuplicateId,
                        format!("release id {} repeated", record.id),
                    )));
                } else {
                    self.pending.push_back(Parsed::Record(record));
                }
                self.next()
            }
            Err(reject) => Some(Ok(Parsed::Rejected(reject))),
        }
    }
}

/// Everything a finished parse produced: records in file order plus rejects.
#[derive(Debug, Default)]
pub struct ParseSummary<T> {
    pub records: Vec<T>,
    pub rejects: Vec<RejectedRecord>,
}

impl<T> ParseSummary<T> {
    pub fn reject_count(&self, reason: RejectReason) -> usize {
        self.rejects.iter().filter(|r| r.reason == reason).count()
    }
}

/// Drains a parse stream, splitting records from rejects. The first fatal
/// error aborts the collection.
pub fn collect_stream<T>(
    stream: impl Iterator<Item = Result<Parsed<T>, IngestError>>,
) -> Result<ParseSummary<T>, IngestError> {
    let mut summary = ParseSummary {
        records: Vec::new(),
        rejects: Vec::new(),
    };
    for item in stream {
        match item? {
            Parsed::Record(r) => summary.records.push(r),
            Parsed::Rejected(r) => summary.rejects.push(r),
        }
    }
    Ok(summary)
}
