//! Streaming parser for the XML dump subset schema.
//!
//! The schema mirrors the public Discogs dump element names, frozen to the
//! fields the pipeline consumes:
//!
//! ```text
//! <artists>
//!   <artist>
//!     <id>1</id>
//!     <name>…</name>
//!     <namevariations><name>…</name>…</namevariations>
//!     <aliases><name id="2">…</name>…</aliases>
//!     <members><name id="3">…</name>…</members>      (bare <id>3</id> also accepted)
//!     <groups><name id="4">…</name>…</groups>
//!   </artist>…
//! </artists>
//!
//! <releases>
//!   <release id="1">
//!     <title>…</title>
//!     <artists><artist><id>1</id><name>…</name></artist>…</artists>
//!     <extraartists><artist role="Written-By"><id>2</id><name>…</name></artist>…</extraartists>
//!     <genres><genre>…</genre>…</genres>
//!     <styles><style>…</style>…</styles>
//!     <released>1999-01-01</released>                (year = leading four digits)
//!     <country>…</country>
//!     <labels><label name="…"/>…</labels>
//!     <formats><format name="…"/>…</formats>
//!     <master_id>9</master_id>
//!     <tracklist>
//!       <track>
//!         <position>A1</position>
//!         <title>…</title>
//!         <artists>…</artists>
//!         <extraartists>…role Written-By | Featuring…</extraartists>
//!       </track>…
//!     </tracklist>
//!   </release>…
//! </releases>
//! ```
//!
//! The `role` may be given as an attribute or as a `<role>` child element;
//! matching is exact on the trimmed string ("Written-By", "Featuring").
//! Unknown elements are skipped, so a full-fidelity dump parses with the
//! extra fields ignored. Only one record is materialized at a time.

use std::io::BufRead;

use quick_xml::events::{BytesRef, BytesStart, Event};
use quick_xml::Reader;

use super::records::{RawArtistParts, RawCreditParts, RawId, RawReleaseParts, RawTrackParts};
use super::IngestError;

/// Owned, pre-digested view of the XML event stream. Only the attributes the
/// subset schema uses are retained.
#[derive(Debug)]
enum Ev {
    Start { name: String, attrs: Attrs },
    Empty { name: String, attrs: Attrs },
    End,
    Text(String),
    Eof,
    Nothing,
}

#[derive(Debug, Default)]
struct Attrs {
    id: Option<String>,
    role: Option<String>,
    name: Option<String>,
}

fn read_attrs(e: &BytesStart<'_>) -> Attrs {
    let mut attrs = Attrs::default();
    for a in e.attributes().flatten() {
        let value = || String::from_utf8_lossy(&a.value).into_owned();
        match a.key.as_ref() {
            b"id" => attrs.id = Some(value()),
            b"role" => attrs.role = Some(value()),
            b"name" => attrs.name = Some(value()),
            _ => {}
        }
    }
    attrs
}

fn general_ref_text(r: &BytesRef<'_>) -> String {
    if let Ok(Some(c)) = r.resolve_char_ref() {
        return c.to_string();
    }
    match r.as_ref() {
        b"amp" => "&".to_string(),
        b"lt" => "<".to_string(),
        b"gt" => ">".to_string(),
        b"apos" => "'".to_string(),
        b"quot" => "\"".to_string(),
        // Unknown entity: keep it visible rather than corrupting silently.
        other => format!("&{};", String::from_utf8_lossy(other)),
    }
}

pub(crate) struct XmlScanner<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
}

/// One fully assembled top-level entry, or end of document.
pub(crate) enum XmlEntry<T> {
    Entry(T),
    End,
}

impl<R: BufRead> XmlScanner<R> {
    pub(crate) fn new(input: R, expected_root: &'static str) -> Result<Self, IngestError> {
        let mut scanner = XmlScanner {
            reader: Reader::from_reader(input),
            buf: Vec::with_capacity(4096),
        };
        scanner.seek_root(expected_root)?;
        Ok(scanner)
    }

    fn fatal(&self, message: impl Into<String>) -> IngestError {
        IngestError::Xml {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    fn next_event(&mut self) -> Result<Ev, IngestError> {
        self.buf.clear();
        let event = match self.reader.read_event_into(&mut self.buf) {
            Ok(event) => event,
            Err(e) => {
                return Err(IngestError::Xml {
                    offset: self.reader.error_position(),
                    message: e.to_string(),
                })
            }
        };
        let offset = self.reader.buffer_position();
        Ok(match event {
            Event::Start(e) => Ev::Start {
                name: String::from_utf8_lossy(e.name().as_ref()).into_owned(),
                attrs: read_attrs(&e),
            },
            Event::Empty(e) => Ev::Empty {
                name: String::from_utf8_lossy(e.name().as_ref()).into_owned(),
                attrs: read_attrs(&e),
            },
            Event::End(_) => Ev::End,
            Event::Text(t) => {
                let text = t.decode().map_err(|e| IngestError::Xml {
                    offset,
                    message: e.to_string(),
                })?;
                Ev::Text(text.into_owned())
            }
            Event::CData(c) => Ev::Text(String::from_utf8_lossy(c.as_ref()).into_owned()),
            Event::GeneralRef(r) => Ev::Text(general_ref_text(&r)),
            Event::Eof => Ev::Eof,
            Event::Decl(_) | Event::Comment(_) | Event::DocType(_) | Event::PI(_) => Ev::Nothing,
        })
    }

    /// Consumes the prolog and the opening root element. A document with no
    /// root at all parses as an empty dump.
    fn seek_root(&mut self, expected_root: &'static str) -> Result<(), IngestError> {
        loop {
            match self.next_event()? {
                Ev::Nothing => {}
                Ev::Text(text) => {
                    if !text.trim().is_empty() {
                        return Err(self.fatal("unexpected text before root element"));
                    }
                }
                Ev::Start { name, .. } => {
                    if name == expected_root {
                        return Ok(());
                    }
                    return Err(self.fatal(format!(
                        "unexpected root element <{name}> (expected <{expected_root}>)"
                    )));
                }
                Ev::Eof => return Ok(()),
                Ev::Empty { name, .. } => {
                    if name == expected_root {
                        // Self-closing root: empty dump.
                        return Ok(());
                    }
                    return Err(self.fatal(format!(
                        "unexpected root element <{name}/> (expected <{expected_root}>)"
                    )));
                }
                Ev::End => return Err(self.fatal("unexpected end tag before root element")),
            }
        }
    }

    /// Skips the element whose start tag was just consumed.
    fn skip_element(&mut self) -> Result<(), IngestError> {
        let mut depth = 1usize;
        loop {
            match self.next_event()? {
                Ev::Start { .. } => depth += 1,
                Ev::End => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Ev::Eof => return Err(self.fatal("document truncated inside element")),
                _ => {}
            }
        }
    }

    pub(crate) fn next_artist(&mut self) -> Result<XmlEntry<RawArtistParts>, IngestError> {
        loop {
            match self.next_event()? {
                Ev::Start { name, .. } => {
                    if name == "artist" {
                        return self.assemble_artist().map(XmlEntry::Entry);
                    }
                    self.skip_element()?;
                }
                Ev::End | Ev::Eof => return Ok(XmlEntry::End),
                _ => {}
            }
        }
    }

    pub(crate) fn next_release(&mut self) -> Result<XmlEntry<RawReleaseParts>, IngestError> {
        loop {
            match self.next_event()? {
                Ev::Start { name, attrs } => {
                    if name == "release" {
                        let mut parts = self.assemble_release()?;
                        parts.id = attrs.id.map(RawId::Text).or(parts.id);
                        return Ok(XmlEntry::Entry(parts));
                    }
                    self.skip_element()?;
                }
                Ev::End | Ev::Eof => return Ok(XmlEntry::End),
                _ => {}
            }
        }
    }

    fn assemble_artist(&mut self) -> Result<RawArtistParts, IngestError> {
        let mut parts = RawArtistParts::default();
        let mut path: Vec<String> = Vec::new();
        let mut text = String::new();

        fn collect_id_ref(parts: &mut RawArtistParts, container: Option<&str>, attrs: &Attrs) {
            let Some(id) = attrs.id.as_deref().and_then(|v| v.trim().parse::<u64>().ok()) else {
                return;
            };
            match container {
                Some("aliases") => parts.alias_ids.push(id),
                Some("members") => parts.member_ids.push(id),
                Some("groups") => parts.group_ids.push(id),
                _ => {}
            }
        }

        loop {
            match self.next_event()? {
                Ev::Start { name, attrs } => {
                    if name == "name" {
                        collect_id_ref(&mut parts, path.first().map(String::as_str), &attrs);
                    }
                    path.push(name);
                    text.clear();
                }
                Ev::Empty { name, attrs } => {
                    if name == "name" {
                        collect_id_ref(&mut parts, path.first().map(String::as_str), &attrs);
                    }
                }
                Ev::Text(t) => text.push_str(&t),
                Ev::End if path.is_empty() => return Ok(parts),
                Ev::End => {
                    let segs: Vec<&str> = path.iter().map(String::as_str).collect();
                    let value = text.trim();
                    match segs.as_slice() {
                        ["id"] => parts.id = Some(RawId::from(value)),
                        ["name"] => parts.name = Some(value.to_string()),
                        ["namevariations", "name"] => parts.name_variations.push(value.to_string()),
                        ["members", "id"] => {
                            if let Ok(v) = value.parse::<u64>() {
                                parts.member_ids.push(v);
                            }
                        }
                        _ => {}
                    }
                    path.pop();
                    text.clear();
                }
                Ev::Eof => return Err(self.fatal("document truncated inside <artist>")),
                Ev::Nothing => {}
            }
        }
    }

    fn assemble_release(&mut self) -> Result<RawReleaseParts, IngestError> {
        let mut parts = RawReleaseParts::default();
        let mut path: Vec<String> = Vec::new();
        let mut text = String::new();
        let mut credit = RawCreditParts::default();
        let mut role: Option<String> = None;
        let mut track = RawTrackParts::default();

        loop {
            match self.next_event()? {
                Ev::Start { name, attrs } => {
                    // Accumulators reset only in their schema positions, so
                    // unknown nested structures (as in full-fidelity dumps)
                    // cannot clobber an in-progress credit or track.
                    let segs: Vec<&str> = path.iter().map(String::as_str).collect();
                    match (segs.as_slice(), name.as_str()) {
                        (["artists"], "artist")
                        | (["extraartists"], "artist")
                        | (["tracklist", "track", "artists"], "artist")
                        | (["tracklist", "track", "extraartists"], "artist") => {
                            credit = RawCreditParts::default();
                            role = attrs.role.clone();
                        }
                        (["tracklist"], "track") => track = RawTrackParts::default(),
                        (_, "label") | (_, "format") => {
                            collect_named(&mut parts, segs.last().copied(), &name, &attrs)
                        }
                        _ => {}
                    }
                    path.push(name);
                    text.clear();
                }
                Ev::Empty { name, attrs } => {
                    let segs: Vec<&str> = path.iter().map(String::as_str).collect();
                    collect_named(&mut parts, segs.last().copied(), &name, &attrs);
                }
                Ev::Text(t) => text.push_str(&t),
                Ev::End if path.is_empty() => return Ok(parts),
                Ev::End => {
                    let segs: Vec<&str> = path.iter().map(String::as_str).collect();
                    let value = text.trim();
                    match segs.as_slice() {
                        ["title"] => parts.title = Some(value.to_string()),
                        ["released"] => parts.year = leading_year(value),
                        ["country"] => parts.country = Some(value.to_string()),
                        ["master_id"] => parts.master_id = value.parse::<u64>().ok(),
                        ["genres", "genre"] => parts.genres.push(value.to_string()),
                        ["styles", "style"] => parts.styles.push(value.to_string()),
                        ["artists", "artist", "id"]
                        | ["extraartists", "artist", "id"]
                        | ["tracklist", "track", "artists", "artist", "id"]
                        | ["tracklist", "track", "extraartists", "artist", "id"] => {
                            credit.id = value.parse::<u64>().ok();
                        }
                        ["artists", "artist", "name"]
                        | ["extraartists", "artist", "name"]
                        | ["tracklist", "track", "artists", "artist", "name"]
                        | ["tracklist", "track", "extraartists", "artist", "name"] => {
                            credit.name = Some(value.to_string());
                        }
                        ["extraartists", "artist", "role"]
                        | ["tracklist", "track", "extraartists", "artist", "role"] => {
                            role = Some(value.to_string());
                        }
                        ["artists", "artist"] => parts.artists.push(credit.clone()),
                        ["extraartists", "artist"] => {
                            if let Some(id) = credit.id {
                                if is_written_by(role.as_deref()) {
                                    parts.writer_ids.push(id);
                                }
                            }
                            role = None;
                        }
                        ["tracklist", "track", "position"] => {
                            track.position = Some(value.to_string());
                        }
                        ["tracklist", "track", "title"] => {
                            track.title = Some(value.to_string());
                        }
                        ["tracklist", "track", "artists", "artist"] => {
                            if let Some(id) = credit.id {
                                track.artist_ids.push(id);
                            }
                        }
                        ["tracklist", "track", "extraartists", "artist"] => {
                            if let Some(id) = credit.id {
                                if is_written_by(role.as_deref()) {
                                    track.writer_ids.push(id);
                                } else if is_featuring(role.as_deref()) {
                                    track.featuring_ids.push(id);
                                }
                            }
                            role = None;
                        }
                        ["tracklist", "track"] => {
                            parts.tracks.push(std::mem::take(&mut track));
                        }
                        _ => {}
                    }
                    path.pop();
                    text.clear();
                }
                Ev::Eof => return Err(self.fatal("document truncated inside <release>")),
                Ev::Nothing => {}
            }
        }
    }
}

/// `<label name="…"/>` and `<format name="…"/>` carry their payload as an
/// attribute.
fn collect_named(parts: &mut RawReleaseParts, under: Option<&str>, name: &str, attrs: &Attrs) {
    if let Some(value) = attrs.name.clone() {
        match (under, name) {
            (Some("labels"), "label") => parts.label_names.push(value),
            (Some("formats"), "format") => parts.formats.push(value),
            _ => {}
        }
    }
}

/// Role matching is exact on the trimmed string.
fn is_written_by(role: Option<&str>) -> bool {
    role.map(str::trim) == Some("Written-By")
}

fn is_featuring(role: Option<&str>) -> bool {
    role.map(str::trim) == Some("Featuring")
}

/// Parses the leading four digits of a release date ("1999" or "1999-01-01").
fn leading_year(value: &str) -> Option<i32> {
    let digits: String = value.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.len() >= 4 {
        digits[..4].parse::<i32>().ok()
    } else {
        None
    }
}
