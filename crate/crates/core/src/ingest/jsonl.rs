//! JSONL ingestion: one record object per line.
//!
//! This is the canonical interchange format between pipeline stages and the
//! desk-scale alternative to the XML dumps. Blank lines are ignored; a line
//! that is not valid JSON is a per-record reject, not a fatal error.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::records::{RejectReason, RejectedRecord};
use super::IngestError;

pub(crate) enum JsonlItem<T> {
    Value(T),
    Rejected(RejectedRecord),
    Eof,
}

pub(crate) struct JsonlLines<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: u64,
}

impl<R: BufRead> JsonlLines<R> {
    pub(crate) fn new(input: R) -> Self {
        JsonlLines {
            lines: input.lines(),
            line_no: 0,
        }
    }

    pub(crate) fn next_value<T: DeserializeOwned>(&mut self) -> Result<JsonlItem<T>, IngestError> {
        loop {
            let Some(line) = self.lines.next() else {
                return Ok(JsonlItem::Eof);
            };
            let line = line?;
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<T>(&line) {
                Ok(value) => return Ok(JsonlItem::Value(value)),
                Err(e) => {
                    return Ok(JsonlItem::Rejected(RejectedRecord::new(
                        RejectReason::InvalidJson,
                        format!("line {}: {e}", self.line_no),
                    )))
                }
            }
        }
    }
}

/// Writes one record per line in the canonical field order (struct order).
pub fn write_jsonl<T: Serialize, W: Write>(
    items: impl IntoIterator<Item = T>,
    mut out: W,
) -> std::io::Result<()> {
    for item in items {
        let line = serde_json::to_string(&item)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
