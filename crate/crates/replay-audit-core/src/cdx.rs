//! CDX line parsing.
//!
//! CDX APIs answer with one space-separated line per capture:
//! `urlkey timestamp original mimetype statuscode digest length`
//! where `-` marks an unknown status, digest, or length.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::replay_url::parse_timestamp14;

pub const CDX_FIELDS: usize = 7;

/// One CDX index line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdxRecord {
    pub urlkey: String,
    /// 14-digit capture timestamp, kept verbatim.
    pub timestamp: String,
    pub original: String,
    pub mimetype: Option<String>,
    pub status: Option<u16>,
    pub digest: Option<String>,
    pub content_length: Option<u64>,
}

impl CdxRecord {
    pub fn memento_datetime(&self) -> DateTime<Utc> {
        // Validated at parse time.
        parse_timestamp14(&self.timestamp).expect("validated timestamp")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CdxParseError {
    #[error("CDX line {line}: expected {CDX_FIELDS} fields, got {got}")]
    MalformedCdxLine { line: usize, got: usize },
    #[error("CDX line {line}: {reason}")]
    BadField { line: usize, reason: String },
}

fn opt(field: &str) -> Option<&str> {
    if field == "-" {
        None
    } else {
        Some(field)
    }
}

pub fn parse_cdx_line(line: &str, line_no: usize) -> Result<CdxRecord, CdxParseError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != CDX_FIELDS {
        return Err(CdxParseError::MalformedCdxLine {
            line: line_no,
            got: fields.len(),
        });
    }
    let bad = |reason: String| CdxParseError::BadField {
        line: line_no,
        reason,
    };
    parse_timestamp14(fields[1]).map_err(|e| bad(e.to_string()))?;
    let status = match opt(fields[4]) {
        Some(s) => Some(
            s.parse::<u16>()
                .map_err(|e| bad(format!("bad status {s:?}: {e}")))?,
        ),
        None => None,
    };
    let content_length = match opt(fields[6]) {
        Some(l) => Some(
            l.parse::<u64>()
                .map_err(|e| bad(format!("bad length {l:?}: {e}")))?,
        ),
        None => None,
    };
    Ok(CdxRecord {
        urlkey: fields[0].to_string(),
        timestamp: fields[1].to_string(),
        original: fields[2].to_string(),
        mimetype: opt(fields[3]).map(str::to_string),
        status,
        digest: opt(fields[5]).map(str::to_string),
        content_length,
    })
}

/// Parse a CDX response body, preserving server order. Blank lines are
/// skipped; any malformed line aborts with its 1-based line number.
pub fn parse_cdx_body(body: &str) -> Result<Vec<CdxRecord>, CdxParseError> {
    body.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| parse_cdx_line(line, i + 1))
        .collect()
}

/// Format a record back into the wire form (used by the fixture server).
pub fn format_cdx_line(record: &CdxRecord) -> String {
    format!(
        "{} {} {} {} {} {} {}",
        record.urlkey,
        record.timestamp,
        record.original,
        record.mimetype.as_deref().unwrap_or("-"),
        record
            .status
            .map_or_else(|| "-".to_string(), |s| s.to_string()),
        record.digest.as_deref().unwrap_or("-"),
        record
            .content_length
            .map_or_else(|| "-".to_string(), |l| l.to_string()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = "com,twitter)/x 20200818055223 https://twitter.com/x text/html 200 ABCDEF123 45678";

    #[test]
    fn well_formed_line_parses() {
        let record = parse_cdx_line(LINE, 1).unwrap();
        assert_eq!(record.urlkey, "com,twitter)/x");
        assert_eq!(record.status, Some(200));
        assert_eq!(record.content_length, Some(45678));
        assert_eq!(
            record.memento_datetime(),
            chrono::TimeZone::with_ymd_and_hms(&Utc, 2020, 8, 18, 5, 52, 23).unwrap()
        );
    }

    #[test]
    fn dashes_mean_absent() {
        let record =
            parse_cdx_line("com,twitter)/x 20200818055223 https://twitter.com/x - - - -", 1)
                .unwrap();
        assert_eq!(record.mimetype, None);
        assert_eq!(record.status, None);
        assert_eq!(record.digest, None);
        assert_eq!(record.content_length, None);
    }

    #[test]
    fn three_fields_is_malformed() {
        assert_eq!(
            parse_cdx_line("a b c", 7),
            Err(CdxParseError::MalformedCdxLine { line: 7, got: 3 })
        );
    }

    #[test]
    fn empty_body_yields_empty_list() {
        assert_eq!(parse_cdx_body("\n\n").unwrap(), alloc::vec![]);
    }

    #[test]
    fn line_round_trip() {
        let record = parse_cdx_line(LINE, 1).unwrap();
        assert_eq!(format_cdx_line(&record), LINE);
    }
}
