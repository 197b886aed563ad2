//! Line-delimited memento records: the toolkit's lossless flat format.
//!
//! One capture per line, six tab-separated fields:
//! `archive_id  timestamp  status  length  uri_m  uri_r`
//! where `timestamp` is the 14-digit form and `-` marks an absent status
//! or length. URIs contain no tabs, so no quoting is needed.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::memento::MementoRecord;
use crate::replay_url::{format_timestamp14, parse_timestamp14};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordParseError {
    #[error("line {line}: expected 6 tab-separated fields, got {got}")]
    WrongFieldCount { line: usize, got: usize },
    #[error("line {line}: {reason}")]
    BadField { line: usize, reason: String },
}

pub fn format_record(record: &MementoRecord) -> String {
    let status = record
        .http_status
        .map_or_else(|| "-".to_string(), |s| s.to_string());
    let length = record
        .content_length
        .map_or_else(|| "-".to_string(), |l| l.to_string());
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        record.archive_id,
        format_timestamp14(record.memento_datetime),
        status,
        length,
        record.ids.uri_m,
        record.ids.uri_r,
    )
}

pub fn format_records(records: &[MementoRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&format_record(record));
        out.push('\n');
    }
    out
}

pub fn parse_record(line: &str, line_no: usize) -> Result<MementoRecord, RecordParseError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 6 {
        return Err(RecordParseError::WrongFieldCount {
            line: line_no,
            got: fields.len(),
        });
    }
    let bad = |reason: String| RecordParseError::BadField {
        line: line_no,
        reason,
    };
    let datetime = parse_timestamp14(fields[1]).map_err(|e| bad(e.to_string()))?;
    let mut record = MementoRecord::new(fields[5], fields[4], fields[0], datetime);
    if fields[2] != "-" {
        record.http_status = Some(
            fields[2]
                .parse::<u16>()
                .map_err(|e| bad(format!("bad status {:?}: {e}", fields[2])))?,
        );
    }
    if fields[3] != "-" {
        record.content_length = Some(
            fields[3]
                .parse::<u64>()
                .map_err(|e| bad(format!("bad length {:?}: {e}", fields[3])))?,
        );
    }
    Ok(record)
}

/// Parse a whole records file; blank lines are skipped, line numbers are
/// 1-based in errors.
pub fn parse_records(body: &str) -> Result<Vec<MementoRecord>, RecordParseError> {
    body.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| parse_record(line, i + 1))
        .collect()
}
