//! Memento-protocol domain types and nearest-datetime resolution.
//!
//! Terminology follows RFC 7089: an original resource (URI-R) has archived
//! captures (URI-Ms), each stamped with a Memento-Datetime, and a TimeMap
//! (URI-T) lists every known capture of one URI-R.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Which generation of the site's layout a capture replays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UiClass {
    OldUi,
    NewUi,
    Unknown,
}

/// The URI triple identifying one archived capture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchivedResourceIds {
    /// The original live-web resource.
    pub uri_r: String,
    /// The archived capture of it.
    pub uri_m: String,
    /// The TimeMap the capture was listed in, when known.
    pub uri_t: Option<String>,
}

/// One archived capture with the metadata the audit pipeline cares about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MementoRecord {
    pub ids: ArchivedResourceIds,
    /// Short registry key of the archive holding the capture.
    pub archive_id: String,
    /// Capture instant, UTC, second precision.
    pub memento_datetime: DateTime<Utc>,
    /// Status observed when dereferencing the URI-M; absent until fetched.
    pub http_status: Option<u16>,
    /// Response size in bytes; absent until fetched or indexed.
    pub content_length: Option<u64>,
    pub ui_class: UiClass,
}

impl MementoRecord {
    pub fn new(
        uri_r: impl Into<String>,
        uri_m: impl Into<String>,
        archive_id: impl Into<String>,
        memento_datetime: DateTime<Utc>,
    ) -> Self {
        MementoRecord {
            ids: ArchivedResourceIds {
                uri_r: uri_r.into(),
                uri_m: uri_m.into(),
                uri_t: None,
            },
            archive_id: archive_id.into(),
            memento_datetime: truncate_to_seconds(memento_datetime),
            http_status: None,
            content_length: None,
            ui_class: UiClass::Unknown,
        }
    }

    /// Absorb status/length from a duplicate listing of the same URI-M.
    fn fill_from(&mut self, other: &MementoRecord) {
        if self.http_status.is_none() {
            self.http_status = other.http_status;
        }
        if self.content_length.is_none() {
            self.content_length = other.content_length;
        }
        if self.ids.uri_t.is_none() {
            self.ids.uri_t = other.ids.uri_t.clone();
        }
    }
}

/// Ordered, deduplicated list of every known capture of one URI-R.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeMap {
    pub uri_r: String,
    /// Sorted ascending by Memento-Datetime, ties broken by URI-M;
    /// exactly one entry per URI-M.
    pub entries: Vec<MementoRecord>,
    /// Archives that contributed entries (or responded during aggregation).
    pub source_archives: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimeMapError {
    #[error("timemap has no entries")]
    EmptyTimeMap,
}

impl TimeMap {
    /// Build a TimeMap from unordered entries, enforcing the sort order and
    /// URI-M dedup invariants. Duplicate URI-Ms collapse into the first
    /// occurrence in sort order, absorbing any status/length the duplicates
    /// carried.
    pub fn from_entries(uri_r: impl Into<String>, entries: Vec<MementoRecord>) -> Self {
        let mut entries = entries;
        entries.sort_by(|a, b| {
            a.memento_datetime
                .cmp(&b.memento_datetime)
                .then_with(|| a.ids.uri_m.cmp(&b.ids.uri_m))
        });
        let mut deduped: Vec<MementoRecord> = Vec::with_capacity(entries.len());
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for entry in entries {
            if seen.insert(entry.ids.uri_m.clone()) {
                deduped.push(entry);
            } else if let Some(kept) = deduped
                .iter_mut()
                .find(|kept| kept.ids.uri_m == entry.ids.uri_m)
            {
                kept.fill_from(&entry);
            }
        }
        let source_archives = deduped.iter().map(|e| e.archive_id.clone()).collect();
        TimeMap {
            uri_r: uri_r.into(),
            entries: deduped,
            source_archives,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Entry minimizing the absolute distance to `target`; the earlier entry
/// wins an exact tie so that resolution is deterministic.
pub fn nearest_memento<'a>(
    tm: &'a TimeMap,
    target: DateTime<Utc>,
) -> Result<&'a MementoRecord, TimeMapError> {
    let mut best: Option<&MementoRecord> = None;
    for entry in &tm.entries {
        let dist = distance_secs(entry.memento_datetime, target);
        match best {
            None => best = Some(entry),
            Some(cur) => {
                let cur_dist = distance_secs(cur.memento_datetime, target);
                if dist < cur_dist
                    || (dist == cur_dist && entry.memento_datetime < cur.memento_datetime)
                {
                    best = Some(entry);
                }
            }
        }
    }
    best.ok_or(TimeMapError::EmptyTimeMap)
}

fn distance_secs(a: DateTime<Utc>, b: DateTime<Utc>) -> i64 {
    (a.timestamp() - b.timestamp()).abs()
}

/// Normalize a URI for identity comparisons: lowercase the scheme and host,
/// drop any fragment, keep path and query untouched.
pub fn canonicalize_uri(uri: &str) -> String {
    let uri = match uri.split_once('#') {
        Some((before, _fragment)) => before,
        None => uri,
    };
    let Some((scheme, rest)) = uri.split_once("://") else {
        return uri.to_string();
    };
    let authority_end = rest
        .find(|c| c == '/' || c == '?')
        .unwrap_or(rest.len());
    let (authority, tail) = rest.split_at(authority_end);
    // Only the host part of the authority is case-insensitive.
    let lowered_authority = match authority.rsplit_once('@') {
        Some((userinfo, host)) => {
            let mut s = String::with_capacity(authority.len());
            s.push_str(userinfo);
            s.push('@');
            s.push_str(&host.to_ascii_lowercase());
            s
        }
        None => authority.to_ascii_lowercase(),
    };
    let mut out = String::with_capacity(uri.len());
    out.push_str(&scheme.to_ascii_lowercase());
    out.push_str("://");
    out.push_str(&lowered_authority);
    out.push_str(tail);
    out
}

pub(crate) fn truncate_to_seconds(dt: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(dt.timestamp(), 0).expect("in-range timestamp")
}

/// Fallback archive id for a URI-M when no registry pattern matched:
/// the lowercased authority of the URI.
pub fn host_of(uri: &str) -> Option<String> {
    let (_scheme, rest) = uri.split_once("://")?;
    let authority_end = rest.find(|c| c == '/' || c == '?' || c == '#').unwrap_or(rest.len());
    let authority = &rest[..authority_end];
    let host = match authority.rsplit_once('@') {
        Some((_userinfo, host)) => host,
        None => authority,
    };
    if host.is_empty() {
        None
    } else {
        Some(host.to_ascii_lowercase())
    }
}
