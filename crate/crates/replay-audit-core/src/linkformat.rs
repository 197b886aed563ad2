//! Parsing and serialization of `application/link-format` TimeMap bodies.
//!
//! A TimeMap body is a comma-separated list of link-values, each a
//! `<target>` followed by `;`-separated parameters. Quoted parameter values
//! may contain commas and semicolons, so splitting has to be quote-aware.
//! Links whose `rel` contains `memento` become entries; `rel="original"`
//! names the URI-R; `rel="self"` names the URI-T.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, Utc};

use crate::memento::{host_of, truncate_to_seconds, MementoRecord, TimeMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimemapParseError {
    #[error("malformed link-format body: {0}")]
    MalformedLinkFormat(String),
    #[error("no link with rel=\"original\"")]
    MissingOriginal,
}

struct LinkValue {
    target: String,
    params: Vec<(String, String)>,
}

impl LinkValue {
    fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    fn rels(&self) -> Vec<&str> {
        self.param("rel")
            .map(|r| r.split_ascii_whitespace().collect())
            .unwrap_or_default()
    }
}

/// Split a link-format body into link-values, respecting `<...>` targets
/// and quoted parameter values.
fn split_link_values(body: &str) -> Result<Vec<&str>, TimemapParseError> {
    let mut values = Vec::new();
    let mut start = 0usize;
    let mut in_quotes = false;
    let mut in_angle = false;
    for (i, c) in body.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '<' if !in_quotes => {
                if in_angle {
                    return Err(TimemapParseError::MalformedLinkFormat(
                        "nested '<'".to_string(),
                    ));
                }
                in_angle = true;
            }
            '>' if !in_quotes => {
                if !in_angle {
                    return Err(TimemapParseError::MalformedLinkFormat(
                        "unmatched '>'".to_string(),
                    ));
                }
                in_angle = false;
            }
            ',' if !in_quotes && !in_angle => {
                values.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if in_quotes {
        return Err(TimemapParseError::MalformedLinkFormat(
            "unbalanced quote".to_string(),
        ));
    }
    if in_angle {
        return Err(TimemapParseError::MalformedLinkFormat(
            "unclosed '<'".to_string(),
        ));
    }
    values.push(&body[start..]);
    Ok(values
        .into_iter()
        .filter(|v| !v.trim().is_empty())
        .collect())
}

fn parse_link_value(raw: &str) -> Result<LinkValue, TimemapParseError> {
    let raw = raw.trim();
    let Some(rest) = raw.strip_prefix('<') else {
        return Err(TimemapParseError::MalformedLinkFormat(format!(
            "link-value does not start with '<': {raw:?}"
        )));
    };
    let Some(close) = rest.find('>') else {
        return Err(TimemapParseError::MalformedLinkFormat(
            "unclosed target".to_string(),
        ));
    };
    let target = rest[..close].trim().to_string();
    let mut params = Vec::new();
    for piece in split_params(&rest[close + 1..])? {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (key, value) = match piece.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (piece, ""),
        };
        let value = value.strip_prefix('"').map_or(value, |v| {
            v.strip_suffix('"').unwrap_or(v)
        });
        params.push((key.to_ascii_lowercase(), value.to_string()));
    }
    Ok(LinkValue { target, params })
}

/// Split the parameter tail of a link-value on `;`, quote-aware.
fn split_params(tail: &str) -> Result<Vec<&str>, TimemapParseError> {
    let mut pieces = Vec::new();
    let mut start = 0usize;
    let mut in_quotes = false;
    for (i, c) in tail.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            ';' if !in_quotes => {
                pieces.push(&tail[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if in_quotes {
        return Err(TimemapParseError::MalformedLinkFormat(
            "unbalanced quote in parameters".to_string(),
        ));
    }
    pieces.push(&tail[start..]);
    Ok(pieces)
}

fn parse_http_datetime(s: &str) -> Result<DateTime<Utc>, TimemapParseError> {
    DateTime::parse_from_rfc2822(s)
        .map(|dt| truncate_to_seconds(dt.with_timezone(&Utc)))
        .map_err(|e| {
            TimemapParseError::MalformedLinkFormat(format!("bad datetime {s:?}: {e}"))
        })
}

/// Resolve a possibly-relative link target against the TimeMap's own URI.
fn resolve_target(target: &str, base_uri: &str) -> String {
    if target.contains("://") || base_uri.is_empty() {
        return target.to_string();
    }
    if let Some((scheme, rest)) = base_uri.split_once("://") {
        let authority_end = rest.find('/').unwrap_or(rest.len());
        if let Some(abs_path) = target.strip_prefix('/') {
            return format!("{scheme}://{}/{abs_path}", &rest[..authority_end]);
        }
        let dir_end = base_uri.rfind('/').unwrap_or(base_uri.len());
        return format!("{}/{}", &base_uri[..dir_end], target);
    }
    target.to_string()
}

/// Parse a TimeMap body into a [`TimeMap`].
///
/// Every link whose `rel` contains `memento` must carry a `datetime`
/// attribute; archive ids are derived from each URI-M's host (registry
/// aware callers re-key them afterwards).
pub fn parse_timemap(body: &str, base_uri: &str) -> Result<TimeMap, TimemapParseError> {
    if body.trim().is_empty() {
        return Err(TimemapParseError::MalformedLinkFormat(
            "empty body".to_string(),
        ));
    }
    let mut original: Option<String> = None;
    let mut self_uri: Option<String> = None;
    struct PendingEntry {
        uri_m: String,
        datetime: DateTime<Utc>,
    }
    let mut pending: Vec<PendingEntry> = Vec::new();

    for raw in split_link_values(body)? {
        let link = parse_link_value(raw)?;
        let rels = link.rels();
        let target = resolve_target(&link.target, base_uri);
        if rels.iter().any(|r| r.eq_ignore_ascii_case("original")) && original.is_none() {
            original = Some(target.clone());
        }
        if rels.iter().any(|r| r.eq_ignore_ascii_case("self")) && self_uri.is_none() {
            self_uri = Some(target.clone());
        }
        if rels.iter().any(|r| r.eq_ignore_ascii_case("memento")) {
            let Some(datetime) = link.param("datetime") else {
                return Err(TimemapParseError::MalformedLinkFormat(format!(
                    "memento link without datetime: {target}"
                )));
            };
            pending.push(PendingEntry {
                uri_m: target,
                datetime: parse_http_datetime(datetime)?,
            });
        }
    }

    let uri_r = original.ok_or(TimemapParseError::MissingOriginal)?;
    let entries = pending
        .into_iter()
        .map(|p| {
            let archive_id = host_of(&p.uri_m).unwrap_or_else(|| "unknown".to_string());
            let mut record = MementoRecord::new(uri_r.clone(), p.uri_m, archive_id, p.datetime);
            record.ids.uri_t = self_uri.clone();
            record
        })
        .collect();
    Ok(TimeMap::from_entries(uri_r, entries))
}

/// Format a capture instant the way link-format bodies carry it.
pub fn format_http_datetime(dt: DateTime<Utc>) -> String {
    dt.format("%a, %d %b %Y %H:%M:%S GMT").to_string()
}

/// Serialize a TimeMap to canonical link-format: the original link, the
/// self link when known, then one memento link per entry in order.
pub fn serialize_timemap(tm: &TimeMap) -> String {
    let mut lines = Vec::with_capacity(tm.entries.len() + 2);
    lines.push(format!("<{}>; rel=\"original\"", tm.uri_r));
    if let Some(uri_t) = tm.entries.first().and_then(|e| e.ids.uri_t.as_deref()) {
        lines.push(format!(
            "<{uri_t}>; rel=\"self\"; type=\"application/link-format\""
        ));
    }
    for entry in &tm.entries {
        lines.push(format!(
            "<{}>; rel=\"memento\"; datetime=\"{}\"",
            entry.ids.uri_m,
            format_http_datetime(entry.memento_datetime)
        ));
    }
    lines.join(",\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn single_memento_link() {
        let body = "<https://twitter.com/realdonaldtrump>; rel=\"original\",\n\
                    <https://web.archive.org/web/20200818055223/https://twitter.com/realdonaldtrump>; rel=\"memento\"; datetime=\"Tue, 18 Aug 2020 05:52:23 GMT\"";
        let tm = parse_timemap(body, "").unwrap();
        assert_eq!(tm.uri_r, "https://twitter.com/realdonaldtrump");
        assert_eq!(tm.len(), 1);
        assert_eq!(
            tm.entries[0].memento_datetime,
            Utc.with_ymd_and_hms(2020, 8, 18, 5, 52, 23).unwrap()
        );
        assert_eq!(tm.entries[0].archive_id, "web.archive.org");
    }

    #[test]
    fn empty_body_is_malformed() {
        assert!(matches!(
            parse_timemap("  \n ", ""),
            Err(TimemapParseError::MalformedLinkFormat(_))
        ));
    }

    #[test]
    fn compound_rel_and_ordering() {
        // Three mementos listed out of order, the first with a compound rel.
        let body = "<http://a.example/>; rel=\"original\",\
            <http://arc.example/web/20200103000000/http://a.example/>; rel=\"memento\"; datetime=\"Fri, 03 Jan 2020 00:00:00 GMT\",\
            <http://arc.example/web/20200101000000/http://a.example/>; rel=\"first memento\"; datetime=\"Wed, 01 Jan 2020 00:00:00 GMT\",\
            <http://arc.example/web/20200102000000/http://a.example/>; rel=\"memento\"; datetime=\"Thu, 02 Jan 2020 00:00:00 GMT\"";
        let tm = parse_timemap(body, "").unwrap();
        assert_eq!(tm.len(), 3);
        let days: Vec<u32> = tm
            .entries
            .iter()
            .map(|e| chrono::Datelike::day(&e.memento_datetime))
            .collect();
        assert_eq!(days, alloc::vec![1, 2, 3]);
    }

    #[test]
    fn memento_without_datetime_is_malformed() {
        let body = "<http://a.example/>; rel=\"original\",\
                    <http://arc.example/m1>; rel=\"memento\"";
        assert!(matches!(
            parse_timemap(body, ""),
            Err(TimemapParseError::MalformedLinkFormat(_))
        ));
    }

    #[test]
    fn missing_original_is_its_own_error() {
        let body = "<http://arc.example/m1>; rel=\"memento\"; datetime=\"Wed, 01 Jan 2020 00:00:00 GMT\"";
        assert_eq!(parse_timemap(body, ""), Err(TimemapParseError::MissingOriginal));
    }

    #[test]
    fn unbalanced_quote_is_malformed() {
        let body = "<http://a.example/>; rel=\"original";
        assert!(matches!(
            parse_timemap(body, ""),
            Err(TimemapParseError::MalformedLinkFormat(_))
        ));
    }

    #[test]
    fn relative_targets_resolve_against_base() {
        let body = "</original>; rel=\"original\",\
                    </web/20200101000000/x>; rel=\"memento\"; datetime=\"Wed, 01 Jan 2020 00:00:00 GMT\"";
        let tm = parse_timemap(body, "http://arc.example/timemap/link/x").unwrap();
        assert_eq!(tm.uri_r, "http://arc.example/original");
        assert_eq!(tm.entries[0].ids.uri_m, "http://arc.example/web/20200101000000/x");
    }

    #[test]
    fn serialize_then_parse_round_trips() {
        let body = "<http://a.example/>; rel=\"original\",\
            <http://tm.example/self>; rel=\"self\"; type=\"application/link-format\",\
            <http://arc.example/web/20200102030405/http://a.example/>; rel=\"memento\"; datetime=\"Thu, 02 Jan 2020 03:04:05 GMT\"";
        let tm = parse_timemap(body, "").unwrap();
        let reparsed = parse_timemap(&serialize_timemap(&tm), "").unwrap();
        assert_eq!(tm, reparsed);
    }
}
