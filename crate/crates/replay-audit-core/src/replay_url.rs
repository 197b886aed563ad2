//! Replay-URL patterns: recovering `(archive, Memento-Datetime, URI-R)`
//! from a URI-M.
//!
//! Most wayback-style archives embed a 14-digit `YYYYMMDDhhmmss` timestamp
//! in the replay URL, followed by the original URL verbatim. Each archive
//! registers a template such as
//! `https://web.archive.org/web/{timestamp}{flags}/{uri_r}`; templates for
//! archives that encode datetimes differently have to come from fixtures
//! or configuration, and URI-Ms that match no template are rejected.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayUrlError {
    #[error("URI-M matches no registered replay pattern: {0}")]
    UnrecognizedArchivePattern(String),
    #[error("invalid replay timestamp {0:?}: {1}")]
    InvalidTimestamp(String, &'static str),
    #[error("replay pattern {0:?} is invalid: {1}")]
    BadPattern(String, &'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Literal(String),
    /// 14-digit capture timestamp.
    Timestamp,
    /// Optional replay modifier such as `id_` (letters and underscores).
    Flags,
    /// One opaque path segment (an archive-it collection number, say).
    AnySegment,
    /// The original URL, verbatim to the end of the URI-M.
    UriR,
}

/// A compiled replay-URL template for one archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayPattern {
    pub archive_id: String,
    template: String,
    tokens: Vec<Token>,
}

impl ReplayPattern {
    /// Compile a template. `{timestamp}` and `{uri_r}` are required, in
    /// that order, with `{uri_r}` last; `{flags}` and `{*}` are optional.
    pub fn compile(archive_id: &str, template: &str) -> Result<Self, ReplayUrlError> {
        let bad = |reason| ReplayUrlError::BadPattern(template.to_string(), reason);
        let mut tokens = Vec::new();
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            if open > 0 {
                tokens.push(Token::Literal(rest[..open].to_string()));
            }
            let after = &rest[open + 1..];
            let close = after.find('}').ok_or_else(|| bad("unclosed placeholder"))?;
            match &after[..close] {
                "timestamp" => tokens.push(Token::Timestamp),
                "uri_r" => tokens.push(Token::UriR),
                "flags" => tokens.push(Token::Flags),
                "*" => tokens.push(Token::AnySegment),
                _ => return Err(bad("unknown placeholder")),
            }
            rest = &after[close + 1..];
        }
        if !rest.is_empty() {
            tokens.push(Token::Literal(rest.to_string()));
        }
        let ts_count = tokens.iter().filter(|t| **t == Token::Timestamp).count();
        if ts_count != 1 {
            return Err(bad("exactly one {timestamp} required"));
        }
        match tokens.last() {
            Some(Token::UriR) => {}
            _ => return Err(bad("{uri_r} must be present and last")),
        }
        if tokens.iter().filter(|t| **t == Token::UriR).count() != 1 {
            return Err(bad("exactly one {uri_r} required"));
        }
        Ok(ReplayPattern {
            archive_id: archive_id.to_string(),
            template: template.to_string(),
            tokens,
        })
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    /// Render a URI-M for a capture of `uri_r` at `dt` (empty flags, `{*}`
    /// filled with `0`).
    pub fn render(&self, dt: DateTime<Utc>, uri_r: &str) -> String {
        let mut out = String::new();
        for token in &self.tokens {
            match token {
                Token::Literal(lit) => out.push_str(lit),
                Token::Timestamp => out.push_str(&format_timestamp14(dt)),
                Token::Flags => {}
                Token::AnySegment => out.push('0'),
                Token::UriR => out.push_str(uri_r),
            }
        }
        out
    }

    /// Attempt to match a URI-M. `Ok(None)` means "not this archive";
    /// `Err(InvalidTimestamp)` means the shape matched but the timestamp
    /// digits were wrong.
    fn try_match(&self, uri_m: &str) -> Result<Option<(DateTime<Utc>, String)>, ReplayUrlError> {
        let mut rest = uri_m;
        let mut datetime = None;
        for token in &self.tokens {
            match token {
                Token::Literal(lit) => match rest.strip_prefix(lit.as_str()) {
                    Some(r) => rest = r,
                    None => return Ok(None),
                },
                Token::Timestamp => {
                    let digits: usize = rest.chars().take_while(|c| c.is_ascii_digit()).count();
                    if digits == 0 {
                        return Ok(None);
                    }
                    if digits != 14 {
                        return Err(ReplayUrlError::InvalidTimestamp(
                            rest[..digits].to_string(),
                            "expected exactly 14 digits",
                        ));
                    }
                    datetime = Some(parse_timestamp14(&rest[..digits])?);
                    rest = &rest[digits..];
                }
                Token::Flags => {
                    let len = rest
                        .chars()
                        .take_while(|c| c.is_ascii_alphabetic() || *c == '_')
                        .count();
                    rest = &rest[len..];
                }
                Token::AnySegment => {
                    let len = rest.chars().take_while(|c| *c != '/').count();
                    if len == 0 {
                        return Ok(None);
                    }
                    rest = &rest[len..];
                }
                Token::UriR => {
                    return Ok(datetime.map(|dt| (dt, rest.to_string())));
                }
            }
        }
        Ok(None)
    }
}

/// Parse a 14-digit `YYYYMMDDhhmmss` timestamp as a UTC instant.
pub fn parse_timestamp14(s: &str) -> Result<DateTime<Utc>, ReplayUrlError> {
    let invalid = |reason| ReplayUrlError::InvalidTimestamp(s.to_string(), reason);
    if s.len() != 14 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid("expected exactly 14 digits"));
    }
    let num = |range: core::ops::Range<usize>| s[range].parse::<u32>().unwrap();
    let date = NaiveDate::from_ymd_opt(s[0..4].parse().unwrap(), num(4..6), num(6..8))
        .ok_or_else(|| invalid("calendar date out of range"))?;
    let time = date
        .and_hms_opt(num(8..10), num(10..12), num(12..14))
        .ok_or_else(|| invalid("time of day out of range"))?;
    Ok(time.and_utc())
}

/// Format a UTC instant as a 14-digit replay timestamp.
pub fn format_timestamp14(dt: DateTime<Utc>) -> String {
    dt.format("%Y%m%d%H%M%S").to_string()
}

/// An ordered set of replay patterns, tried first to last.
#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    patterns: Vec<ReplayPattern>,
}

/// The `(archive, Memento-Datetime, URI-R)` triple recovered from a URI-M.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedMementoUri {
    pub archive_id: String,
    pub memento_datetime: DateTime<Utc>,
    pub uri_r: String,
}

impl PatternSet {
    pub fn new(patterns: Vec<ReplayPattern>) -> Self {
        PatternSet { patterns }
    }

    /// Patterns for well-known public archives. Fixture-driven registries
    /// replace this set wholesale.
    pub fn well_known() -> Self {
        let known: &[(&str, &str)] = &[
            ("web.archive.org", "https://web.archive.org/web/{timestamp}{flags}/{uri_r}"),
            ("web.archive.org", "http://web.archive.org/web/{timestamp}{flags}/{uri_r}"),
            ("archive-it.org", "https://wayback.archive-it.org/{*}/{timestamp}{flags}/{uri_r}"),
            ("swap.stanford.edu", "https://swap.stanford.edu/{timestamp}{flags}/{uri_r}"),
            ("vefsafn.is", "https://vefsafn.is/{timestamp}{flags}/{uri_r}"),
            ("vefsafn.is", "http://wayback.vefsafn.is/wayback/{timestamp}{flags}/{uri_r}"),
            ("webarchive.org.uk", "https://www.webarchive.org.uk/wayback/archive/{timestamp}{flags}/{uri_r}"),
            ("perma.cc", "https://perma-archives.org/warc/{timestamp}{flags}/{uri_r}"),
        ];
        PatternSet {
            patterns: known
                .iter()
                .map(|(id, tpl)| ReplayPattern::compile(id, tpl).expect("static template"))
                .collect(),
        }
    }

    pub fn push(&mut self, pattern: ReplayPattern) {
        self.patterns.push(pattern);
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Recover archive id, capture instant, and original URL from a URI-M.
    pub fn parse_memento_uri(&self, uri_m: &str) -> Result<ParsedMementoUri, ReplayUrlError> {
        for pattern in &self.patterns {
            match pattern.try_match(uri_m)? {
                Some((memento_datetime, uri_r)) => {
                    return Ok(ParsedMementoUri {
                        archive_id: pattern.archive_id.clone(),
                        memento_datetime,
                        uri_r,
                    })
                }
                None => continue,
            }
        }
        Err(ReplayUrlError::UnrecognizedArchivePattern(
            uri_m.to_string(),
        ))
    }
}
