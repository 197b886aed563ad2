//! Archive registry: which archives to query, how to build their TimeMap
//! and CDX URLs, how to recognize their replay URLs, and how politely to
//! talk to them.
//!
//! The registry is declarative configuration (TOML). Endpoint templates
//! carry a `{uri_r}` placeholder; replay patterns use the placeholders
//! understood by [`ReplayPattern`]: `{timestamp}`, `{uri_r}`, optional
//! `{flags}` and `{*}`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use replay_audit_core::replay_url::{PatternSet, ReplayPattern};

#[derive(Debug, Clone, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot read registry {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("invalid registry: {0}")]
    Invalid(String),
}

/// One archive the toolkit may talk to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveRegistryEntry {
    /// Short registry key, e.g. `web.archive.org`.
    pub id: String,
    /// TimeMap endpoint with a `{uri_r}` placeholder.
    pub timemap_endpoint: String,
    /// Replay URL template with a `{timestamp}` capture.
    pub replay_url_pattern: String,
    /// CDX endpoint, for archives that index capture metadata.
    #[serde(default)]
    pub cdx_endpoint: Option<String>,
    /// Concurrent request ceiling within this archive.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Minimum milliseconds between request starts to this archive.
    #[serde(default = "default_min_request_gap_ms")]
    pub min_request_gap_ms: u64,
}

fn default_max_in_flight() -> usize {
    1
}

fn default_min_request_gap_ms() -> u64 {
    500
}

impl ArchiveRegistryEntry {
    pub fn timemap_url(&self, uri_r: &str) -> String {
        self.timemap_endpoint.replace("{uri_r}", uri_r)
    }

    pub fn compiled_pattern(&self) -> Result<ReplayPattern, RegistryError> {
        ReplayPattern::compile(&self.id, &self.replay_url_pattern)
            .map_err(|e| RegistryError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveRegistry {
    #[serde(rename = "archives", default)]
    pub entries: Vec<ArchiveRegistryEntry>,
}

impl ArchiveRegistry {
    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = std::fs::read_to_string(path).map_err(|e| RegistryError::Unreadable {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let registry: ArchiveRegistry =
            toml::from_str(text).map_err(|e| RegistryError::Invalid(e.to_string()))?;
        registry.validate()?;
        Ok(registry)
    }

    fn validate(&self) -> Result<(), RegistryError> {
        if self.entries.is_empty() {
            return Err(RegistryError::Invalid("no archives configured".into()));
        }
        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.id.as_str()) {
                return Err(RegistryError::Invalid(format!(
                    "duplicate archive id {:?}",
                    entry.id
                )));
            }
            let placeholders = entry.timemap_endpoint.matches("{uri_r}").count();
            if placeholders != 1 {
                return Err(RegistryError::Invalid(format!(
                    "archive {:?}: timemap endpoint must contain exactly one {{uri_r}}, found {placeholders}",
                    entry.id
                )));
            }
            if entry.max_in_flight == 0 {
                return Err(RegistryError::Invalid(format!(
                    "archive {:?}: max_in_flight must be positive",
                    entry.id
                )));
            }
            entry.compiled_pattern()?;
            if let Some(cdx) = &entry.cdx_endpoint {
                if cdx.is_empty() {
                    return Err(RegistryError::Invalid(format!(
                        "archive {:?}: empty cdx endpoint",
                        entry.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replay patterns of every registered archive, in registry order.
    pub fn pattern_set(&self) -> PatternSet {
        let mut set = PatternSet::default();
        for entry in &self.entries {
            set.push(entry.compiled_pattern().expect("validated"));
        }
        set
    }

    /// The seven public archives the toolkit knows out of the box.
    pub fn well_known() -> Self {
        let entry = |id: &str, timemap: &str, replay: &str, cdx: Option<&str>| {
            ArchiveRegistryEntry {
                id: id.into(),
                timemap_endpoint: timemap.into(),
                replay_url_pattern: replay.into(),
                cdx_endpoint: cdx.map(Into::into),
                max_in_flight: 2,
                min_request_gap_ms: 500,
            }
        };
        ArchiveRegistry {
            entries: vec![
                entry(
                    "web.archive.org",
                    "https://web.archive.org/web/timemap/link/{uri_r}",
                    "https://web.archive.org/web/{timestamp}{flags}/{uri_r}",
                    Some("https://web.archive.org/cdx/search/cdx"),
                ),
                entry(
                    "archive.today",
                    "https://archive.ph/timemap/{uri_r}",
                    "https://archive.ph/{timestamp}/{uri_r}",
                    None,
                ),
                entry(
                    "perma.cc",
                    "https://perma-archives.org/warc/timemap/link/{uri_r}",
                    "https://perma-archives.org/warc/{timestamp}{flags}/{uri_r}",
                    None,
                ),
                entry(
                    "swap.stanford.edu",
                    "https://swap.stanford.edu/timemap/link/{uri_r}",
                    "https://swap.stanford.edu/{timestamp}{flags}/{uri_r}",
                    None,
                ),
                entry(
                    "archive-it.org",
                    "https://wayback.archive-it.org/all/timemap/link/{uri_r}",
                    "https://wayback.archive-it.org/{*}/{timestamp}{flags}/{uri_r}",
                    None,
                ),
                entry(
                    "vefsafn.is",
                    "http://wayback.vefsafn.is/wayback/timemap/link/{uri_r}",
                    "http://wayback.vefsafn.is/wayback/{timestamp}{flags}/{uri_r}",
                    None,
                ),
                entry(
                    "webarchive.org.uk",
                    "https://www.webarchive.org.uk/wayback/archive/timemap/link/{uri_r}",
                    "https://www.webarchive.org.uk/wayback/archive/{timestamp}{flags}/{uri_r}",
                    None,
                ),
            ],
        }
    }
}
