//! Temporal coherence of composite mementos.
//!
//! A client-rendered page replays as a root HTML capture plus separately
//! archived section feeds, each resolved to the capture nearest the root's
//! Memento-Datetime. The section feeds can come from the past or the
//! future, so the replayed page may show a state that never existed live.
//! This module measures that: per-section time deltas, the spread across
//! sections, missing/future tweets against a ground-truth timeline, and
//! summary statistics of delta distributions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::labels::TweetRecord;
use crate::memento::{nearest_memento, MementoRecord, TimeMap};

/// The five dynamically populated sections of a client-rendered account
/// page.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum SectionKind {
    TweetFeed,
    Bio,
    MediaTimeline,
    YouMightLike,
    WhatsHappening,
}

impl SectionKind {
    pub const ALL: [SectionKind; 5] = [
        SectionKind::TweetFeed,
        SectionKind::Bio,
        SectionKind::MediaTimeline,
        SectionKind::YouMightLike,
        SectionKind::WhatsHappening,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SectionKind::TweetFeed => "tweet-feed",
            SectionKind::Bio => "bio",
            SectionKind::MediaTimeline => "media-timeline",
            SectionKind::YouMightLike => "you-might-like",
            SectionKind::WhatsHappening => "whats-happening",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// All five section feeds resolved to a capture.
    Complete,
    /// At least one section has no capture at all.
    Failed,
}

/// Which side of the root capture the resolved tweet feed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationDirection {
    Past,
    Future,
    None,
}

/// Result of checking a composite memento's tweet feed against the
/// ground-truth timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetViolation {
    pub direction: ViolationDirection,
    /// Missing tweets (past) or tweets that should not be present (future).
    pub off_by_count: u64,
    pub violative: bool,
}

impl TweetViolation {
    pub fn none() -> Self {
        TweetViolation {
            direction: ViolationDirection::None,
            off_by_count: 0,
            violative: false,
        }
    }
}

/// One audited composite memento: the root capture, the section captures
/// that resolved, and the derived coherence measures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeMementoAudit {
    pub root: MementoRecord,
    pub sections: BTreeMap<SectionKind, MementoRecord>,
    /// Signed seconds, section minus root, per resolved section.
    pub deltas: BTreeMap<SectionKind, i64>,
    /// Max minus min over the section capture instants; only meaningful
    /// when complete.
    pub spread: Option<i64>,
    pub completeness: Completeness,
    pub tweet_violation: Option<TweetViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoherenceError {
    #[error("audit is incomplete; spread is undefined")]
    IncompleteAudit,
    #[error("tweet feed section did not resolve")]
    MissingTweetFeed,
    #[error("empty input")]
    EmptyInput,
    #[error("deltas do not all match the stated direction")]
    MixedSigns,
}

/// Signed seconds between the root capture and a section capture; negative
/// means the section feed is older than the page it populates.
pub fn time_delta(root_dt: DateTime<Utc>, section_dt: DateTime<Utc>) -> i64 {
    section_dt.timestamp() - root_dt.timestamp()
}

/// Resolve each section feed to its capture nearest the root's
/// Memento-Datetime and derive deltas, completeness, and spread. A section
/// whose TimeMap is missing or empty stays unresolved and the audit is
/// marked failed.
pub fn resolve_sections(
    root: MementoRecord,
    section_timemaps: &BTreeMap<SectionKind, TimeMap>,
) -> CompositeMementoAudit {
    let mut sections = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for kind in SectionKind::ALL {
        let Some(tm) = section_timemaps.get(&kind) else {
            continue;
        };
        let Ok(hit) = nearest_memento(tm, root.memento_datetime) else {
            continue;
        };
        deltas.insert(kind, time_delta(root.memento_datetime, hit.memento_datetime));
        sections.insert(kind, hit.clone());
    }
    let completeness = if sections.len() == SectionKind::ALL.len() {
        Completeness::Complete
    } else {
        Completeness::Failed
    };
    let spread = match completeness {
        Completeness::Complete => {
            let times: Vec<i64> = sections
                .values()
                .map(|m| m.memento_datetime.timestamp())
                .collect();
            Some(times.iter().max().unwrap() - times.iter().min().unwrap())
        }
        Completeness::Failed => None,
    };
    CompositeMementoAudit {
        root,
        sections,
        deltas,
        spread,
        completeness,
        tweet_violation: None,
    }
}

/// Difference between the latest and earliest section capture instants.
pub fn temporal_spread(audit: &CompositeMementoAudit) -> Result<i64, CoherenceError> {
    if audit.completeness != Completeness::Complete {
        return Err(CoherenceError::IncompleteAudit);
    }
    let times: Vec<i64> = audit
        .sections
        .values()
        .map(|m| m.memento_datetime.timestamp())
        .collect();
    Ok(times.iter().max().unwrap() - times.iter().min().unwrap())
}

/// Count the tweets that make a composite memento lie about the timeline.
///
/// With root capture at `r` and the tweet feed resolved from `s`:
/// a feed from the past misses the tweets created in `(s, r]`, and a feed
/// from the future shows tweets created in `(r, s]` that did not yet exist
/// at `r`. The interval is open at the stale end and closed at the fresh
/// end because a feed generated at `s` contains exactly the tweets created
/// at or before `s`. `timeline` must be sorted ascending by `created_at`.
pub fn count_tweet_violation(
    audit: &CompositeMementoAudit,
    timeline: &[TweetRecord],
) -> Result<TweetViolation, CoherenceError> {
    let feed = audit
        .sections
        .get(&SectionKind::TweetFeed)
        .ok_or(CoherenceError::MissingTweetFeed)?;
    let root_dt = audit.root.memento_datetime;
    let feed_dt = feed.memento_datetime;
    debug_assert!(timeline.windows(2).all(|w| w[0].created_at <= w[1].created_at));

    let (direction, lo, hi) = match feed_dt.cmp(&root_dt) {
        core::cmp::Ordering::Equal => return Ok(TweetViolation::none()),
        core::cmp::Ordering::Less => (ViolationDirection::Past, feed_dt, root_dt),
        core::cmp::Ordering::Greater => (ViolationDirection::Future, root_dt, feed_dt),
    };
    // Tweets with created_at in (lo, hi].
    let begin = timeline.partition_point(|t| t.created_at <= lo);
    let end = timeline.partition_point(|t| t.created_at <= hi);
    let off_by_count = (end - begin) as u64;
    Ok(TweetViolation {
        direction,
        off_by_count,
        violative: off_by_count >= 1,
    })
}

/// Which standard-deviation estimator a summary uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdEstimator {
    /// Divide by n.
    Population,
    /// Divide by n − 1 (0 when n == 1).
    Sample,
}

/// Summary statistics over the absolute values of one direction's deltas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Summarize deltas that all lie on one side of zero. Past deltas must all
/// be negative and future deltas all positive; statistics are over the
/// absolute values. Zero deltas are coherent captures and must be excluded
/// before calling.
pub fn delta_stats(
    deltas: &[i64],
    direction: ViolationDirection,
    estimator: SdEstimator,
) -> Result<DeltaStats, CoherenceError> {
    if deltas.is_empty() {
        return Err(CoherenceError::EmptyInput);
    }
    let sign_ok = |d: &i64| match direction {
        ViolationDirection::Past => *d < 0,
        ViolationDirection::Future => *d > 0,
        ViolationDirection::None => false,
    };
    if !deltas.iter().all(sign_ok) {
        return Err(CoherenceError::MixedSigns);
    }
    let mut abs: Vec<f64> = deltas.iter().map(|d| d.unsigned_abs() as f64).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = abs.len();
    let min = abs[0];
    let max = abs[n - 1];
    let median = if n % 2 == 1 {
        abs[n / 2]
    } else {
        (abs[n / 2 - 1] + abs[n / 2]) / 2.0
    };
    let mean = abs.iter().sum::<f64>() / n as f64;
    let sum_sq_dev = abs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let sd = match estimator {
        SdEstimator::Population => libm::sqrt(sum_sq_dev / n as f64),
        SdEstimator::Sample if n > 1 => libm::sqrt(sum_sq_dev / (n - 1) as f64),
        SdEstimator::Sample => 0.0,
    };
    Ok(DeltaStats {
        count: n,
        min,
        max,
        median,
        mean,
        sd,
    })
}

/// Empirical CDF of a delta sample: sorted unique values with cumulative
/// probabilities k/n. The final probability is exactly 1.
pub fn ecdf(deltas: &[i64]) -> Result<Vec<(i64, f64)>, CoherenceError> {
    if deltas.is_empty() {
        return Err(CoherenceError::EmptyInput);
    }
    let mut sorted: Vec<i64> = deltas.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut out: Vec<(i64, f64)> = Vec::new();
    let mut i = 0usize;
    while i < n {
        let value = sorted[i];
        let mut j = i + 1;
        while j < n && sorted[j] == value {
            j += 1;
        }
        out.push((value, j as f64 / n as f64));
        i = j;
    }
    Ok(out)
}

/// Seconds between refreshes of the trends section.
pub const TRENDS_POLL_PERIOD_SECS: i64 = 300;

/// How many trend refreshes fall strictly inside a time delta: the number
/// of poll instants `k * 300 s` with `0 < k * 300 < |delta|`. A feed off by
/// one hour misses 11 refreshes.
pub fn missed_whats_happening_updates(delta_secs: i64) -> u64 {
    let magnitude = delta_secs.unsigned_abs();
    if magnitude == 0 {
        return 0;
    }
    (magnitude - 1) / TRENDS_POLL_PERIOD_SECS as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::TweetKind;
    use crate::snowflake::TweetId;
    use alloc::collections::BTreeSet;
    use alloc::vec;
    use chrono::TimeZone;

    fn utc(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, mo, d, h, mi, s).unwrap()
    }

    fn record(uri_m: &str, dt: DateTime<Utc>) -> MementoRecord {
        MementoRecord::new("https://twitter.com/x", uri_m, "test-archive", dt)
    }

    fn tweet_at(dt: DateTime<Utc>) -> TweetRecord {
        TweetRecord {
            id: crate::snowflake::first_id_at(dt).unwrap_or(TweetId(1)),
            created_at: dt,
            kind: TweetKind::Tweet,
            retweet_count: Some(0),
            favorite_count: Some(1),
            label: None,
            source_datasets: BTreeSet::new(),
        }
    }

    fn audit_with(root_dt: DateTime<Utc>, section_dts: &[(SectionKind, DateTime<Utc>)]) -> CompositeMementoAudit {
        let root = record("root", root_dt);
        let timemaps: BTreeMap<SectionKind, TimeMap> = section_dts
            .iter()
            .map(|(kind, dt)| {
                (
                    *kind,
                    TimeMap::from_entries(
                        "https://api.example/section",
                        vec![record(kind.as_str(), *dt)],
                    ),
                )
            })
            .collect();
        resolve_sections(root, &timemaps)
    }

    #[test]
    fn five_singleton_sections_are_complete() {
        let t = utc(2020, 8, 18, 5, 52, 23);
        let sections: Vec<(SectionKind, DateTime<Utc>)> =
            SectionKind::ALL.iter().map(|k| (*k, t)).collect();
        let audit = audit_with(t, &sections);
        assert_eq!(audit.completeness, Completeness::Complete);
        assert!(audit.deltas.values().all(|d| *d == 0));
        assert_eq!(audit.spread, Some(0));
    }

    #[test]
    fn four_of_five_sections_is_failed() {
        let t = utc(2020, 8, 18, 5, 52, 23);
        let sections: Vec<(SectionKind, DateTime<Utc>)> = SectionKind::ALL
            .iter()
            .take(4)
            .map(|k| (*k, t))
            .collect();
        let audit = audit_with(t, &sections);
        assert_eq!(audit.completeness, Completeness::Failed);
        assert_eq!(audit.spread, None);
        assert_eq!(temporal_spread(&audit), Err(CoherenceError::IncompleteAudit));
    }

    #[test]
    fn delta_sign_convention() {
        let root = utc(2020, 8, 18, 5, 52, 23);
        assert_eq!(time_delta(root, root), 0);
        assert_eq!(time_delta(root, utc(2020, 8, 16, 5, 52, 23)), -172_800);
        assert_eq!(time_delta(root, root + chrono::Duration::seconds(1)), 1);
    }

    #[test]
    fn spread_over_staggered_sections() {
        let t = utc(2020, 8, 18, 5, 0, 0);
        let sections: Vec<(SectionKind, DateTime<Utc>)> = SectionKind::ALL
            .iter()
            .enumerate()
            .map(|(i, k)| (*k, t + chrono::Duration::seconds(10 * i as i64)))
            .collect();
        let audit = audit_with(t, &sections);
        assert_eq!(audit.spread, Some(40));
        assert_eq!(temporal_spread(&audit).unwrap(), 40);
    }

    #[test]
    fn violation_counting_past_and_future() {
        let base = utc(2020, 8, 1, 0, 0, 0);
        let timeline: Vec<TweetRecord> = [10, 20, 30]
            .iter()
            .map(|m| tweet_at(base + chrono::Duration::minutes(*m)))
            .collect();

        // Root at +35 min, feed at +15 min: tweets at 20 and 30 are missing.
        let audit = audit_with(
            base + chrono::Duration::minutes(35),
            &[(SectionKind::TweetFeed, base + chrono::Duration::minutes(15))],
        );
        let v = count_tweet_violation(&audit, &timeline).unwrap();
        assert_eq!(v.direction, ViolationDirection::Past);
        assert_eq!(v.off_by_count, 2);
        assert!(v.violative);

        // Root at +15 min, feed at +25 min: the tweet at 20 should not be there.
        let audit = audit_with(
            base + chrono::Duration::minutes(15),
            &[(SectionKind::TweetFeed, base + chrono::Duration::minutes(25))],
        );
        let v = count_tweet_violation(&audit, &timeline).unwrap();
        assert_eq!(v.direction, ViolationDirection::Future);
        assert_eq!(v.off_by_count, 1);

        // Feed at the root instant: no violation.
        let audit = audit_with(
            base + chrono::Duration::minutes(15),
            &[(SectionKind::TweetFeed, base + chrono::Duration::minutes(15))],
        );
        assert_eq!(
            count_tweet_violation(&audit, &timeline).unwrap(),
            TweetViolation::none()
        );
    }

    #[test]
    fn violation_interval_endpoints() {
        let base = utc(2020, 8, 1, 0, 0, 0);
        let timeline = vec![tweet_at(base), tweet_at(base + chrono::Duration::minutes(10))];
        // Feed exactly at a tweet's creation: that tweet is in the feed,
        // not missing. Root exactly at the later tweet: that one counts.
        let audit = audit_with(
            base + chrono::Duration::minutes(10),
            &[(SectionKind::TweetFeed, base)],
        );
        let v = count_tweet_violation(&audit, &timeline).unwrap();
        assert_eq!(v.off_by_count, 1);
    }

    #[test]
    fn missing_feed_is_an_error() {
        let audit = audit_with(utc(2020, 8, 1, 0, 0, 0), &[(SectionKind::Bio, utc(2020, 8, 1, 0, 0, 0))]);
        assert_eq!(
            count_tweet_violation(&audit, &[]),
            Err(CoherenceError::MissingTweetFeed)
        );
    }

    #[test]
    fn stats_singleton_and_even_median() {
        let stats = delta_stats(&[42], ViolationDirection::Future, SdEstimator::Population).unwrap();
        assert_eq!(
            (stats.min, stats.max, stats.median, stats.mean, stats.sd),
            (42.0, 42.0, 42.0, 42.0, 0.0)
        );
        let stats =
            delta_stats(&[-1, -2, -3, -4], ViolationDirection::Past, SdEstimator::Population)
                .unwrap();
        assert_eq!(stats.median, 2.5);
        assert_eq!(stats.mean, 2.5);
    }

    #[test]
    fn stats_rejects_mixed_and_empty() {
        assert_eq!(
            delta_stats(&[], ViolationDirection::Past, SdEstimator::Population),
            Err(CoherenceError::EmptyInput)
        );
        assert_eq!(
            delta_stats(&[-1, 2], ViolationDirection::Past, SdEstimator::Population),
            Err(CoherenceError::MixedSigns)
        );
        assert_eq!(
            delta_stats(&[0, 1], ViolationDirection::Future, SdEstimator::Population),
            Err(CoherenceError::MixedSigns)
        );
    }

    #[test]
    fn ecdf_steps() {
        assert_eq!(ecdf(&[5]).unwrap(), vec![(5, 1.0)]);
        let steps = ecdf(&[1, 1, 3]).unwrap();
        assert_eq!(steps, vec![(1, 2.0 / 3.0), (3, 1.0)]);
        assert_eq!(ecdf(&[]), Err(CoherenceError::EmptyInput));
    }

    #[test]
    fn missed_updates_anchors() {
        assert_eq!(missed_whats_happening_updates(3600), 11);
        assert_eq!(missed_whats_happening_updates(-3600), 11);
        assert_eq!(missed_whats_happening_updates(0), 0);
        assert_eq!(missed_whats_happening_updates(301), 1);
        assert_eq!(missed_whats_happening_updates(300), 0);
    }
}
