//! Moderation-label audit logic: ground-truth tweet records, label-dataset
//! set relations, capture-window classification, engagement heuristics,
//! rollout-window bracketing, and categorization of archive-only tweet ids.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::memento::MementoRecord;
use crate::snowflake::TweetId;

/// The two moderation-label families audited here. Fact-check labels leave
/// engagement enabled; rule-violation labels restrict it to quote posts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelKind {
    FactCheck,
    Vtr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TweetKind {
    Tweet,
    Retweet,
}

/// Label metadata attached to a ground-truth tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelInfo {
    pub kind: LabelKind,
    /// When the label was applied, when a dataset records it.
    pub applied_at: Option<DateTime<Utc>>,
}

/// One ground-truth tweet, as ingested from an external timeline export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: TweetId,
    /// Creation instant, from the id's embedded timestamp.
    pub created_at: DateTime<Utc>,
    pub kind: TweetKind,
    pub retweet_count: Option<u64>,
    pub favorite_count: Option<u64>,
    pub label: Option<LabelInfo>,
    /// Datasets that list this tweet.
    pub source_datasets: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("capture instant precedes tweet creation")]
    CaptureBeforeCreation,
    #[error("tweet {0} has no engagement counts")]
    MissingCounts(u64),
    #[error("no memento statuses supplied for id {0}")]
    EmptyStatuses(u64),
}

/// Where a capture falls relative to the labelling of its tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureWindow {
    /// Captured after creation but before the label was applied.
    BeforeLabel,
    /// Captured at or after the instant the label was applied.
    AfterLabel,
    /// The label-application time is unknown, so the window cannot be told.
    Indeterminate,
}

/// Classify a capture at `captured_at` of a tweet created at `created_at`
/// and labeled at `labeled_at` (if known). A capture exactly at the
/// labelling instant counts as after it: the label was already visible.
pub fn classify_window(
    created_at: DateTime<Utc>,
    labeled_at: Option<DateTime<Utc>>,
    captured_at: DateTime<Utc>,
) -> Result<CaptureWindow, LabelError> {
    if captured_at < created_at {
        return Err(LabelError::CaptureBeforeCreation);
    }
    Ok(match labeled_at {
        Some(t2) if captured_at < t2 => CaptureWindow::BeforeLabel,
        Some(_) => CaptureWindow::AfterLabel,
        None => CaptureWindow::Indeterminate,
    })
}

/// Zero-engagement heuristic for restriction labels: an authored tweet that
/// can no longer be retweeted or liked shows zero for both counts. Retweets
/// are excluded because their counts mirror the original tweet.
pub fn vtr_candidate(record: &TweetRecord) -> Result<bool, LabelError> {
    let (Some(retweets), Some(favorites)) = (record.retweet_count, record.favorite_count) else {
        return Err(LabelError::MissingCounts(record.id.0));
    };
    Ok(record.kind == TweetKind::Tweet && retweets == 0 && favorites == 0)
}

/// Counts for one Venn region (an exact membership combination).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCount {
    pub total: u64,
    pub fact_check: u64,
    pub vtr: u64,
}

/// Exact-membership region counts over two or more id datasets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRelations {
    /// Region key: the sorted dataset ids an id belongs to (never empty).
    pub regions: BTreeMap<Vec<String>, RegionCount>,
    pub union: u64,
}

impl SetRelations {
    pub fn region(&self, datasets: &[&str]) -> RegionCount {
        let mut key: Vec<String> = datasets.iter().map(|s| String::from(*s)).collect();
        key.sort();
        self.regions.get(&key).cloned().unwrap_or_default()
    }
}

/// Compute every Venn region of the given datasets. When `label_kinds` is
/// supplied, each region also carries per-label sub-counts. All
/// 2^k − 1 membership combinations appear in the result, zero counts
/// included, so report tables have a stable shape.
pub fn dataset_relations(
    datasets: &BTreeMap<String, BTreeSet<TweetId>>,
    label_kinds: Option<&BTreeMap<TweetId, LabelKind>>,
) -> SetRelations {
    let names: Vec<&String> = datasets.keys().collect();
    debug_assert!(names.len() >= 2, "need at least two datasets");
    debug_assert!(names.len() <= 16, "region table would explode");

    let mut relations = SetRelations::default();
    // Pre-populate every combination so empty regions are visible.
    for mask in 1u32..(1 << names.len()) {
        let key: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| String::from(n.as_str()))
            .collect();
        relations.regions.insert(key, RegionCount::default());
    }

    let mut union: BTreeSet<TweetId> = BTreeSet::new();
    for ids in datasets.values() {
        union.extend(ids.iter().copied());
    }
    relations.union = union.len() as u64;

    for id in union {
        let key: Vec<String> = names
            .iter()
            .filter(|n| datasets[n.as_str()].contains(&id))
            .map(|n| String::from(n.as_str()))
            .collect();
        let region = relations.regions.get_mut(&key).expect("pre-populated");
        region.total += 1;
        match label_kinds.and_then(|m| m.get(&id)) {
            Some(LabelKind::FactCheck) => region.fact_check += 1,
            Some(LabelKind::Vtr) => region.vtr += 1,
            None => {}
        }
    }
    relations
}

/// The rollout window bracketed by a series of (capture instant, labeled)
/// observations of one tweet's legacy-UI captures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRolloutWindow {
    /// Earliest capture showing the label, if any did.
    pub first_labeled: Option<DateTime<Utc>>,
    /// Latest capture not showing it, if any did not.
    pub last_unlabeled: Option<DateTime<Utc>>,
}

pub fn old_ui_label_window(observations: &[(DateTime<Utc>, bool)]) -> LabelRolloutWindow {
    LabelRolloutWindow {
        first_labeled: observations
            .iter()
            .filter(|(_, labeled)| *labeled)
            .map(|(dt, _)| *dt)
            .min(),
        last_unlabeled: observations
            .iter()
            .filter(|(_, labeled)| !*labeled)
            .map(|(dt, _)| *dt)
            .max(),
    }
}

/// Third-party evidence available for an archive-only tweet id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corroboration {
    TweetCorroborated,
    RetweetCorroborated,
    None,
}

/// Why a tweet id appears in archives but not in the ground-truth dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscrepancyCategory {
    /// The id belongs to another account's tweet that was retweeted, so the
    /// archive only ever saw redirects.
    OriginalIdOtherAccount,
    RetweetId,
    TweetId,
    /// No working memento and no third-party evidence: authenticity unknown.
    Apocryphal,
}

/// Categorize an archive-only id from its memento statuses and whatever
/// third-party corroboration exists. An all-301 status history marks an
/// original id from another account regardless of corroboration.
pub fn categorize_discrepancy(
    id: TweetId,
    memento_statuses: &[u16],
    corroborated: Corroboration,
) -> Result<DiscrepancyCategory, LabelError> {
    if memento_statuses.is_empty() {
        return Err(LabelError::EmptyStatuses(id.0));
    }
    if memento_statuses.iter().all(|&s| s == 301) {
        return Ok(DiscrepancyCategory::OriginalIdOtherAccount);
    }
    Ok(match corroborated {
        Corroboration::TweetCorroborated => DiscrepancyCategory::TweetId,
        Corroboration::RetweetCorroborated => DiscrepancyCategory::RetweetId,
        Corroboration::None => DiscrepancyCategory::Apocryphal,
    })
}

/// One attempt at extracting the archived tweet payload from a memento.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractionAttempt {
    /// The request itself failed.
    Failed,
    /// The memento answered but did not replay the tweet payload.
    NotWorking,
    /// The payload replayed; `label_found` says whether the marker matched.
    Working { label_found: bool },
}

/// OR-combination of repeated extraction attempts: a memento is working if
/// any attempt replayed the payload, and the label counts as seen if any
/// working attempt showed it. `label_seen` is `None` for mementos that
/// never worked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub working: bool,
    pub label_seen: Option<bool>,
}

pub fn combine_attempts(attempts: &[ExtractionAttempt]) -> IterationSummary {
    let working = attempts
        .iter()
        .any(|a| matches!(a, ExtractionAttempt::Working { .. }));
    let label_seen = if working {
        Some(
            attempts
                .iter()
                .any(|a| matches!(a, ExtractionAttempt::Working { label_found: true })),
        )
    } else {
        None
    };
    IterationSummary {
        working,
        label_seen,
    }
}

/// Full audit state for one labeled tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAudit {
    pub tweet: TweetRecord,
    pub mementos: Vec<MementoRecord>,
    /// Per URI-M, the attempt outcomes in iteration order.
    pub attempts: BTreeMap<String, Vec<ExtractionAttempt>>,
    /// Per URI-M, the OR-combined summary.
    pub summaries: BTreeMap<String, IterationSummary>,
    /// Per URI-M, where the capture falls relative to labelling.
    pub window_class: BTreeMap<String, CaptureWindow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use chrono::TimeZone;

    fn utc(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, mo, d, h, mi, s).unwrap()
    }

    fn tweet(id: u64, rt: Option<u64>, fav: Option<u64>, kind: TweetKind) -> TweetRecord {
        TweetRecord {
            id: TweetId(id),
            created_at: utc(2020, 6, 1, 0, 0, 0),
            kind,
            retweet_count: rt,
            favorite_count: fav,
            label: None,
            source_datasets: BTreeSet::new(),
        }
    }

    #[test]
    fn window_classification_boundaries() {
        let t1 = utc(2020, 5, 26, 10, 0, 0);
        let t2 = utc(2020, 5, 26, 14, 0, 0);
        assert_eq!(
            classify_window(t1, Some(t2), utc(2020, 5, 26, 13, 0, 0)).unwrap(),
            CaptureWindow::BeforeLabel
        );
        assert_eq!(
            classify_window(t1, Some(t2), t2).unwrap(),
            CaptureWindow::AfterLabel
        );
        assert_eq!(
            classify_window(t1, None, utc(2020, 5, 27, 0, 0, 0)).unwrap(),
            CaptureWindow::Indeterminate
        );
        assert_eq!(
            classify_window(t1, Some(t2), utc(2020, 5, 26, 9, 59, 59)),
            Err(LabelError::CaptureBeforeCreation)
        );
    }

    #[test]
    fn vtr_heuristic() {
        assert!(vtr_candidate(&tweet(1, Some(0), Some(0), TweetKind::Tweet)).unwrap());
        assert!(!vtr_candidate(&tweet(2, Some(5), Some(0), TweetKind::Tweet)).unwrap());
        assert!(!vtr_candidate(&tweet(3, Some(0), Some(0), TweetKind::Retweet)).unwrap());
        assert_eq!(
            vtr_candidate(&tweet(4, None, Some(0), TweetKind::Tweet)),
            Err(LabelError::MissingCounts(4))
        );
    }

    #[test]
    fn two_disjoint_singletons() {
        let mut datasets = BTreeMap::new();
        datasets.insert("a".to_string(), BTreeSet::from([TweetId(1)]));
        datasets.insert("b".to_string(), BTreeSet::from([TweetId(2)]));
        let relations = dataset_relations(&datasets, None);
        assert_eq!(relations.union, 2);
        assert_eq!(relations.region(&["a"]).total, 1);
        assert_eq!(relations.region(&["b"]).total, 1);
        assert_eq!(relations.region(&["a", "b"]).total, 0);
    }

    #[test]
    fn subset_leaves_difference_empty() {
        let mut datasets = BTreeMap::new();
        datasets.insert("a".to_string(), BTreeSet::from([TweetId(1), TweetId(2)]));
        datasets.insert(
            "b".to_string(),
            BTreeSet::from([TweetId(1), TweetId(2), TweetId(3)]),
        );
        let relations = dataset_relations(&datasets, None);
        assert_eq!(relations.region(&["a"]).total, 0);
        assert_eq!(relations.region(&["a", "b"]).total, 2);
        assert_eq!(relations.region(&["b"]).total, 1);
        assert_eq!(relations.union, 3);
    }

    #[test]
    fn label_subcounts_fill_regions() {
        let mut datasets = BTreeMap::new();
        datasets.insert("a".to_string(), BTreeSet::from([TweetId(1), TweetId(2)]));
        datasets.insert("b".to_string(), BTreeSet::from([TweetId(2)]));
        let labels = BTreeMap::from([
            (TweetId(1), LabelKind::FactCheck),
            (TweetId(2), LabelKind::Vtr),
        ]);
        let relations = dataset_relations(&datasets, Some(&labels));
        assert_eq!(relations.region(&["a"]).fact_check, 1);
        assert_eq!(relations.region(&["a", "b"]).vtr, 1);
    }

    #[test]
    fn rollout_window_brackets() {
        let observations = vec![
            (utc(2020, 8, 1, 0, 0, 0), false),
            (utc(2020, 8, 26, 12, 0, 0), true),
            (utc(2020, 9, 1, 0, 0, 0), false),
            (utc(2020, 9, 9, 18, 0, 0), false),
            (utc(2020, 9, 10, 0, 0, 0), true),
        ];
        let window = old_ui_label_window(&observations);
        assert_eq!(window.first_labeled, Some(utc(2020, 8, 26, 12, 0, 0)));
        assert_eq!(window.last_unlabeled, Some(utc(2020, 9, 9, 18, 0, 0)));
    }

    #[test]
    fn rollout_window_degenerate_series() {
        let all_labeled = vec![(utc(2020, 9, 10, 0, 0, 0), true)];
        let window = old_ui_label_window(&all_labeled);
        assert_eq!(window.last_unlabeled, None);
        assert!(window.first_labeled.is_some());

        let all_unlabeled = vec![(utc(2020, 8, 1, 0, 0, 0), false)];
        let window = old_ui_label_window(&all_unlabeled);
        assert_eq!(window.first_labeled, None);
        assert!(window.last_unlabeled.is_some());
    }

    #[test]
    fn discrepancy_categories() {
        let id = TweetId(1);
        assert_eq!(
            categorize_discrepancy(id, &[301, 301], Corroboration::TweetCorroborated).unwrap(),
            DiscrepancyCategory::OriginalIdOtherAccount
        );
        assert_eq!(
            categorize_discrepancy(id, &[200], Corroboration::TweetCorroborated).unwrap(),
            DiscrepancyCategory::TweetId
        );
        assert_eq!(
            categorize_discrepancy(id, &[200, 404], Corroboration::RetweetCorroborated).unwrap(),
            DiscrepancyCategory::RetweetId
        );
        assert_eq!(
            categorize_discrepancy(id, &[200], Corroboration::None).unwrap(),
            DiscrepancyCategory::Apocryphal
        );
        assert_eq!(
            categorize_discrepancy(id, &[], Corroboration::None),
            Err(LabelError::EmptyStatuses(1))
        );
    }

    #[test]
    fn attempt_combination_is_an_or() {
        use ExtractionAttempt::*;
        assert_eq!(
            combine_attempts(&[Failed, Working { label_found: false }]),
            IterationSummary {
                working: true,
                label_seen: Some(false)
            }
        );
        assert_eq!(
            combine_attempts(&[Working { label_found: true }, Failed]),
            IterationSummary {
                working: true,
                label_seen: Some(true)
            }
        );
        assert_eq!(
            combine_attempts(&[Failed, NotWorking]),
            IterationSummary {
                working: false,
                label_seen: None
            }
        );
    }
}
