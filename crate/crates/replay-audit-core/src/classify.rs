//! Partitioning a memento corpus by UI generation.
//!
//! A server-rendered legacy page embeds its content in the root HTML, so
//! its response is much larger than the skeleton HTML of a client-rendered
//! page. A single content-length threshold therefore separates the two
//! generations once non-200 captures are set aside.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::memento::{MementoRecord, UiClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Captures strictly larger than this many bytes classify as old UI.
    pub content_length_threshold: u64,
    /// Statuses whose captures survive filtering (normally just 200).
    pub include_statuses: BTreeSet<u16>,
    /// Whether reports break the excluded captures down by status.
    pub excluded_statuses_reported: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let mut include_statuses = BTreeSet::new();
        include_statuses.insert(200);
        ClassifierConfig {
            content_length_threshold: 50_000,
            include_statuses,
            excluded_statuses_reported: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("record {0} has no http_status; fetch or index it first")]
    MissingStatus(String),
    #[error("record {0} has no content_length; fetch or index it first")]
    MissingContentLength(String),
    #[error("cannot calibrate a threshold from identical lengths")]
    DegenerateDistribution,
}

/// Counts for one corpus partition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPartition {
    pub total: u64,
    pub old_ui: u64,
    pub new_ui: u64,
    pub excluded: u64,
    /// Per-archive (old, new) breakdown of the kept captures.
    pub per_archive: BTreeMap<String, (u64, u64)>,
    /// Excluded captures by status, for the separate exclusion report.
    pub excluded_by_status: BTreeMap<u16, u64>,
}

impl CorpusPartition {
    /// The invariant every partition must satisfy.
    pub fn is_consistent(&self) -> bool {
        self.old_ui + self.new_ui + self.excluded == self.total
            && self.per_archive.values().map(|(o, _)| o).sum::<u64>() == self.old_ui
            && self.per_archive.values().map(|(_, n)| n).sum::<u64>() == self.new_ui
            && self.excluded_by_status.values().sum::<u64>() == self.excluded
    }
}

/// How many distinct resources have captures of each UI generation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiCoverage {
    pub only_old: u64,
    pub only_new: u64,
    pub both: u64,
    pub neither: u64,
}

impl UiCoverage {
    pub fn total(&self) -> u64 {
        self.only_old + self.only_new + self.both + self.neither
    }

    /// Percentages of the total, in the same field order.
    pub fn percentages(&self) -> (f64, f64, f64, f64) {
        let total = self.total();
        if total == 0 {
            return (0.0, 0.0, 0.0, 0.0);
        }
        let pct = |n: u64| n as f64 * 100.0 / total as f64;
        (
            pct(self.only_old),
            pct(self.only_new),
            pct(self.both),
            pct(self.neither),
        )
    }
}

/// Split records into those whose status is included and the remainder.
/// The two halves partition the input and preserve its order.
pub fn filter_by_status(
    records: Vec<MementoRecord>,
    cfg: &ClassifierConfig,
) -> Result<(Vec<MementoRecord>, Vec<MementoRecord>), ClassifyError> {
    if let Some(missing) = records.iter().find(|r| r.http_status.is_none()) {
        return Err(ClassifyError::MissingStatus(missing.ids.uri_m.clone()));
    }
    Ok(records
        .into_iter()
        .partition(|r| cfg.include_statuses.contains(&r.http_status.unwrap())))
}

/// Old UI iff the capture is strictly larger than the threshold; a capture
/// exactly at the threshold is new UI.
pub fn classify_ui(record: &MementoRecord, cfg: &ClassifierConfig) -> Result<UiClass, ClassifyError> {
    let length = record
        .content_length
        .ok_or_else(|| ClassifyError::MissingContentLength(record.ids.uri_m.clone()))?;
    Ok(if length > cfg.content_length_threshold {
        UiClass::OldUi
    } else {
        UiClass::NewUi
    })
}

/// Filter by status, classify the kept captures, and tally the partition.
/// Returns the kept records with `ui_class` filled in.
pub fn partition_corpus(
    records: Vec<MementoRecord>,
    cfg: &ClassifierConfig,
) -> Result<(Vec<MementoRecord>, CorpusPartition), ClassifyError> {
    let total = records.len() as u64;
    let (kept, excluded) = filter_by_status(records, cfg)?;
    let mut partition = CorpusPartition {
        total,
        excluded: excluded.len() as u64,
        ..CorpusPartition::default()
    };
    for record in &excluded {
        *partition
            .excluded_by_status
            .entry(record.http_status.unwrap())
            .or_insert(0) += 1;
    }
    let mut classified = Vec::with_capacity(kept.len());
    for mut record in kept {
        let class = classify_ui(&record, cfg)?;
        record.ui_class = class;
        let entry = partition
            .per_archive
            .entry(record.archive_id.clone())
            .or_insert((0, 0));
        match class {
            UiClass::OldUi => {
                partition.old_ui += 1;
                entry.0 += 1;
            }
            UiClass::NewUi => {
                partition.new_ui += 1;
                entry.1 += 1;
            }
            UiClass::Unknown => unreachable!("classify_ui never returns Unknown"),
        }
        classified.push(record);
    }
    debug_assert!(partition.is_consistent());
    Ok((classified, partition))
}

/// Pick a content-length threshold from observed lengths: an exact 1-D
/// 2-means split on log10(length), with the threshold at the geometric
/// midpoint of the gap between the clusters. Sorting first makes the
/// result independent of input order.
pub fn calibrate_threshold(lengths: &[u64]) -> Result<u64, ClassifyError> {
    let mut logs: Vec<f64> = lengths
        .iter()
        .map(|&l| libm::log10(l.max(1) as f64))
        .collect();
    logs.sort_by(|a, b| a.partial_cmp(b).expect("finite logs"));
    let n = logs.len();
    if n < 2 || logs[0] == logs[n - 1] {
        return Err(ClassifyError::DegenerateDistribution);
    }

    // Exact 2-means on sorted 1-D data: the optimal clusters are a prefix
    // and a suffix, so try every split point.
    let prefix: Vec<f64> = {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        for &v in &logs {
            acc += v;
            out.push(acc);
        }
        out
    };
    let prefix_sq: Vec<f64> = {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        for &v in &logs {
            acc += v * v;
            out.push(acc);
        }
        out
    };
    // Within-cluster sum of squares of logs[a..b).
    let wcss = |a: usize, b: usize| -> f64 {
        let count = (b - a) as f64;
        let sum = prefix[b] - prefix[a];
        let sum_sq = prefix_sq[b] - prefix_sq[a];
        sum_sq - sum * sum / count
    };
    let split = (1..n)
        .min_by(|&i, &j| {
            let ci = wcss(0, i) + wcss(i, n);
            let cj = wcss(0, j) + wcss(j, n);
            ci.partial_cmp(&cj).expect("finite cost")
        })
        .expect("n >= 2");
    let midpoint_log = (logs[split - 1] + logs[split]) / 2.0;
    Ok(libm::pow(10.0, midpoint_log) as u64)
}

/// Tally how many resources have only-old, only-new, both, or no classified
/// captures.
pub fn ui_coverage<K: Ord>(resource_to_mementos: &BTreeMap<K, Vec<MementoRecord>>) -> UiCoverage {
    let mut coverage = UiCoverage::default();
    for mementos in resource_to_mementos.values() {
        let has_old = mementos.iter().any(|m| m.ui_class == UiClass::OldUi);
        let has_new = mementos.iter().any(|m| m.ui_class == UiClass::NewUi);
        match (has_old, has_new) {
            (true, true) => coverage.both += 1,
            (true, false) => coverage.only_old += 1,
            (false, true) => coverage.only_new += 1,
            (false, false) => coverage.neither += 1,
        }
    }
    coverage
}
