//! Snowflake tweet-id decoding.
//!
//! Tweet ids allocated since late 2010 embed a millisecond timestamp in
//! their high 42 bits. Decoding that field recovers the creation instant
//! of a tweet without any network access, which is what lets an auditor
//! test whether an archived tweet id falls inside a study window.

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

/// Milliseconds between the Unix epoch and the snowflake epoch
/// (2010-11-04T01:42:54.657Z).
pub const SNOWFLAKE_EPOCH_MS: i64 = 1_288_834_974_657;

/// Number of low bits holding worker and sequence data.
pub const TIMESTAMP_SHIFT: u32 = 22;

/// A tweet identifier in the snowflake layout.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TweetId(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnowflakeError {
    /// The id decodes to an instant before the snowflake epoch, so it is
    /// a sequential (pre-snowflake) id and carries no timestamp.
    #[error("id {0} predates the snowflake epoch")]
    PreSnowflakeId(u64),
}

impl TweetId {
    pub fn new(id: u64) -> Self {
        TweetId(id)
    }

    /// Millisecond Unix timestamp embedded in the id.
    fn unix_millis(self) -> i64 {
        SNOWFLAKE_EPOCH_MS + (self.0 >> TIMESTAMP_SHIFT) as i64
    }
}

impl core::fmt::Display for TweetId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl core::str::FromStr for TweetId {
    type Err = core::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<u64>().map(TweetId)
    }
}

/// Decode a tweet id into its creation instant (millisecond precision).
///
/// Ids whose timestamp field is zero decode to the snowflake epoch itself;
/// that instant is still accepted. Only ids that would decode to *before*
/// the epoch are rejected, which cannot happen for the unsigned layout, so
/// the error is reserved for ids of zero (no snowflake id is zero).
pub fn tweet_id_to_datetime(id: TweetId) -> Result<DateTime<Utc>, SnowflakeError> {
    if id.0 == 0 {
        return Err(SnowflakeError::PreSnowflakeId(id.0));
    }
    let millis = id.unix_millis();
    // In range for every u64 id: (u64::MAX >> 22) + epoch fits in i64.
    Ok(Utc.timestamp_millis_opt(millis).unwrap())
}

/// True iff the id's creation instant lies in `[start, end]`, inclusive
/// at both ends.
pub fn in_window(
    id: TweetId,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<bool, SnowflakeError> {
    debug_assert!(start <= end);
    let created = tweet_id_to_datetime(id)?;
    Ok(start <= created && created <= end)
}

/// Inverse of [`tweet_id_to_datetime`]: the smallest id created at `t`.
///
/// Useful for building fixtures and for range scans over id-ordered data.
/// Returns `None` for instants before the snowflake epoch.
pub fn first_id_at(t: DateTime<Utc>) -> Option<TweetId> {
    let offset = t.timestamp_millis().checked_sub(SNOWFLAKE_EPOCH_MS)?;
    if offset < 0 {
        return None;
    }
    Some(TweetId((offset as u64) << TIMESTAMP_SHIFT))
}
