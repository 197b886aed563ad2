//! Core types and algorithms for auditing the replay fidelity of archived
//! web pages: Memento-protocol domain types, TimeMap parsing and resolution,
//! snowflake id decoding, UI-generation classification, temporal-coherence
//! measures, and moderation-label audit logic.
//!
//! This crate is `no_std` (with `alloc`) and performs no IO. Everything
//! network- or file-shaped lives in the companion `replay-audit` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cdx;
pub mod classify;
pub mod coherence;
pub mod labels;
pub mod linkformat;
pub mod memento;
pub mod records;
pub mod replay_url;
pub mod snowflake;
pub mod variants;

pub use memento::{ArchivedResourceIds, MementoRecord, TimeMap, UiClass};
pub use snowflake::TweetId;
