//! Batch pipeline that hunts for hijackable Internet resources: address
//! blocks and AS numbers whose registry contact domains have expired while
//! the resources themselves sit unmaintained.
//!
//! The library is organized as a chain of pure stages — RPSL snapshot
//! parsing, maintainer grouping, WHOIS domain intelligence, registry change
//! history, BGP activity indexing, and final classification — orchestrated
//! by [`pipeline`] and driven by the `abandon-scan` binary.

pub mod activity;
pub mod classify;
pub mod config;
pub mod error;
pub mod groups;
pub mod mrt;
pub mod pipeline;
pub mod registry;
pub mod rpsl;
pub mod series;
pub mod whois;

pub use error::{Result, ScanError};
