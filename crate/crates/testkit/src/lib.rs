//! Test fixtures for the abandonment scanner: a standalone MRT/BGP frame
//! encoder and a synthetic registry corpus with hand-counted expectations.
//!
//! Nothing here calls into the scanner itself. The encoder builds wire
//! bytes straight from the MRT and BGP format definitions, and the corpus
//! writer produces plain files in documented layouts, so that tests compare
//! two independent implementations rather than a library against itself.

pub mod corpus;
pub mod mrt;

use chrono::NaiveDate;

/// Unix timestamp of midnight UTC on a calendar date.
pub fn unix_midnight(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp()
}

/// Hex SHA-256 of a byte string, used for cache object filenames.
pub fn sha256_hex(parts: &[&[u8]]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
