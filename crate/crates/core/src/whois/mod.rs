//! Domain expiry intelligence: WHOIS queries with caching and rate
//! limiting, per-TLD expiry parsing, and status classification against an
//! explicit analysis epoch.

mod cache;
mod client;
mod expiry;

pub use cache::{CachedResponse, WhoisCache};
pub use client::{query_whois, Clock, RateLimiter, SystemClock, WhoisClientConfig};
pub use expiry::{parse_expiry, ExpirySignal};

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::rpsl::DomainName;

/// Days after the epoch within which an expiry counts as imminent.
pub const EXPIRING_SOON_DAYS: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DomainStatus {
    Valid,
    Expired,
    ExpiringSoon,
    Unregistered,
    Unknown,
}

impl DomainStatus {
    /// Whether the name is re-registrable by an attacker right now.
    pub fn is_effectively_expired(&self) -> bool {
        matches!(self, DomainStatus::Expired | DomainStatus::Unregistered)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DomainStatus::Valid => "Valid",
            DomainStatus::Expired => "Expired",
            DomainStatus::ExpiringSoon => "ExpiringSoon",
            DomainStatus::Unregistered => "Unregistered",
            DomainStatus::Unknown => "Unknown",
        }
    }
}

/// WHOIS-derived registration state of one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub domain: DomainName,
    pub expiry_date: Option<NaiveDate>,
    pub queried_at: NaiveDate,
    pub status: DomainStatus,
    /// Cache object file holding the raw response, when one exists.
    pub raw_source: Option<String>,
}

/// One WHOIS exchange. The body is preserved byte-exact for cache fidelity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhoisResponse {
    pub server: String,
    pub body: Vec<u8>,
    pub referral: Option<String>,
}

/// Classifies an expiry signal against the analysis epoch.
///
/// Expired strictly before the epoch; ExpiringSoon inside the inclusive
/// `[epoch, epoch + 7d]` window; Valid beyond it. An unregistered name has
/// no date but is immediately re-registrable; no signal at all is Unknown.
pub fn classify_domain(
    expiry: Option<NaiveDate>,
    unregistered: bool,
    epoch: NaiveDate,
) -> DomainStatus {
    if unregistered {
        return DomainStatus::Unregistered;
    }
    match expiry {
        None => DomainStatus::Unknown,
        Some(date) => {
            if date < epoch {
                DomainStatus::Expired
            } else if date <= epoch + Days::new(EXPIRING_SOON_DAYS) {
                DomainStatus::ExpiringSoon
            } else {
                DomainStatus::Valid
            }
        }
    }
}

/// Per-TLD frequency row: `(tld, count, percent in hundredths)`.
pub type TldRow = (String, u64, u64);

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpiryHistogram {
    /// Expiry-date counts over records that carry a date, ascending.
    pub per_date: Vec<(NaiveDate, u64)>,
    /// TLD frequencies over all records, descending by count.
    pub tld_all: Vec<TldRow>,
    /// TLD frequencies over effectively-expired records only.
    pub tld_expired: Vec<TldRow>,
}

fn tld_table(domains: impl Iterator<Item = String>) -> Vec<TldRow> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for tld in domains {
        *counts.entry(tld).or_default() += 1;
        total += 1;
    }
    let mut rows: Vec<TldRow> = counts
        .into_iter()
        .map(|(tld, count)| {
            let pct = if total == 0 {
                0
            } else {
                (count * 10000 * 2 + total) / (2 * total)
            };
            (tld, count, pct)
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    rows
}

/// Expiry-date distribution plus TLD frequency tables (all and
/// expired-only).
pub fn expiry_histogram(records: &[DomainRecord]) -> ExpiryHistogram {
    let mut per_date: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for rec in records {
        if let Some(date) = rec.expiry_date {
            *per_date.entry(date).or_default() += 1;
        }
    }
    ExpiryHistogram {
        per_date: per_date.into_iter().collect(),
        tld_all: tld_table(records.iter().map(|r| r.domain.tld().to_string())),
        tld_expired: tld_table(
            records
                .iter()
                .filter(|r| r.status.is_effectively_expired())
                .map(|r| r.domain.tld().to_string()),
        ),
    }
}
