//! Expiry-date extraction from raw WHOIS bodies.

use chrono::NaiveDate;

use crate::error::{Result, ScanError};

/// What a WHOIS body says about a domain's registration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpirySignal {
    Expiry(NaiveDate),
    Unregistered,
    /// No recognizable expiry information.
    Absent,
}

/// Ordered expiry-field labels; the first line matching any of these wins.
const EXPIRY_LABELS: [&str; 9] = [
    "registry expiry date:",
    "registrar registration expiration date:",
    "expiration date:",
    "expiry date:",
    "paid-till:",
    "expire:",
    "expires:",
    "expires on:",
    "renewal date:",
];

/// Markers registries print for names that are not registered at all.
const UNREGISTERED_MARKERS: [&str; 6] = [
    "no match",
    "not found",
    "no entries found",
    "no data found",
    "status: available",
    "status: free",
];

/// Date formats tried in order; TLD-specific formats are tried first.
const DEFAULT_FORMATS: [&str; 7] = [
    "%Y-%m-%d", "%Y.%m.%d", "%Y/%m/%d", "%d.%m.%Y", "%d-%b-%Y", "%d-%m-%Y", "%d %b %Y",
];

fn tld_formats(tld: &str) -> &'static [&'static str] {
    match tld {
        // .ru/.su registries print "paid-till: 2014.09.01"
        "ru" | "su" => &["%Y.%m.%d", "%Y-%m-%d"],
        "de" => &["%Y-%m-%d"],
        "it" => &["%Y-%m-%d"],
        "uk" => &["%d-%b-%Y"],
        _ => &[],
    }
}

fn parse_date_token(token: &str, tld: &str) -> Option<NaiveDate> {
    // Datetime forms reduce to their date part.
    let token = token
        .split_once('T')
        .map(|(d, _)| d)
        .unwrap_or(token)
        .trim()
        .trim_end_matches('.');
    let token = token.split_whitespace().next()?;
    for fmt in tld_formats(tld).iter().chain(DEFAULT_FORMATS.iter()) {
        if let Ok(date) = NaiveDate::parse_from_str(token, fmt) {
            return Some(date);
        }
    }
    None
}

fn sane(date: NaiveDate) -> bool {
    (1985..=2200).contains(&date.year())
}

use chrono::Datelike;

/// Scans a WHOIS body for an expiry date or an unregistered marker.
///
/// The first line matching the label table decides; an unparseable date on
/// a matched line is an error carrying the offending line. Dates outside
/// [1985, 2200] are rejected as parse noise.
pub fn parse_expiry(body: &[u8], tld: &str) -> Result<ExpirySignal> {
    let text = String::from_utf8_lossy(body);
    for line in text.lines() {
        let trimmed = line.trim();
        let lower = trimmed.to_ascii_lowercase();
        for label in EXPIRY_LABELS {
            if let Some(rest) = lower.strip_prefix(label) {
                let raw = &trimmed[trimmed.len() - rest.len()..];
                match parse_date_token(raw, tld) {
                    Some(date) if sane(date) => return Ok(ExpirySignal::Expiry(date)),
                    Some(date) => {
                        return Err(ScanError::ExpiryOutOfRange(date.to_string()));
                    }
                    None if raw.trim().is_empty() => continue,
                    None => {
                        return Err(ScanError::ExpiryParse {
                            line: trimmed.to_string(),
                        })
                    }
                }
            }
        }
        for marker in UNREGISTERED_MARKERS {
            if lower.contains(marker) {
                return Ok(ExpirySignal::Unregistered);
            }
        }
    }
    Ok(ExpirySignal::Absent)
}
