//! Per-group verdicts from domain status, registry activity and BGP
//! activity combined.

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::groups::MaintainerGroup;
use crate::rpsl::{slash24_equivalents, DomainName};
use crate::whois::{DomainRecord, DomainStatus};

/// Months are 30 days throughout the threshold arithmetic.
pub const DAYS_PER_MONTH: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// A registry or BGP signal within this window marks a group as still
    /// maintained. Default six months.
    pub maintained_window_days: u64,
    /// The "recently active" window reported for the bimodality gap
    /// statistic. Default three months.
    pub active_window_days: u64,
    /// Window after the epoch in which an expiry counts as imminent.
    pub expiring_soon_days: u64,
    /// Analysis epoch; all inactivity durations are measured back from
    /// here, never from wall-clock now.
    pub epoch: NaiveDate,
}

impl Thresholds {
    pub fn new(epoch: NaiveDate) -> Thresholds {
        Thresholds {
            maintained_window_days: 6 * DAYS_PER_MONTH,
            active_window_days: 3 * DAYS_PER_MONTH,
            expiring_soon_days: crate::whois::EXPIRING_SOON_DAYS,
            epoch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.maintained_window_days == 0
            || self.active_window_days == 0
            || self.expiring_soon_days == 0
        {
            return Err(ScanError::Config(
                "threshold windows must be positive".into(),
            ));
        }
        if self.active_window_days > self.maintained_window_days {
            return Err(ScanError::Config(
                "active_window must not exceed maintained_window".into(),
            ));
        }
        Ok(())
    }

    pub fn epoch_unix(&self) -> i64 {
        Utc.from_utc_datetime(&self.epoch.and_hms_opt(0, 0, 0).unwrap())
            .timestamp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Abandoned,
    ExpiredButActive,
    Maintained,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Abandoned => "Abandoned",
            Verdict::ExpiredButActive => "ExpiredButActive",
            Verdict::Maintained => "Maintained",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceVerdict {
    pub group_id: String,
    pub domain: DomainName,
    pub domain_status: DomainStatus,
    pub last_registry_change: Option<NaiveDate>,
    pub last_bgp_activity: Option<DateTime<Utc>>,
    /// Days since the most recent of the two signals; None means never
    /// active in the window (the maximal inactivity).
    pub combined_inactivity_days: Option<u64>,
    pub verdict: Verdict,
    pub inetnum_total: u64,
    pub slash24_total: u64,
    pub asn_total: u64,
    pub evidence: Vec<String>,
}

/// Days since the most recent of the two signals, i.e. the minimum of the
/// two time-since durations. Both absent means "never active in window".
/// Signals after the epoch clamp to zero.
pub fn combined_inactivity(
    last_registry: Option<NaiveDate>,
    last_bgp_unix: Option<i64>,
    epoch: NaiveDate,
) -> Option<u64> {
    let registry_days = last_registry.map(|d| (epoch - d).num_days().max(0) as u64);
    let epoch_unix = Utc
        .from_utc_datetime(&epoch.and_hms_opt(0, 0, 0).unwrap())
        .timestamp();
    let bgp_days = last_bgp_unix.map(|ts| ((epoch_unix - ts).max(0) as u64) / 86_400);
    match (registry_days, bgp_days) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// Classifies one candidate group.
///
/// Decision table: an effectively expired domain (Expired or Unregistered)
/// with inactivity at or beyond the maintained window (or never active) is
/// Abandoned, otherwise ExpiredButActive. A non-expired domain is
/// Maintained when any signal falls within the window, else Indeterminate.
pub fn classify(
    group: &MaintainerGroup,
    domain_record: &DomainRecord,
    last_registry: Option<NaiveDate>,
    last_bgp_unix: Option<i64>,
    thresholds: &Thresholds,
) -> Result<ResourceVerdict> {
    if group.inetnums.is_empty() && group.aut_nums.is_empty() {
        return Err(ScanError::Precondition(format!(
            "group {} holds no hijackable resources; it must have been filtered",
            group.group_id
        )));
    }

    let inactivity = combined_inactivity(last_registry, last_bgp_unix, thresholds.epoch);
    let mut evidence = Vec::new();

    // Unregistered satisfies re-registrability maximally; for the verdict
    // it is folded into Expired.
    let effective_status = match domain_record.status {
        DomainStatus::Unregistered => {
            evidence.push(format!(
                "domain {} is unregistered (immediately re-registrable)",
                domain_record.domain
            ));
            DomainStatus::Expired
        }
        other => other,
    };

    match (domain_record.status, domain_record.expiry_date) {
        (DomainStatus::Unregistered, _) => {}
        (_, Some(date)) => evidence.push(format!(
            "domain {} expiry date {date} is {} relative to epoch {}",
            domain_record.domain,
            effective_status.as_str(),
            thresholds.epoch
        )),
        (_, None) => evidence.push(format!(
            "domain {} has no known expiry date (status {})",
            domain_record.domain,
            effective_status.as_str()
        )),
    }
    if domain_record.status == DomainStatus::ExpiringSoon {
        evidence.push(format!(
            "warning: domain {} expires within {} days of the epoch",
            domain_record.domain, thresholds.expiring_soon_days
        ));
    }

    match last_registry {
        Some(date) => evidence.push(format!("last registry change {date}")),
        None => evidence.push("no registry change in observation window".to_string()),
    }
    match last_bgp_unix {
        Some(ts) => evidence.push(format!(
            "last BGP activity {}",
            Utc.timestamp_opt(ts, 0).single().map_or_else(
                || ts.to_string(),
                |t| t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
            )
        )),
        None => evidence.push("never observed in BGP during analysis window".to_string()),
    }
    match inactivity {
        Some(days) => evidence.push(format!(
            "combined inactivity {days} days (maintained window {} days)",
            thresholds.maintained_window_days
        )),
        None => evidence.push("no activity signal at all in window".to_string()),
    }

    let inactive_beyond_window =
        inactivity.is_none_or(|days| days >= thresholds.maintained_window_days);
    let verdict = if effective_status == DomainStatus::Expired {
        if inactive_beyond_window {
            Verdict::Abandoned
        } else {
            Verdict::ExpiredButActive
        }
    } else if !inactive_beyond_window {
        Verdict::Maintained
    } else {
        Verdict::Indeterminate
    };

    Ok(ResourceVerdict {
        group_id: group.group_id.clone(),
        domain: domain_record.domain.clone(),
        domain_status: effective_status,
        last_registry_change: last_registry,
        last_bgp_activity: last_bgp_unix.and_then(|ts| Utc.timestamp_opt(ts, 0).single()),
        combined_inactivity_days: inactivity,
        verdict,
        inetnum_total: group.inetnums.len() as u64,
        slash24_total: group.inetnums.iter().map(slash24_equivalents).sum(),
        asn_total: group.aut_nums.len() as u64,
        evidence,
    })
}

/// Per-verdict totals plus detail for the Abandoned cohort.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub abandoned_groups: u64,
    pub expired_but_active_groups: u64,
    pub maintained_groups: u64,
    pub indeterminate_groups: u64,
    pub abandoned_inetnum_objects: u64,
    pub abandoned_slash24_equivalents: u64,
    pub abandoned_autnum_objects: u64,
    pub slash24_equivalents_total: u64,
    pub asn_objects_total: u64,
    /// Expired groups whose inactivity falls between the active and
    /// maintained windows; nonzero values weaken the bimodality claim.
    pub activity_gap_groups: u64,
}

pub fn summarize(verdicts: &[ResourceVerdict], thresholds: &Thresholds) -> Summary {
    let mut summary = Summary::default();
    for v in verdicts {
        summary.slash24_equivalents_total += v.slash24_total;
        summary.asn_objects_total += v.asn_total;
        match v.verdict {
            Verdict::Abandoned => {
                summary.abandoned_groups += 1;
                summary.abandoned_inetnum_objects += v.inetnum_total;
                summary.abandoned_slash24_equivalents += v.slash24_total;
                summary.abandoned_autnum_objects += v.asn_total;
            }
            Verdict::ExpiredButActive => summary.expired_but_active_groups += 1,
            Verdict::Maintained => summary.maintained_groups += 1,
            Verdict::Indeterminate => summary.indeterminate_groups += 1,
        }
        if v.domain_status.is_effectively_expired() {
            if let Some(days) = v.combined_inactivity_days {
                if days >= thresholds.active_window_days && days < thresholds.maintained_window_days
                {
                    summary.activity_gap_groups += 1;
                }
            }
        }
    }
    summary
}
