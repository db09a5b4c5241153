//! Administrative activity from dated snapshot diffs, with automated
//! bulk-update batches filtered out.

use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::groups::MaintainerGroup;
use crate::rpsl::{ObjectClass, RpslObject};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    Added,
    Modified,
    Removed,
}

impl ChangeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChangeKind::Added => "Added",
            ChangeKind::Modified => "Modified",
            ChangeKind::Removed => "Removed",
        }
    }
}

/// One observed change of a registry object, dated at the later snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChangeEvent {
    pub object_class: ObjectClass,
    pub primary_key: String,
    pub date: NaiveDate,
    pub kind: ChangeKind,
}

/// Diffs two dated snapshots by object key and content digest.
///
/// Keys only in `next` are Added, only in `prev` Removed, present in both
/// with differing digests Modified. All events carry `next_date`.
pub fn diff_snapshots(
    prev: &[RpslObject],
    prev_date: NaiveDate,
    next: &[RpslObject],
    next_date: NaiveDate,
) -> Result<Vec<ChangeEvent>> {
    if prev_date >= next_date {
        return Err(ScanError::Precondition(format!(
            "snapshot dates must increase: {prev_date} !< {next_date}"
        )));
    }
    let prev_map: HashMap<(ObjectClass, &str), &RpslObject> = prev
        .iter()
        .map(|o| ((o.object_class, o.primary_key.as_str()), o))
        .collect();
    let next_map: HashMap<(ObjectClass, &str), &RpslObject> = next
        .iter()
        .map(|o| ((o.object_class, o.primary_key.as_str()), o))
        .collect();

    let mut events = Vec::new();
    for ((class, key), obj) in &next_map {
        match prev_map.get(&(*class, key)) {
            None => events.push(ChangeEvent {
                object_class: *class,
                primary_key: key.to_string(),
                date: next_date,
                kind: ChangeKind::Added,
            }),
            Some(old) if old.content_digest != obj.content_digest => events.push(ChangeEvent {
                object_class: *class,
                primary_key: key.to_string(),
                date: next_date,
                kind: ChangeKind::Modified,
            }),
            Some(_) => {}
        }
    }
    for (class, key) in prev_map.keys() {
        if !next_map.contains_key(&(*class, *key)) {
            events.push(ChangeEvent {
                object_class: *class,
                primary_key: key.to_string(),
                date: next_date,
                kind: ChangeKind::Removed,
            });
        }
    }
    events.sort();
    Ok(events)
}

/// One excluded automated sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkBatch {
    pub date: NaiveDate,
    pub object_class: ObjectClass,
    pub changed_count: u64,
    pub class_total: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BulkFilterReport {
    pub excluded_batches: Vec<BulkBatch>,
}

/// Excludes Modified batches that touched at least `threshold` of a class
/// on one day. Added/Removed events are never bulk-filtered.
pub fn detect_bulk_updates(
    events: Vec<ChangeEvent>,
    class_totals: &BTreeMap<ObjectClass, u64>,
    threshold: f64,
) -> (Vec<ChangeEvent>, BulkFilterReport) {
    debug_assert!(threshold > 0.0 && threshold <= 1.0);
    let threshold_bp = (threshold * 10_000.0).round() as u64;

    let mut modified: BTreeMap<(NaiveDate, ObjectClass), u64> = BTreeMap::new();
    for ev in &events {
        if ev.kind == ChangeKind::Modified {
            *modified.entry((ev.date, ev.object_class)).or_default() += 1;
        }
    }

    let mut report = BulkFilterReport::default();
    let mut excluded: std::collections::BTreeSet<(NaiveDate, ObjectClass)> = Default::default();
    for ((date, class), count) in &modified {
        let total = class_totals.get(class).copied().unwrap_or(0);
        if total > 0 && count * 10_000 >= threshold_bp * total {
            excluded.insert((*date, *class));
            report.excluded_batches.push(BulkBatch {
                date: *date,
                object_class: *class,
                changed_count: *count,
                class_total: total,
                fraction: *count as f64 / total as f64,
            });
        }
    }

    let filtered = events
        .into_iter()
        .filter(|ev| {
            ev.kind != ChangeKind::Modified || !excluded.contains(&(ev.date, ev.object_class))
        })
        .collect();
    (filtered, report)
}

/// Latest (bulk-filtered) event date over the group's members; None when no
/// member ever changed in the observation window.
pub fn last_registry_change(group: &MaintainerGroup, events: &[ChangeEvent]) -> Option<NaiveDate> {
    events
        .iter()
        .filter(|ev| {
            group
                .member_objects
                .contains(&(ev.object_class, ev.primary_key.clone()))
        })
        .map(|ev| ev.date)
        .max()
}

/// Empirical CDF over per-group inactivity durations (days since epoch of
/// the last signal). `None` values are a "never" bucket sorted beyond every
/// finite duration.
pub fn activity_cdf(values: &[Option<u64>]) -> Vec<(Option<u64>, f64)> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<Option<u64>> = values.to_vec();
    // None (never) beyond any finite duration
    sorted.sort_by_key(|v| match v {
        Some(d) => (0u8, *d),
        None => (1, 0),
    });
    let n = sorted.len() as f64;
    let mut out: Vec<(Option<u64>, f64)> = Vec::new();
    let mut seen = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i];
        while i < sorted.len() && sorted[i] == value {
            i += 1;
            seen += 1;
        }
        out.push((value, seen as f64 / n));
    }
    out
}
