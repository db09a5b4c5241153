//! Last-seen activity index over announced prefixes and AS-path members,
//! with interval lookups against inetnum address ranges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::groups::MaintainerGroup;
use crate::mrt::{BgpUpdateRecord, Cidr};
use crate::rpsl::{AddressRange, AsNumber};

/// How inetnum ranges are matched against announced prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    /// Any intersection counts; covering aggregates announced by third
    /// parties mark the range active. The anti-false-abandoned default.
    #[default]
    Overlap,
    /// Only prefixes fully inside the range count.
    Within,
}

/// Max-merged last-seen timestamps for prefixes and AS numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityIndex {
    prefix_last_seen: BTreeMap<Cidr, u64>,
    asn_last_seen: BTreeMap<AsNumber, u64>,
    window: Option<(u64, u64)>,
}

impl ActivityIndex {
    pub fn new() -> ActivityIndex {
        ActivityIndex::default()
    }

    pub fn window(&self) -> Option<(u64, u64)> {
        self.window
    }

    pub fn prefix_entries(&self) -> impl Iterator<Item = (&Cidr, &u64)> {
        self.prefix_last_seen.iter()
    }

    pub fn asn_entries(&self) -> impl Iterator<Item = (&AsNumber, &u64)> {
        self.asn_last_seen.iter()
    }

    pub fn len(&self) -> usize {
        self.prefix_last_seen.len() + self.asn_last_seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix_last_seen.is_empty() && self.asn_last_seen.is_empty()
    }

    fn extend_window(&mut self, timestamp: u64) {
        self.window = Some(match self.window {
            None => (timestamp, timestamp),
            Some((start, end)) => (start.min(timestamp), end.max(timestamp)),
        });
    }

    pub fn insert_prefix(&mut self, prefix: Cidr, timestamp: u64) {
        let slot = self.prefix_last_seen.entry(prefix).or_insert(timestamp);
        *slot = (*slot).max(timestamp);
        self.extend_window(timestamp);
    }

    pub fn insert_asn(&mut self, asn: AsNumber, timestamp: u64) {
        let slot = self.asn_last_seen.entry(asn).or_insert(timestamp);
        *slot = (*slot).max(timestamp);
        self.extend_window(timestamp);
    }

    /// Folds one update in: every announced prefix and every AS on the path
    /// is stamped with the record timestamp (max-merge). Withdrawals update
    /// neither map but extend the window.
    pub fn observe(&mut self, record: &BgpUpdateRecord) {
        self.extend_window(record.timestamp);
        for prefix in &record.announced {
            self.insert_prefix(*prefix, record.timestamp);
        }
        if !record.announced.is_empty() {
            let mut seen: Vec<AsNumber> = record.as_path.clone();
            seen.sort_unstable();
            seen.dedup();
            for asn in seen {
                self.insert_asn(asn, record.timestamp);
            }
        }
    }

    /// Pointwise-max merge; deterministic and associative, so partial
    /// indexes from parallel decoders can combine in any order.
    pub fn merge(&mut self, other: &ActivityIndex) {
        for (prefix, ts) in &other.prefix_last_seen {
            self.insert_prefix(*prefix, *ts);
        }
        for (asn, ts) in &other.asn_last_seen {
            self.insert_asn(*asn, *ts);
        }
        if let Some((start, end)) = other.window {
            self.extend_window(start);
            self.extend_window(end);
        }
    }

    pub fn asn_last_seen(&self, asn: AsNumber) -> Option<u64> {
        self.asn_last_seen.get(&asn).copied()
    }

    /// Latest announcement over all indexed prefixes matching the range
    /// under the given mode.
    pub fn range_last_seen(&self, range: &AddressRange, mode: MatchMode) -> Option<u64> {
        let mut best: Option<u64> = None;
        let mut consider = |ts: u64| best = Some(best.map_or(ts, |b: u64| b.max(ts)));

        // prefixes whose base lies inside the range
        for (prefix, ts) in self.prefix_last_seen.range(
            Cidr {
                base: range.start,
                len: 0,
            }..=Cidr {
                base: range.end,
                len: 32,
            },
        ) {
            match mode {
                MatchMode::Overlap => consider(*ts),
                MatchMode::Within => {
                    let (_, end) = prefix.interval();
                    if end <= range.end {
                        consider(*ts);
                    }
                }
            }
        }
        // prefixes starting before the range can only match by containing
        // its start, i.e. as CIDR ancestors of range.start
        if mode == MatchMode::Overlap {
            for len in 0..=32u8 {
                if let Some(ancestor) = Cidr::new(range.start, len) {
                    if ancestor.base < range.start {
                        if let Some(ts) = self.prefix_last_seen.get(&ancestor) {
                            consider(*ts);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Builds an index from decoded updates. Order-independent: max-merge is
/// commutative and associative.
pub fn index_activity<'a>(records: impl IntoIterator<Item = &'a BgpUpdateRecord>) -> ActivityIndex {
    let mut index = ActivityIndex::new();
    for record in records {
        index.observe(record);
    }
    index
}

/// True iff the prefix's address interval intersects the range's interval.
pub fn prefix_overlaps(range: &AddressRange, prefix: &Cidr) -> bool {
    let (start, end) = prefix.interval();
    range.start <= end && start <= range.end
}

/// Latest activity over the group's prefixes and AS numbers; None when
/// nothing was ever observed in the window.
pub fn last_bgp_activity(
    group: &MaintainerGroup,
    index: &ActivityIndex,
    mode: MatchMode,
) -> Option<u64> {
    let prefix_best = group
        .inetnums
        .iter()
        .filter_map(|range| index.range_last_seen(range, mode))
        .max();
    let asn_best = group
        .aut_nums
        .iter()
        .filter_map(|asn| index.asn_last_seen(*asn))
        .max();
    prefix_best.max(asn_best)
}
