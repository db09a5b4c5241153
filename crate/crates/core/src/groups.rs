//! Maintainer grouping: objects sharing a mntner reference form one
//! administrative authority, merged across mntners referencing the same
//! domain, then narrowed to groups holding hijackable resources.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::rpsl::{extract_domains, AddressRange, AsNumber, DomainName, ObjectClass, RpslObject};

pub type ObjectRef = (ObjectClass, String);

/// All objects under one administrative authority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaintainerGroup {
    pub group_id: String,
    pub mntner_keys: BTreeSet<String>,
    pub member_objects: BTreeSet<ObjectRef>,
    pub domains: BTreeSet<DomainName>,
    pub inetnums: BTreeSet<AddressRange>,
    pub aut_nums: BTreeSet<AsNumber>,
    /// True when the mntner key was only ever seen as a reference, never as
    /// a mntner object in the snapshot.
    pub dangling: bool,
}

impl MaintainerGroup {
    fn new(mntner_key: String, dangling: bool) -> MaintainerGroup {
        MaintainerGroup {
            group_id: mntner_key.clone(),
            mntner_keys: BTreeSet::from([mntner_key]),
            member_objects: BTreeSet::new(),
            domains: BTreeSet::new(),
            inetnums: BTreeSet::new(),
            aut_nums: BTreeSet::new(),
            dangling,
        }
    }

    pub fn size(&self) -> usize {
        self.member_objects.len()
    }

    /// The single domain of a post-cascade group.
    pub fn single_domain(&self) -> Option<&DomainName> {
        if self.domains.len() == 1 {
            self.domains.iter().next()
        } else {
            None
        }
    }

    fn absorb(&mut self, other: MaintainerGroup) {
        self.mntner_keys.extend(other.mntner_keys);
        self.member_objects.extend(other.member_objects);
        self.domains.extend(other.domains);
        self.inetnums.extend(other.inetnums);
        self.aut_nums.extend(other.aut_nums);
        self.dangling = self.dangling && other.dangling;
        self.group_id = self.mntner_keys.iter().next().unwrap().clone();
    }
}

/// Counters for every step of the discard/merge cascade.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub initial_groups: u64,
    pub discarded_zero_size: u64,
    pub discarded_no_domain: u64,
    pub discarded_multi_domain: u64,
    pub pre_merge_survivors: u64,
    pub merged_groups: u64,
    pub hijackable_groups: u64,
}

impl CascadeReport {
    /// The arithmetic identity every report must satisfy.
    pub fn is_consistent(&self) -> bool {
        self.initial_groups
            == self.discarded_zero_size
                + self.discarded_no_domain
                + self.discarded_multi_domain
                + self.pre_merge_survivors
            && self.merged_groups <= self.pre_merge_survivors
            && self.hijackable_groups <= self.merged_groups
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuildOutcome {
    pub groups: Vec<MaintainerGroup>,
    /// mnt-by references whose mntner object is absent from the snapshot.
    pub dangling_refs: u64,
}

fn mnt_by_keys(object: &RpslObject) -> BTreeSet<String> {
    object
        .values("mnt-by")
        .flat_map(|v| v.split(','))
        .map(|v| v.trim())
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect()
}

/// Groups objects by mnt-by reference: one group per mntner, an object with
/// k references joins all k groups. Unreferenced mntner objects yield
/// zero-size groups; references to absent mntners form dangling groups.
pub fn build_groups<'a>(objects: impl IntoIterator<Item = &'a RpslObject>) -> BuildOutcome {
    let objects: Vec<&RpslObject> = objects.into_iter().collect();
    let mut present_mntners: BTreeSet<String> = BTreeSet::new();
    for obj in &objects {
        if obj.object_class == ObjectClass::Mntner {
            present_mntners.insert(obj.primary_key.clone());
        }
    }

    let mut groups: BTreeMap<String, MaintainerGroup> = present_mntners
        .iter()
        .map(|k| (k.clone(), MaintainerGroup::new(k.clone(), false)))
        .collect();
    let mut dangling_refs = 0;

    for obj in &objects {
        for key in mnt_by_keys(obj) {
            let group = groups.entry(key.clone()).or_insert_with(|| {
                dangling_refs += 1;
                MaintainerGroup::new(key, true)
            });
            group.member_objects.insert(obj.object_key());
            for domain in extract_domains(obj) {
                group.domains.insert(domain);
            }
            if let Some(range) = obj.address_range() {
                group.inetnums.insert(range);
            }
            if let Some(asn) = obj.as_number() {
                group.aut_nums.insert(asn);
            }
        }
    }

    BuildOutcome {
        groups: groups.into_values().collect(),
        dangling_refs,
    }
}

/// Applies the discard cascade and merges survivors that reference the same
/// single domain.
///
/// Order: discard zero-size groups, then groups without domain references,
/// then groups referencing more than one domain; finally union-merge the
/// survivors by their single domain.
pub fn merge_by_domain(groups: Vec<MaintainerGroup>) -> (Vec<MaintainerGroup>, CascadeReport) {
    let mut report = CascadeReport {
        initial_groups: groups.len() as u64,
        ..CascadeReport::default()
    };

    let mut by_domain: BTreeMap<DomainName, MaintainerGroup> = BTreeMap::new();
    for group in groups {
        if group.size() == 0 {
            report.discarded_zero_size += 1;
            continue;
        }
        if group.domains.is_empty() {
            report.discarded_no_domain += 1;
            continue;
        }
        if group.domains.len() > 1 {
            report.discarded_multi_domain += 1;
            continue;
        }
        report.pre_merge_survivors += 1;
        let domain = group.single_domain().unwrap().clone();
        match by_domain.entry(domain) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(group);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().absorb(group);
            }
        }
    }

    let merged: Vec<MaintainerGroup> = by_domain.into_values().collect();
    report.merged_groups = merged.len() as u64;
    (merged, report)
}

/// Retains exactly the groups holding at least one inetnum or aut-num.
/// Group contents are never altered.
pub fn filter_hijackable(groups: Vec<MaintainerGroup>) -> Vec<MaintainerGroup> {
    groups
        .into_iter()
        .filter(|g| !g.inetnums.is_empty() || !g.aut_nums.is_empty())
        .collect()
}

/// CCDF over group sizes: fraction of groups at least as large as each
/// distinct size. Sizes strictly increasing, fractions in (0, 1].
pub fn group_size_series(groups: &[MaintainerGroup]) -> Vec<(u64, f64)> {
    if groups.is_empty() {
        return Vec::new();
    }
    let mut sizes: Vec<u64> = groups.iter().map(|g| g.size() as u64).collect();
    sizes.sort_unstable();
    let n = sizes.len() as f64;
    let mut out: Vec<(u64, f64)> = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        let size = sizes[i];
        // count of groups with size >= this size
        let at_least = sizes.len() - i;
        out.push((size, at_least as f64 / n));
        while i < sizes.len() && sizes[i] == size {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpsl::parse_snapshot;
    use chrono::NaiveDate;

    fn parse(text: &str) -> Vec<RpslObject> {
        parse_snapshot(
            text.as_bytes(),
            NaiveDate::from_ymd_opt(2014, 7, 9).unwrap(),
        )
        .unwrap()
        .objects
    }

    const FIG1: &str = "\
inetnum:     194.28.196.0 - 194.28.199.255
netname:     UA-VELES
notify:      internet@veles-isp.com.ua
mnt-by:      VELES-MNT

aut-num:     AS51016
as-name:     VALES
notify:      internet@veles-isp.com.ua
mnt-by:      VELES-MNT
";

    #[test]
    fn fig1_objects_form_one_group() {
        let objects = parse(FIG1);
        let outcome = build_groups(&objects);
        assert_eq!(outcome.groups.len(), 1);
        let g = &outcome.groups[0];
        assert_eq!(g.inetnums.len(), 1);
        assert_eq!(g.aut_nums.len(), 1);
        assert_eq!(
            g.domains.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            vec!["veles-isp.com.ua"]
        );
        assert!(g.dangling);
        assert_eq!(outcome.dangling_refs, 1);
    }

    #[test]
    fn mntner_without_references_is_zero_size() {
        let objects = parse("mntner: LONELY-MNT\ndescr: nobody references me\n");
        let outcome = build_groups(&objects);
        assert_eq!(outcome.groups.len(), 1);
        assert_eq!(outcome.groups[0].size(), 0);
        assert_eq!(outcome.dangling_refs, 0);
    }

    #[test]
    fn multi_mnt_by_joins_all_groups() {
        let text = "mntner: A\n\nmntner: B\n\nrole: R\nmnt-by: A\nmnt-by: B\n";
        let objects = parse(text);
        let outcome = build_groups(&objects);
        let by_id: BTreeMap<_, _> = outcome
            .groups
            .iter()
            .map(|g| (g.group_id.clone(), g))
            .collect();
        let key = (ObjectClass::Role, "R".to_string());
        assert!(by_id["A"].member_objects.contains(&key));
        assert!(by_id["B"].member_objects.contains(&key));
    }

    #[test]
    fn cascade_counts_each_discard_once() {
        let text = "\
mntner: ZERO

mntner: NODOM

role: R1
mnt-by: NODOM

mntner: MULTI

role: R2
notify: a@a.com
notify: b@b.com
mnt-by: MULTI

mntner: KEEP

inetnum: 10.0.0.0 - 10.0.0.255
notify: c@d.com
mnt-by: KEEP
";
        let outcome = build_groups(&parse(text));
        let (merged, report) = merge_by_domain(outcome.groups);
        assert_eq!(report.initial_groups, 4);
        assert_eq!(report.discarded_zero_size, 1);
        assert_eq!(report.discarded_no_domain, 1);
        assert_eq!(report.discarded_multi_domain, 1);
        assert_eq!(report.pre_merge_survivors, 1);
        assert_eq!(report.merged_groups, 1);
        assert!(report.is_consistent());
        assert_eq!(merged.len(), 1);
    }

    #[test]
    fn shared_domain_merges_groups() {
        let text = "\
mntner: M1

role: R1
notify: x@d.com
mnt-by: M1

role: R2
notify: x@d.com
mnt-by: M1

role: R3
notify: x@d.com
mnt-by: M1

mntner: M2

role: R4
notify: x@d.com
mnt-by: M2

role: R5
notify: x@d.com
mnt-by: M2
";
        let outcome = build_groups(&parse(text));
        let (merged, report) = merge_by_domain(outcome.groups);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].size(), 5);
        assert_eq!(
            merged[0].mntner_keys,
            BTreeSet::from(["M1".to_string(), "M2".to_string()])
        );
        assert_eq!(merged[0].group_id, "M1");
        assert_eq!(report.merged_groups, 1);
    }

    #[test]
    fn no_surviving_group_has_multiple_domains() {
        let outcome = build_groups(&parse(FIG1));
        let (merged, _) = merge_by_domain(outcome.groups);
        assert!(merged.iter().all(|g| g.domains.len() == 1));
    }

    #[test]
    fn filter_keeps_resource_holders_only() {
        let text = "\
mntner: RES

inetnum: 10.0.0.0 - 10.0.0.255
notify: a@x.com
mnt-by: RES

mntner: NORES

role: R1
notify: b@y.com
mnt-by: NORES
";
        let outcome = build_groups(&parse(text));
        let (merged, _) = merge_by_domain(outcome.groups);
        let before: Vec<_> = merged.clone();
        let kept = filter_hijackable(merged);
        assert_eq!(kept.len(), 1);
        assert!(!kept[0].inetnums.is_empty());
        // selection only, no mutation
        assert!(before.contains(&kept[0]));
    }

    #[test]
    fn size_series_hand_computed() {
        let mk = |n: usize| {
            let mut g = MaintainerGroup::new(format!("M{n}"), false);
            for i in 0..n {
                g.member_objects
                    .insert((ObjectClass::Role, format!("R{n}-{i}")));
            }
            g
        };
        let groups = vec![mk(1), mk(1), mk(2)];
        let series = group_size_series(&groups);
        assert_eq!(series, vec![(1, 1.0), (2, 1.0 / 3.0)]);
        let single = group_size_series(&groups[2..3]);
        assert_eq!(single, vec![(2, 1.0)]);
        assert!(group_size_series(&[]).is_empty());
    }
}
