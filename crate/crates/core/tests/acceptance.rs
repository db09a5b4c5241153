//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Oracles come from the testkit crate (an independent
//! encoder and corpus generator) or from brute-force re-derivations local
//! to this file; none of them reuse the code paths under test.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::time::Instant;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abandon_scan::activity::index_activity;
use abandon_scan::activity::prefix_overlaps;
use abandon_scan::classify::{classify, Summary, Thresholds, Verdict};
use abandon_scan::config::RunConfig;
use abandon_scan::groups::{merge_by_domain, CascadeReport, MaintainerGroup};
use abandon_scan::mrt::{parse_mrt, BgpUpdateRecord, Cidr};
use abandon_scan::pipeline::{self, Stage};
use abandon_scan::rpsl::{
    parse_snapshot, slash24_equivalents, AddressRange, AsNumber, DomainName, ObjectClass,
};
use abandon_scan::whois::{classify_domain, DomainRecord, DomainStatus};

use abandon_scan_testkit::corpus::{write_corpus, CorpusExpectations};
use abandon_scan_testkit::mrt as enc;

fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

fn epoch() -> NaiveDate {
    d(2014, 7, 9)
}

fn pass(n: u32, what: &str) {
    println!("criterion {n:02} ({what}): pass");
}

fn run_corpus(exp: &CorpusExpectations, out_dir: &std::path::Path) -> pipeline::RunReport {
    let mut config = RunConfig::from_toml_file(&exp.config_path).unwrap();
    config.out_dir = out_dir.to_path_buf();
    pipeline::run(&config, &Stage::ALL).unwrap()
}

fn read_verdict_map(out_dir: &std::path::Path) -> BTreeMap<String, String> {
    let text = fs::read_to_string(out_dir.join("verdicts.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            (cols[0].to_string(), cols[3].to_string())
        })
        .collect()
}

// 1. The planted corpus must reproduce its hand-counted ground truth
// end-to-end, offline, in under 30 seconds.
#[test]
fn criterion_01_synthetic_corpus_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let exp = write_corpus(tmp.path());
    let started = Instant::now();
    let report = run_corpus(&exp, &exp.out_dir);
    let elapsed = started.elapsed();

    let cascade: CascadeReport =
        serde_json::from_str(&fs::read_to_string(exp.out_dir.join("cascade.json")).unwrap())
            .unwrap();
    assert_eq!(cascade.initial_groups, exp.initial_groups);
    assert_eq!(cascade.discarded_zero_size, exp.discarded_zero_size);
    assert_eq!(cascade.discarded_no_domain, exp.discarded_no_domain);
    assert_eq!(cascade.discarded_multi_domain, exp.discarded_multi_domain);
    assert_eq!(cascade.merged_groups, exp.merged_groups);
    assert_eq!(cascade.hijackable_groups, exp.hijackable_groups);
    assert!(cascade.is_consistent());

    let verdicts = read_verdict_map(&exp.out_dir);
    assert_eq!(verdicts.len() as u64, exp.hijackable_groups);
    for (group_id, expected) in &exp.verdict_by_group {
        assert_eq!(
            verdicts.get(group_id).map(String::as_str),
            Some(*expected),
            "verdict mismatch for {group_id}"
        );
    }

    let summary: Summary =
        serde_json::from_str(&fs::read_to_string(exp.out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.abandoned_groups, exp.abandoned_groups);
    assert_eq!(
        summary.expired_but_active_groups,
        exp.expired_but_active_groups
    );
    assert_eq!(summary.maintained_groups, exp.maintained_groups);
    assert_eq!(summary.indeterminate_groups, exp.indeterminate_groups);
    assert_eq!(
        summary.abandoned_inetnum_objects,
        exp.abandoned_inetnum_objects
    );
    assert_eq!(
        summary.abandoned_slash24_equivalents,
        exp.abandoned_slash24_equivalents
    );
    assert_eq!(
        summary.abandoned_autnum_objects,
        exp.abandoned_autnum_objects
    );
    assert_eq!(
        summary.slash24_equivalents_total,
        exp.slash24_equivalents_total
    );
    assert_eq!(summary.asn_objects_total, exp.asn_objects_total);
    assert_eq!(summary.activity_gap_groups, exp.activity_gap_groups);

    assert_eq!(report.bulk_batches_excluded, exp.bulk_batches_excluded);
    assert!(elapsed.as_secs() < 30, "full corpus run took {elapsed:?}");
    pass(1, "synthetic corpus end-to-end");
}

fn synthetic_group(key: &str, members: usize, domains: &[&str]) -> MaintainerGroup {
    MaintainerGroup {
        group_id: key.to_string(),
        mntner_keys: BTreeSet::from([key.to_string()]),
        member_objects: (0..members)
            .map(|i| (ObjectClass::Role, format!("{key}-M{i}")))
            .collect(),
        domains: domains
            .iter()
            .map(|s| DomainName::parse(s).unwrap())
            .collect(),
        inetnums: BTreeSet::new(),
        aut_nums: BTreeSet::new(),
        dangling: false,
    }
}

// 2. merge_by_domain must agree with brute-force connected components on
// the bipartite group-domain graph, over 200 random instances.
#[test]
fn criterion_02_grouping_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let n = rng.gen_range(1..=100);
        let domain_pool: Vec<String> = (0..(n / 3 + 2)).map(|j| format!("d{j}.example")).collect();
        let mut groups = Vec::new();
        for g in 0..n {
            let members = if rng.gen_bool(0.1) {
                0
            } else {
                rng.gen_range(1..=4)
            };
            let domain_count = match rng.gen_range(0..10) {
                0 => 0,
                1 | 2 => 2,
                _ => 1,
            };
            let mut picked: BTreeSet<&str> = BTreeSet::new();
            while picked.len() < domain_count {
                picked.insert(domain_pool.choose(&mut rng).unwrap());
            }
            let picked: Vec<&str> = picked.into_iter().collect();
            groups.push(synthetic_group(&format!("G{g:03}"), members, &picked));
        }

        // brute-force expectation: survivors partitioned by their domain
        let mut expected: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut survivors = 0u64;
        let (mut zero, mut nodom, mut multi) = (0u64, 0u64, 0u64);
        for g in &groups {
            if g.member_objects.is_empty() {
                zero += 1;
            } else if g.domains.is_empty() {
                nodom += 1;
            } else if g.domains.len() > 1 {
                multi += 1;
            } else {
                survivors += 1;
                let domain = g.domains.iter().next().unwrap().to_string();
                expected
                    .entry(domain)
                    .or_default()
                    .extend(g.mntner_keys.iter().cloned());
            }
        }

        let (merged, report) = merge_by_domain(groups);
        assert_eq!(report.initial_groups, n as u64, "case {case}");
        assert_eq!(report.discarded_zero_size, zero, "case {case}");
        assert_eq!(report.discarded_no_domain, nodom, "case {case}");
        assert_eq!(report.discarded_multi_domain, multi, "case {case}");
        assert_eq!(report.pre_merge_survivors, survivors, "case {case}");
        assert_eq!(merged.len(), expected.len(), "case {case}");
        let got: BTreeMap<String, BTreeSet<String>> = merged
            .iter()
            .map(|g| {
                (
                    g.single_domain().unwrap().to_string(),
                    g.mntner_keys.clone(),
                )
            })
            .collect();
        assert_eq!(got, expected, "case {case}");
        for g in &merged {
            assert_eq!(g.group_id, g.mntner_keys.iter().next().unwrap().clone());
        }
    }
    pass(2, "grouping vs connected components");
}

/// Exact overlap oracle: walk shared /24 blocks, then test address by
/// address inside each shared block.
fn overlap_oracle(range: &AddressRange, prefix: &Cidr) -> bool {
    let (ps, pe) = prefix.interval();
    let b_lo = (range.start >> 8).max(ps >> 8);
    let b_hi = (range.end >> 8).min(pe >> 8);
    if b_lo > b_hi {
        return false;
    }
    for block in b_lo..=b_hi {
        let base = block << 8;
        for off in 0..256u32 {
            let addr = base | off;
            if addr >= range.start && addr <= range.end && addr >= ps && addr <= pe {
                return true;
            }
        }
    }
    false
}

// 3. prefix_overlaps must agree with exhaustive /24-block enumeration over
// 10,000 random pairs.
#[test]
fn criterion_03_prefix_overlap_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..10_000 {
        // keep ranges narrow enough that the oracle walk stays cheap but
        // place them adversarially around the prefix edges half the time
        let len = rng.gen_range(8..=32u8);
        let prefix = Cidr::new(rng.gen(), len).unwrap();
        let (ps, pe) = prefix.interval();
        let span = rng.gen_range(0..=0xffffu32);
        let start = if rng.gen_bool(0.5) {
            let anchor = if rng.gen_bool(0.5) { ps } else { pe };
            anchor
                .wrapping_add(rng.gen_range(0..=0x1ffu32))
                .wrapping_sub(0x100)
        } else {
            rng.gen()
        };
        let end = start.saturating_add(span);
        let range = AddressRange::new(start.min(end), end).unwrap();
        assert_eq!(
            prefix_overlaps(&range, &prefix),
            overlap_oracle(&range, &prefix),
            "case {case}: range {}-{} prefix {prefix}",
            range.start,
            range.end
        );
    }
    pass(3, "prefix overlap vs /24 enumeration");
}

// 4. 1,000 randomized records must round-trip through the independent
// encoder; 10^6 random inputs must neither crash nor stall the decoder.
#[test]
fn criterion_04_mrt_roundtrip_and_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut buf = Vec::new();
    let mut expected_records = Vec::new();
    let mut expected_skipped = 0u64;
    for i in 0..1_000 {
        let spec = enc::random_update_spec(&mut rng);
        buf.extend(enc::encode_update(&spec));
        match spec.expected() {
            Some(exp) => expected_records.push(exp),
            None => expected_skipped += 1,
        }
        if i % 97 == 0 {
            buf.extend(enc::encode_state_change(spec.timestamp));
            expected_skipped += 1;
        }
    }
    let parsed = parse_mrt(&buf[..]).unwrap();
    assert!(parsed.truncation.is_none());
    assert_eq!(parsed.skipped, expected_skipped);
    assert_eq!(parsed.records.len(), expected_records.len());
    for (got, want) in parsed.records.iter().zip(&expected_records) {
        assert_eq!(got.timestamp, want.timestamp);
        assert_eq!(
            got.announced,
            want.announced
                .iter()
                .map(|&(base, len)| Cidr::new(base, len).unwrap())
                .collect::<Vec<_>>()
        );
        assert_eq!(
            got.withdrawn,
            want.withdrawn
                .iter()
                .map(|&(base, len)| Cidr::new(base, len).unwrap())
                .collect::<Vec<_>>()
        );
        assert_eq!(
            got.as_path,
            want.as_path
                .iter()
                .map(|&a| AsNumber(a))
                .collect::<Vec<_>>()
        );
        assert_eq!(got.has_as_set, want.has_as_set);
    }

    // AS4_PATH substitution against the encoder's own expectation
    let spec = enc::UpdateSpec {
        timestamp: 7,
        announced: vec![enc::PrefixSpec {
            base: 0x0a000000,
            len: 24,
        }],
        path_sequence: vec![100, enc::AS_TRANS],
        as4_path: Some(vec![4_200_000_000]),
        ..enc::UpdateSpec::default()
    };
    let parsed = parse_mrt(&enc::encode_update(&spec)[..]).unwrap();
    assert_eq!(
        parsed.records[0].as_path,
        spec.expected()
            .unwrap()
            .as_path
            .iter()
            .map(|&a| AsNumber(a))
            .collect::<Vec<_>>()
    );

    // fuzz: totality and per-input time bound
    for _ in 0..1_000_000u32 {
        let len = rng.gen_range(0..200usize);
        let mut input = vec![0u8; len];
        rng.fill(&mut input[..]);
        let started = Instant::now();
        let _ = parse_mrt(&input[..]);
        assert!(started.elapsed().as_millis() < 100);
    }
    pass(4, "MRT roundtrip and decoder fuzz");
}

// 5. ActivityIndex contents must be independent of record order: 100
// random sets, 20 permutations each.
#[test]
fn criterion_05_index_order_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let prefix_pool: Vec<Cidr> = (0..20)
        .map(|i| Cidr::new(0x0a000000 + (i << 16), 24).unwrap())
        .collect();
    for _ in 0..100 {
        let records: Vec<BgpUpdateRecord> = (0..rng.gen_range(1..=30))
            .map(|_| BgpUpdateRecord {
                timestamp: rng.gen_range(0..1_000_000_000),
                announced: (0..rng.gen_range(0..=3))
                    .map(|_| *prefix_pool.choose(&mut rng).unwrap())
                    .collect(),
                withdrawn: (0..rng.gen_range(0..=2))
                    .map(|_| *prefix_pool.choose(&mut rng).unwrap())
                    .collect(),
                as_path: (0..rng.gen_range(0..=4))
                    .map(|_| AsNumber(rng.gen_range(1..=10)))
                    .collect(),
                has_as_set: false,
            })
            .collect();
        let reference = index_activity(&records);
        let ref_prefixes: Vec<(Cidr, u64)> =
            reference.prefix_entries().map(|(p, t)| (*p, *t)).collect();
        let ref_asns: Vec<(AsNumber, u64)> =
            reference.asn_entries().map(|(a, t)| (*a, *t)).collect();
        for _ in 0..20 {
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut rng);
            let index = index_activity(&shuffled);
            assert_eq!(
                index
                    .prefix_entries()
                    .map(|(p, t)| (*p, *t))
                    .collect::<Vec<_>>(),
                ref_prefixes
            );
            assert_eq!(
                index
                    .asn_entries()
                    .map(|(a, t)| (*a, *t))
                    .collect::<Vec<_>>(),
                ref_asns
            );
            assert_eq!(index.window(), reference.window());
        }
    }
    pass(5, "activity index order independence");
}

fn resource_group(key: &str) -> MaintainerGroup {
    MaintainerGroup {
        group_id: key.to_string(),
        mntner_keys: BTreeSet::from([key.to_string()]),
        member_objects: BTreeSet::from([(ObjectClass::Inetnum, "10.0.0.0 - 10.0.0.255".into())]),
        domains: BTreeSet::from([DomainName::parse("g.example").unwrap()]),
        inetnums: BTreeSet::from([AddressRange::parse("10.0.0.0 - 10.0.0.255").unwrap()]),
        aut_nums: BTreeSet::new(),
        dangling: false,
    }
}

fn record_for(status: DomainStatus) -> DomainRecord {
    let expiry = match status {
        DomainStatus::Expired => Some(d(2014, 1, 1)),
        DomainStatus::Valid => Some(d(2016, 1, 1)),
        DomainStatus::ExpiringSoon => Some(d(2014, 7, 10)),
        _ => None,
    };
    DomainRecord {
        domain: DomainName::parse("g.example").unwrap(),
        expiry_date: expiry,
        queried_at: epoch(),
        status,
        raw_source: None,
    }
}

fn unix(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp()
}

// 6. Every cell of the decision table (5 statuses x 3 registry-signal
// states x 3 BGP-signal states) must yield exactly one verdict obeying the
// ResourceVerdict invariants.
#[test]
fn criterion_06_decision_table_exhaustive() {
    let thresholds = Thresholds::new(epoch());
    let group = resource_group("G");
    let statuses = [
        DomainStatus::Valid,
        DomainStatus::Expired,
        DomainStatus::ExpiringSoon,
        DomainStatus::Unregistered,
        DomainStatus::Unknown,
    ];
    let registry_states = [
        None,
        Some(epoch() - chrono::Days::new(30)),  // within window
        Some(epoch() - chrono::Days::new(300)), // outside window
    ];
    let bgp_states = [
        None,
        Some(unix(epoch() - chrono::Days::new(30))),
        Some(unix(epoch() - chrono::Days::new(300))),
    ];
    let mut cells = 0;
    for status in statuses {
        for reg in registry_states {
            for bgp in bgp_states {
                let v = classify(&group, &record_for(status), reg, bgp, &thresholds).unwrap();
                cells += 1;
                let active_within = v
                    .combined_inactivity_days
                    .is_some_and(|days| days < thresholds.maintained_window_days);
                match v.verdict {
                    Verdict::Abandoned => {
                        assert_eq!(v.domain_status, DomainStatus::Expired);
                        assert!(!active_within);
                    }
                    Verdict::ExpiredButActive => {
                        assert_eq!(v.domain_status, DomainStatus::Expired);
                        assert!(active_within);
                    }
                    Verdict::Maintained => {
                        assert_ne!(v.domain_status, DomainStatus::Expired);
                        assert!(active_within);
                    }
                    Verdict::Indeterminate => {
                        assert_ne!(v.domain_status, DomainStatus::Expired);
                        assert!(!active_within);
                    }
                }
                // the folded status never survives as Unregistered
                assert_ne!(v.domain_status, DomainStatus::Unregistered);
            }
        }
    }
    assert_eq!(cells, 5 * 3 * 3);
    pass(6, "exhaustive decision table");
}

// 7. Growing the maintained window can only shrink the Abandoned cohort:
// 500 random groups, windows from 1 to 12 months.
#[test]
fn criterion_07_threshold_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let statuses = [
        DomainStatus::Valid,
        DomainStatus::Expired,
        DomainStatus::ExpiringSoon,
        DomainStatus::Unregistered,
        DomainStatus::Unknown,
    ];
    let cases: Vec<(DomainStatus, Option<NaiveDate>, Option<i64>)> = (0..500)
        .map(|_| {
            let status = statuses[rng.gen_range(0..statuses.len())];
            let reg = if rng.gen_bool(0.5) {
                Some(epoch() - chrono::Days::new(rng.gen_range(0..400)))
            } else {
                None
            };
            let bgp = if rng.gen_bool(0.5) {
                Some(unix(epoch() - chrono::Days::new(rng.gen_range(0..400))))
            } else {
                None
            };
            (status, reg, bgp)
        })
        .collect();

    let group = resource_group("G");
    let mut previous: Option<usize> = None;
    for months in 1..=12u64 {
        let thresholds = Thresholds {
            maintained_window_days: months * 30,
            active_window_days: (months * 30).min(90),
            expiring_soon_days: 7,
            epoch: epoch(),
        };
        let abandoned = cases
            .iter()
            .filter(|(status, reg, bgp)| {
                classify(&group, &record_for(*status), *reg, *bgp, &thresholds)
                    .unwrap()
                    .verdict
                    == Verdict::Abandoned
            })
            .count();
        if let Some(prev) = previous {
            assert!(
                abandoned <= prev,
                "abandoned count grew from {prev} to {abandoned} at {months} months"
            );
        }
        previous = Some(abandoned);
    }
    pass(7, "threshold monotonicity");
}

// 8. Domain status boundaries around the epoch and the one-week window.
#[test]
fn criterion_08_domain_boundaries() {
    let e = epoch();
    assert_eq!(
        classify_domain(Some(e - chrono::Days::new(1)), false, e),
        DomainStatus::Expired
    );
    assert_eq!(
        classify_domain(Some(e), false, e),
        DomainStatus::ExpiringSoon
    );
    assert_eq!(
        classify_domain(Some(e + chrono::Days::new(7)), false, e),
        DomainStatus::ExpiringSoon
    );
    assert_eq!(
        classify_domain(Some(e + chrono::Days::new(8)), false, e),
        DomainStatus::Valid
    );
    assert_eq!(classify_domain(None, true, e), DomainStatus::Unregistered);
    assert_eq!(classify_domain(None, false, e), DomainStatus::Unknown);
    pass(8, "domain classification boundaries");
}

// 9. /24-equivalent convention: ceiling on the documented unaligned
// divergence case, exact container counts on 1,000 aligned ranges.
#[test]
fn criterion_09_slash24_convention() {
    // 256 addresses straddling two /24 containers: 1 by ceiling, 2 by
    // container enumeration
    let unaligned = AddressRange::parse("10.0.0.128 - 10.0.1.127").unwrap();
    assert_eq!(slash24_equivalents(&unaligned), 1);
    assert_eq!((unaligned.end >> 8) - (unaligned.start >> 8) + 1, 2);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1_000 {
        let start_block = rng.gen_range(0..0xffff00u32);
        let blocks = rng.gen_range(1..=512u32);
        let start = start_block << 8;
        let end = start + blocks * 256 - 1;
        let range = AddressRange::new(start, end).unwrap();
        let containers = (end >> 8) - (start >> 8) + 1;
        assert_eq!(slash24_equivalents(&range), containers as u64);
    }
    pass(9, "/24 equivalent convention");
}

// 10. Two consecutive offline runs over the same corpus must write
// byte-identical verdicts, summary and series files.
#[test]
fn criterion_10_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let exp = write_corpus(tmp.path());
    let out_a = tmp.path().join("out-a");
    let out_b = tmp.path().join("out-b");
    run_corpus(&exp, &out_a);
    run_corpus(&exp, &out_b);
    for name in [
        "verdicts.jsonl",
        "verdicts.csv",
        "summary.json",
        "cascade.json",
        "group_sizes_ccdf.csv",
        "registry_cdf.csv",
        "bgp_cdf.csv",
        "combined_cdf.csv",
        "events.csv",
        "activity_index.csv",
        "stats.csv",
    ] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    pass(10, "byte-identical reruns");
}

// 11. Throughput floors: RPSL parsing and MRT decoding rates, with limits
// adjustable per machine baseline via environment variables.
#[test]
fn criterion_11_throughput_floor() {
    let min_objects_per_sec: f64 = std::env::var("ABANDON_SCAN_MIN_RPSL_OBJECTS_PER_SEC")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(100_000.0);
    let min_mb_per_min: f64 = std::env::var("ABANDON_SCAN_MIN_MRT_MB_PER_MIN")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(200.0);

    // synthetic snapshot: 150,000 six-attribute objects
    let object_count = 150_000u32;
    let mut text = String::with_capacity(180 * object_count as usize);
    for i in 0..object_count {
        let (a, b) = (i >> 8, i & 0xff);
        text.push_str(&format!(
            "inetnum: 17.{}.{}.0 - 17.{}.{}.255\nnetname: BENCH-{i}\ndescr: benchmark object\nnotify: noc@bench{}.example\ncountry: ZZ\nmnt-by: BENCH-{}-MNT\n\n",
            a % 250, b, a % 250, b, i % 977, i % 4096
        ));
    }
    let started = Instant::now();
    let parsed = parse_snapshot(text.as_bytes(), epoch()).unwrap();
    let rate = parsed.objects.len() as f64 / started.elapsed().as_secs_f64();
    assert_eq!(parsed.objects.len(), object_count as usize);
    assert!(
        rate >= min_objects_per_sec,
        "RPSL parse rate {rate:.0} objects/s below floor {min_objects_per_sec:.0}"
    );

    // synthetic MRT: one batch of frames, repeated to roughly 24 MB
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut batch = Vec::new();
    for _ in 0..500 {
        batch.extend(enc::encode_update(&enc::random_update_spec(&mut rng)));
    }
    let repeats = (24 << 20) / batch.len() + 1;
    let mut trace = Vec::with_capacity(repeats * batch.len());
    for _ in 0..repeats {
        trace.extend_from_slice(&batch);
    }
    let started = Instant::now();
    let parsed = parse_mrt(&trace[..]).unwrap();
    assert!(parsed.truncation.is_none());
    let mb_per_min = trace.len() as f64 / (1 << 20) as f64 / started.elapsed().as_secs_f64() * 60.0;
    assert!(
        mb_per_min >= min_mb_per_min,
        "MRT decode rate {mb_per_min:.0} MB/min below floor {min_mb_per_min:.0}"
    );
    println!("throughput: {rate:.0} RPSL objects/s, {mb_per_min:.0} MB/min MRT");
    pass(11, "throughput floors");
}
