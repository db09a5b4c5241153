//! A synthetic registry corpus with hand-counted expectations.
//!
//! The corpus covers three dated snapshots of one registry database, an MRT
//! update trace, and a pre-seeded WHOIS cache, wired together by a TOML run
//! configuration. Every aggregate number in [`CorpusExpectations`] was
//! counted by hand from the object roster below; tests compare pipeline
//! output against these constants, not against the pipeline itself.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::mrt::{encode_state_change, encode_update, PrefixSpec, UpdateSpec};
use crate::{sha256_hex, unix_midnight};

pub const SNAPSHOT_DATES: [&str; 3] = ["2014-06-01", "2014-06-15", "2014-07-09"];
pub const EPOCH: &str = "2014-07-09";
pub const FILLER_COUNT: usize = 40;

/// Hand-counted ground truth for the corpus.
#[derive(Debug, Clone)]
pub struct CorpusExpectations {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub mrt_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,

    // discard cascade over the 2014-07-09 snapshot
    pub initial_groups: u64,
    pub discarded_zero_size: u64,
    pub discarded_no_domain: u64,
    pub discarded_multi_domain: u64,
    pub merged_groups: u64,
    pub hijackable_groups: u64,

    // verdict counts
    pub abandoned_groups: u64,
    pub expired_but_active_groups: u64,
    pub maintained_groups: u64,
    pub indeterminate_groups: u64,
    pub activity_gap_groups: u64,

    // abandoned cohort detail
    pub abandoned_inetnum_objects: u64,
    pub abandoned_slash24_equivalents: u64,
    pub abandoned_autnum_objects: u64,
    pub slash24_equivalents_total: u64,
    pub asn_objects_total: u64,

    // registry-activity stage
    pub bulk_batches_excluded: u64,

    /// Expected verdict per post-merge group id.
    pub verdict_by_group: BTreeMap<String, &'static str>,
}

fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

struct SnapshotBuilder {
    text: String,
    /// Index of the snapshot being rendered: 0, 1 or 2.
    idx: usize,
}

impl SnapshotBuilder {
    fn new(idx: usize) -> SnapshotBuilder {
        SnapshotBuilder {
            text: String::from("% synthetic registry extract\n\n"),
            idx,
        }
    }

    fn mntner(&mut self, key: &str, notify: Option<&str>, self_maintained: bool) {
        self.text
            .push_str(&format!("mntner: {key}\ndescr: seeded maintainer\n"));
        if let Some(addr) = notify {
            self.text.push_str(&format!("notify: {addr}\n"));
        }
        if self_maintained {
            self.text.push_str(&format!("mnt-by: {key}\n"));
        }
        // snapshots 2 and 3 carry a registry-wide sweep touching every
        // mntner object; the diff on 2014-06-15 must flag it as bulk
        if self.idx >= 1 {
            self.text.push_str("remarks: bulk maintenance sweep\n");
        }
        self.text.push('\n');
    }

    fn inetnum(&mut self, range: &str, mnt: &str, notify: Option<&str>, extra: &str) {
        self.text
            .push_str(&format!("inetnum: {range}\nnetname: SEEDED\n"));
        if let Some(addr) = notify {
            self.text.push_str(&format!("notify: {addr}\n"));
        }
        if !extra.is_empty() {
            self.text.push_str(extra);
        }
        self.text.push_str(&format!("mnt-by: {mnt}\n\n"));
    }

    fn aut_num(&mut self, asn: u32, mnt: &str, notify: &str) {
        self.text.push_str(&format!(
            "aut-num: AS{asn}\nas-name: SEEDED-AS{asn}\nnotify: {notify}\nmnt-by: {mnt}\n\n"
        ));
    }

    fn role(&mut self, name: &str, mnt: &str, notify: &str) {
        self.text.push_str(&format!(
            "role: {name}\nnic-hdl: SR1-SEED\nnotify: {notify}\nmnt-by: {mnt}\n\n"
        ));
    }
}

fn render_snapshot(idx: usize) -> String {
    let mut b = SnapshotBuilder::new(idx);

    // Two fully abandoned authorities: expired contact domain, objects
    // untouched across all snapshots, no (or ancient) BGP presence.
    b.mntner("ABAND-ONE-MNT", Some("hostmaster@dead-one.com"), true);
    b.inetnum(
        "10.1.0.0 - 10.1.3.255",
        "ABAND-ONE-MNT",
        Some("hostmaster@dead-one.com"),
        "",
    );
    b.inetnum(
        "10.2.0.0 - 10.2.0.255",
        "ABAND-ONE-MNT",
        Some("hostmaster@dead-one.com"),
        "",
    );
    b.aut_num(64512, "ABAND-ONE-MNT", "hostmaster@dead-one.com");

    b.mntner("ABAND-TWO-MNT", Some("noc@dead-two.ru"), true);
    b.inetnum(
        "10.3.0.0 - 10.3.0.127",
        "ABAND-TWO-MNT",
        Some("noc@dead-two.ru"),
        "",
    );
    b.aut_num(64513, "ABAND-TWO-MNT", "noc@dead-two.ru");

    // Expired domain but the prefix is still announced close to the epoch.
    b.mntner("EXPACT-MNT", Some("admin@expired-active.com"), true);
    b.inetnum(
        "10.4.0.0 - 10.4.0.255",
        "EXPACT-MNT",
        Some("admin@expired-active.com"),
        "",
    );

    // Unregistered domain, but its inetnum was edited in the last snapshot.
    b.mntner("UNREG-MNT", Some("root@vanished-example.org"), true);
    b.inetnum(
        "10.5.0.0 - 10.5.0.255",
        "UNREG-MNT",
        Some("root@vanished-example.org"),
        if idx >= 2 {
            "descr: refreshed paperwork\n"
        } else {
            ""
        },
    );

    // Expired domain with BGP activity inside the gap between the active
    // and maintained windows.
    b.mntner("GAP-MNT", Some("ops@gap-zone.net"), true);
    b.inetnum(
        "10.6.0.0 - 10.6.0.255",
        "GAP-MNT",
        Some("ops@gap-zone.net"),
        "",
    );

    // Domain expiring days after the epoch; recently announced.
    b.mntner("SOON-MNT", Some("it@closing-soon.com"), true);
    b.inetnum(
        "10.10.0.0 - 10.10.0.255",
        "SOON-MNT",
        Some("it@closing-soon.com"),
        "",
    );

    // Valid domain, but no registry nor BGP signal at all.
    b.mntner("STALE-MNT", Some("staff@stale-but-paid.com"), true);
    b.inetnum(
        "10.7.0.0 - 10.7.0.255",
        "STALE-MNT",
        Some("staff@stale-but-paid.com"),
        "",
    );

    // Two mntners sharing one contact domain; they must merge.
    b.mntner("MERGE-A-MNT", Some("a@shared-merge.com"), true);
    b.inetnum(
        "10.8.0.0 - 10.8.0.255",
        "MERGE-A-MNT",
        Some("a@shared-merge.com"),
        "",
    );
    b.mntner("MERGE-B-MNT", Some("b@shared-merge.com"), true);
    b.aut_num(64514, "MERGE-B-MNT", "b@shared-merge.com");

    // Cascade discards: two referenced domains, no domain, zero members.
    b.mntner("MULTI-MNT", Some("a@one-multi.com"), true);
    b.inetnum(
        "10.11.0.0 - 10.11.0.255",
        "MULTI-MNT",
        Some("b@two-multi.com"),
        "",
    );
    b.mntner("NODOMAIN-MNT", None, true);
    b.inetnum("10.9.0.0 - 10.9.0.255", "NODOMAIN-MNT", None, "");
    b.mntner("LONELY-MNT", None, false);

    // A group with a domain but nothing hijackable.
    b.mntner("PERSON-MNT", Some("admin@people-only.org"), true);
    b.role("Seeded Role", "PERSON-MNT", "admin@people-only.org");

    // Uniform maintained filler: valid domains, recent announcements.
    for i in 0..FILLER_COUNT {
        let mnt = format!("FILLER-{i:02}-MNT");
        let notify = format!("noc@filler{i:02}-zone.net");
        b.mntner(&mnt, Some(&notify), true);
        b.inetnum(
            &format!("10.{}.0.0 - 10.{}.0.255", 100 + i, 100 + i),
            &mnt,
            Some(&notify),
            "",
        );
    }

    b.text
}

fn encode_mrt_trace() -> Vec<u8> {
    let ts = |s: &str| unix_midnight(date(s)) as u32;
    let p = |base: [u8; 4], len: u8| PrefixSpec {
        base: u32::from_be_bytes(base),
        len,
    };
    let mut out = Vec::new();

    // ancient announcement then a withdrawal for the second abandoned group
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2013-12-01"),
        announced: vec![p([10, 3, 0, 0], 25)],
        path_sequence: vec![64513],
        ..UpdateSpec::default()
    }));
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2014-02-01"),
        withdrawn: vec![p([10, 3, 0, 0], 25)],
        ..UpdateSpec::default()
    }));
    out.extend(encode_state_change(ts("2014-02-01")));

    // expired-but-active: announced 19 days before the epoch, 4-byte path
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2014-06-20"),
        as4: true,
        announced: vec![p([10, 4, 0, 0], 24)],
        path_sequence: vec![65550, 4_200_000_000],
        ..UpdateSpec::default()
    }));

    // gap group: announced 120 days before the epoch
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2014-03-11"),
        announced: vec![p([10, 6, 0, 0], 24)],
        path_sequence: vec![64520],
        ..UpdateSpec::default()
    }));

    // expiring-soon group: extended-timing framing, 8 days before epoch
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2014-07-01"),
        extended_timing: true,
        announced: vec![p([10, 10, 0, 0], 24)],
        path_sequence: vec![64530],
        ..UpdateSpec::default()
    }));

    // merged group: both the prefix and its aut-num appear
    out.extend(encode_update(&UpdateSpec {
        timestamp: ts("2014-07-05"),
        announced: vec![p([10, 8, 0, 0], 24)],
        path_sequence: vec![64514],
        ..UpdateSpec::default()
    }));

    // fillers: all announced 14 days before the epoch, varying framings
    for i in 0..FILLER_COUNT {
        out.extend(encode_update(&UpdateSpec {
            timestamp: ts("2014-06-25"),
            extended_timing: i % 3 == 2,
            as4: i % 3 == 1,
            announced: vec![p([10, (100 + i) as u8, 0, 0], 24)],
            path_sequence: vec![64600 + i as u32],
            as_set: if i == 0 { vec![64999] } else { vec![] },
            ..UpdateSpec::default()
        }));
    }
    out
}

/// WHOIS bodies per domain; one cache entry each, dated at the epoch.
fn whois_bodies() -> Vec<(String, String)> {
    let mut rows = vec![
        (
            "dead-one.com".into(),
            "Registry Expiry Date: 2014-01-15T00:00:00Z\r\n".into(),
        ),
        (
            "dead-two.ru".into(),
            "domain: DEAD-TWO.RU\nstate: REGISTERED\npaid-till: 2014.03.01\n".into(),
        ),
        (
            "expired-active.com".into(),
            "Registry Expiry Date: 2014-05-01T04:00:00Z\r\n".into(),
        ),
        ("vanished-example.org".into(), "NOT FOUND\n".into()),
        (
            "gap-zone.net".into(),
            "Expiration Date: 2014-01-01\r\n".into(),
        ),
        (
            "closing-soon.com".into(),
            "Registry Expiry Date: 2014-07-12T00:00:00Z\r\n".into(),
        ),
        (
            "stale-but-paid.com".into(),
            "Registry Expiry Date: 2016-01-01T00:00:00Z\r\n".into(),
        ),
        (
            "shared-merge.com".into(),
            "Registry Expiry Date: 2015-05-05T00:00:00Z\r\n".into(),
        ),
    ];
    for i in 0..FILLER_COUNT {
        rows.push((
            format!("filler{i:02}-zone.net"),
            "Registry Expiry Date: 2015-01-01T00:00:00Z\r\n".into(),
        ));
    }
    rows
}

/// Seeds one WHOIS cache entry in the documented on-disk layout.
pub fn seed_cache_entry(
    cache_dir: &Path,
    domain: &str,
    query_date: &str,
    server: &str,
    body: &[u8],
) {
    let objects = cache_dir.join("objects");
    fs::create_dir_all(&objects).unwrap();
    let name = format!(
        "objects/{}",
        sha256_hex(&[domain.as_bytes(), b"\n", query_date.as_bytes()])
    );
    fs::write(cache_dir.join(&name), body).unwrap();
    let mut index = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(cache_dir.join("index.csv"))
        .unwrap();
    writeln!(index, "{domain},{query_date},{server},{name}").unwrap();
}

/// Writes the whole corpus under `dir` and returns its ground truth.
pub fn write_corpus(dir: &Path) -> CorpusExpectations {
    let snap_dir = dir.join("snapshots");
    let mrt_dir = dir.join("mrt");
    let cache_dir = dir.join("cache");
    let out_dir = dir.join("out");
    fs::create_dir_all(&snap_dir).unwrap();
    fs::create_dir_all(&mrt_dir).unwrap();
    fs::create_dir_all(cache_dir.join("objects")).unwrap();

    // snapshot 1 compressed, the others plain: both paths must work
    let mut snapshot_paths = Vec::new();
    for (idx, date_str) in SNAPSHOT_DATES.iter().enumerate() {
        let text = render_snapshot(idx);
        let path = if idx == 0 {
            let path = snap_dir.join(format!("registry-{date_str}.db.gz"));
            let file = fs::File::create(&path).unwrap();
            let mut enc = GzEncoder::new(file, Compression::default());
            enc.write_all(text.as_bytes()).unwrap();
            enc.finish().unwrap();
            path
        } else {
            let path = snap_dir.join(format!("registry-{date_str}.db"));
            fs::write(&path, text).unwrap();
            path
        };
        snapshot_paths.push(path);
    }

    let mrt_path = mrt_dir.join("updates-2014.mrt");
    fs::write(&mrt_path, encode_mrt_trace()).unwrap();

    for (domain, body) in whois_bodies() {
        seed_cache_entry(
            &cache_dir,
            &domain,
            EPOCH,
            "seed.whois.invalid",
            body.as_bytes(),
        );
    }

    let mut toml = String::new();
    toml.push_str(&format!("epoch = \"{EPOCH}\"\n"));
    toml.push_str("offline = true\n");
    toml.push_str(&format!("cache_dir = \"{}\"\n", cache_dir.display()));
    toml.push_str(&format!("out_dir = \"{}\"\n", out_dir.display()));
    toml.push_str(&format!("mrt = [\"{}\"]\n", mrt_path.display()));
    for (date_str, path) in SNAPSHOT_DATES.iter().zip(&snapshot_paths) {
        toml.push_str(&format!(
            "[[snapshots]]\ndate = \"{date_str}\"\npath = \"{}\"\n",
            path.display()
        ));
    }
    let config_path = dir.join("scan.toml");
    fs::write(&config_path, toml).unwrap();

    let mut verdict_by_group: BTreeMap<String, &'static str> = BTreeMap::new();
    verdict_by_group.insert("ABAND-ONE-MNT".into(), "Abandoned");
    verdict_by_group.insert("ABAND-TWO-MNT".into(), "Abandoned");
    verdict_by_group.insert("EXPACT-MNT".into(), "ExpiredButActive");
    verdict_by_group.insert("UNREG-MNT".into(), "ExpiredButActive");
    verdict_by_group.insert("GAP-MNT".into(), "ExpiredButActive");
    verdict_by_group.insert("SOON-MNT".into(), "Maintained");
    verdict_by_group.insert("STALE-MNT".into(), "Indeterminate");
    // merged id is the lexicographically smaller mntner key
    verdict_by_group.insert("MERGE-A-MNT".into(), "Maintained");
    for i in 0..FILLER_COUNT {
        verdict_by_group.insert(format!("FILLER-{i:02}-MNT"), "Maintained");
    }

    CorpusExpectations {
        config_path,
        out_dir,
        cache_dir,
        mrt_path,
        snapshot_paths,
        // 13 named mntners + 40 fillers
        initial_groups: 53,
        discarded_zero_size: 1,    // LONELY-MNT
        discarded_no_domain: 1,    // NODOMAIN-MNT
        discarded_multi_domain: 1, // MULTI-MNT
        // 50 survivors, MERGE-A + MERGE-B collapse into one
        merged_groups: 49,
        // PERSON-MNT holds no inetnum/aut-num
        hijackable_groups: 48,
        abandoned_groups: 2,
        expired_but_active_groups: 3,
        maintained_groups: 42,   // SOON + MERGE + 40 fillers
        indeterminate_groups: 1, // STALE
        activity_gap_groups: 1,  // GAP at 120 days
        // ABAND-ONE: 2 inetnums (4 + 1 /24s) + AS64512; ABAND-TWO: 1
        // half-/24 inetnum (rounds up to 1) + AS64513
        abandoned_inetnum_objects: 3,
        abandoned_slash24_equivalents: 6,
        abandoned_autnum_objects: 2,
        // 5 + 1 + 1 + 1 + 1 + 1 + 1 + 1 + 40 fillers
        slash24_equivalents_total: 52,
        asn_objects_total: 3,     // AS64512, AS64513, AS64514
        bulk_batches_excluded: 1, // the mntner sweep on 2014-06-15
        verdict_by_group,
    }
}
