//! Pipeline staging: parse, group, domain-intel, registry-activity,
//! bgp-activity, classify, report. Every stage reads its inputs from
//! persisted products so any stage can restart from disk.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::activity::{index_activity, last_bgp_activity, ActivityIndex};
use crate::classify::{classify, summarize, Summary};
use crate::config::RunConfig;
use crate::error::{Result, ScanError};
use crate::groups::{
    build_groups, filter_hijackable, group_size_series, merge_by_domain, CascadeReport,
    MaintainerGroup,
};
use crate::mrt::{parse_mrt, Cidr};
use crate::registry::{
    activity_cdf, detect_bulk_updates, diff_snapshots, last_registry_change, BulkFilterReport,
    ChangeEvent, ChangeKind,
};
use crate::rpsl::{
    decompress, parse_snapshot, snapshot_stats, AsNumber, DomainName, ObjectClass, RpslObject,
};
use crate::series::{
    duration_label, emit_series, BGP_CDF, COMBINED_CDF, GROUP_SIZE_CCDF, REGISTRY_CDF,
};
use crate::whois::{
    classify_domain, parse_expiry, query_whois, Clock, DomainRecord, DomainStatus, ExpirySignal,
    RateLimiter, SystemClock, WhoisCache,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Stats,
    Group,
    Domains,
    Registry,
    Bgp,
    Classify,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Stats,
        Stage::Group,
        Stage::Domains,
        Stage::Registry,
        Stage::Bgp,
        Stage::Classify,
        Stage::Report,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::Stats => "stats",
            Stage::Group => "group",
            Stage::Domains => "domains",
            Stage::Registry => "registry",
            Stage::Bgp => "bgp",
            Stage::Classify => "classify",
            Stage::Report => "report",
        }
    }
}

/// Counters and findings for one run; serialized as run_report.json.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub objects_parsed: u64,
    pub paragraphs_skipped: u64,
    pub drift_flagged_files: Vec<String>,
    pub invalid_email_values: u64,
    pub dangling_mntner_refs: u64,
    pub cascade: Option<CascadeReport>,
    pub whois_cache_hits: u64,
    pub whois_misses: u64,
    pub whois_unknown: u64,
    pub mrt_files: u64,
    pub mrt_records: u64,
    pub mrt_skipped: u64,
    pub mrt_ipv6_nlri_skipped: u64,
    pub bulk_batches_excluded: u64,
    pub summary: Option<Summary>,
    pub findings: Vec<String>,
    pub stage_millis: BTreeMap<String, u64>,
}

/// Exclusive ownership of the output directory for one run.
struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    fn acquire(out_dir: &Path) -> Result<OutputLock> {
        fs::create_dir_all(out_dir)?;
        let path = out_dir.join(".lock");
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(_) => Ok(OutputLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(ScanError::OutputLocked(path.display().to_string()))
            }
            Err(e) => Err(ScanError::Io(e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub struct Pipeline<'a> {
    config: &'a RunConfig,
    pub report: RunReport,
}

// product filenames
const STATS_CSV: &str = "stats.csv";
const GROUPS_JSONL: &str = "groups.jsonl";
const GROUPS_CSV: &str = "groups.csv";
const CASCADE_JSON: &str = "cascade.json";
const GROUP_SIZES_CSV: &str = "group_sizes_ccdf.csv";
const DOMAINS_JSONL: &str = "domains.jsonl";
const EXPIRY_HISTOGRAM_CSV: &str = "expiry_histogram.csv";
const TLD_ALL_CSV: &str = "tld_all.csv";
const TLD_EXPIRED_CSV: &str = "tld_expired.csv";
const EVENTS_CSV: &str = "events.csv";
const BULK_REPORT_JSON: &str = "bulk_report.json";
const REGISTRY_LAST_CSV: &str = "registry_last_change.csv";
const REGISTRY_CDF_CSV: &str = "registry_cdf.csv";
const ACTIVITY_INDEX_CSV: &str = "activity_index.csv";
const BGP_LAST_CSV: &str = "bgp_last_activity.csv";
const BGP_CDF_CSV: &str = "bgp_cdf.csv";
const VERDICTS_JSONL: &str = "verdicts.jsonl";
const VERDICTS_CSV: &str = "verdicts.csv";
const COMBINED_CDF_CSV: &str = "combined_cdf.csv";
const SUMMARY_JSON: &str = "summary.json";
const RUN_REPORT_JSON: &str = "run_report.json";

/// Runs the selected stages in pipeline order over one locked output
/// directory.
pub fn run(config: &RunConfig, stages: &[Stage]) -> Result<RunReport> {
    config.validate_base()?;
    if stages.contains(&Stage::Registry) {
        config.validate_registry_stage()?;
    }
    if stages.contains(&Stage::Bgp) {
        config.validate_bgp_stage()?;
    }
    let _lock = OutputLock::acquire(&config.out_dir)?;
    let mut pipeline = Pipeline {
        config,
        report: RunReport::default(),
    };
    let mut ordered: Vec<Stage> = stages.to_vec();
    ordered.sort();
    ordered.dedup();
    for stage in ordered {
        let start = Instant::now();
        match stage {
            Stage::Stats => pipeline.stage_stats()?,
            Stage::Group => pipeline.stage_group()?,
            Stage::Domains => pipeline.stage_domains()?,
            Stage::Registry => pipeline.stage_registry()?,
            Stage::Bgp => pipeline.stage_bgp()?,
            Stage::Classify => pipeline.stage_classify()?,
            Stage::Report => pipeline.stage_report()?,
        }
        pipeline
            .report
            .stage_millis
            .insert(stage.name().to_string(), start.elapsed().as_millis() as u64);
    }
    Ok(pipeline.report)
}

impl Pipeline<'_> {
    fn out(&self, name: &str) -> PathBuf {
        self.config.out_dir.join(name)
    }

    fn load_snapshot(&mut self, path: &Path, date: NaiveDate) -> Result<Vec<RpslObject>> {
        let file = fs::File::open(path)?;
        let reader = decompress(file)?;
        let parsed = parse_snapshot(reader, date)?;
        self.report.objects_parsed += parsed.objects.len() as u64;
        self.report.paragraphs_skipped += parsed.paragraphs_skipped;
        if parsed.drift_suspected() {
            self.report
                .drift_flagged_files
                .push(path.display().to_string());
        }
        for obj in &parsed.objects {
            self.report.invalid_email_values += crate::rpsl::scan_emails(obj).invalid_values;
        }
        Ok(parsed.objects)
    }

    fn stage_stats(&mut self) -> Result<()> {
        let snap = self.config.latest_snapshot()?.clone();
        let objects = self.load_snapshot(&snap.path, snap.date)?;
        let stats = snapshot_stats(&objects);
        let mut out = String::from("object_class,total,with_domain_refs,percent\n");
        for row in stats.rows.iter().chain(stats.grand_total.iter()) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.object_class,
                row.total,
                row.with_domain_refs,
                row.percent_string()
            ));
        }
        fs::write(self.out(STATS_CSV), out)?;
        Ok(())
    }

    fn stage_group(&mut self) -> Result<()> {
        let snap = self.config.latest_snapshot()?.clone();
        let objects = self.load_snapshot(&snap.path, snap.date)?;
        let outcome = build_groups(&objects);
        self.report.dangling_mntner_refs = outcome.dangling_refs;

        let ccdf = group_size_series(&outcome.groups);
        let rows: Vec<(String, f64)> = ccdf
            .into_iter()
            .map(|(size, frac)| (size.to_string(), frac))
            .collect();
        emit_series(GROUP_SIZE_CCDF, &rows, &self.out(GROUP_SIZES_CSV))?;

        let (merged, mut cascade) = merge_by_domain(outcome.groups);
        let hijackable = filter_hijackable(merged);
        cascade.hijackable_groups = hijackable.len() as u64;
        debug_assert!(cascade.is_consistent());

        let mut jsonl = String::new();
        let mut csv_out =
            String::from("group_id,domain,mntner_keys,inetnum_count,autnum_count,object_count\n");
        for group in &hijackable {
            jsonl.push_str(&serde_json::to_string(group)?);
            jsonl.push('\n');
            csv_out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                group.group_id,
                group
                    .single_domain()
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                group
                    .mntner_keys
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(";"),
                group.inetnums.len(),
                group.aut_nums.len(),
                group.size()
            ));
        }
        fs::write(self.out(GROUPS_JSONL), jsonl)?;
        fs::write(self.out(GROUPS_CSV), csv_out)?;
        fs::write(
            self.out(CASCADE_JSON),
            serde_json::to_string_pretty(&cascade)?,
        )?;
        self.report.cascade = Some(cascade);
        Ok(())
    }

    fn load_groups(&self) -> Result<Vec<MaintainerGroup>> {
        let path = self.out(GROUPS_JSONL);
        if !path.exists() {
            return Err(ScanError::Config(format!(
                "{} missing; run the group stage first",
                path.display()
            )));
        }
        let text = fs::read_to_string(path)?;
        let mut groups = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            groups.push(serde_json::from_str(line)?);
        }
        Ok(groups)
    }

    fn stage_domains(&mut self) -> Result<()> {
        let groups = self.load_groups()?;
        let domains: BTreeSet<DomainName> = groups
            .iter()
            .flat_map(|g| g.domains.iter().cloned())
            .collect();

        let whois_config = self.config.whois_client_config();
        let mut cache = WhoisCache::open(&self.config.cache_dir)?;
        let limiter = RateLimiter::new(whois_config.max_qps);
        let clock = SystemClock::default();
        let records = resolve_domains(
            &domains,
            self.config.epoch,
            &whois_config,
            &mut cache,
            &limiter,
            &clock,
            &mut self.report,
        )?;

        let mut jsonl = String::new();
        for record in &records {
            jsonl.push_str(&serde_json::to_string(record)?);
            jsonl.push('\n');
        }
        fs::write(self.out(DOMAINS_JSONL), jsonl)?;

        let hist = crate::whois::expiry_histogram(&records);
        let mut out = String::from("expiry_date,count\n");
        for (date, count) in &hist.per_date {
            out.push_str(&format!("{date},{count}\n"));
        }
        fs::write(self.out(EXPIRY_HISTOGRAM_CSV), out)?;
        for (rows, name) in [
            (&hist.tld_all, TLD_ALL_CSV),
            (&hist.tld_expired, TLD_EXPIRED_CSV),
        ] {
            let mut out = String::from("tld,count,percent\n");
            for (tld, count, pct) in rows.iter() {
                out.push_str(&format!("{tld},{count},{}.{:02}\n", pct / 100, pct % 100));
            }
            fs::write(self.out(name), out)?;
        }
        Ok(())
    }

    fn stage_registry(&mut self) -> Result<()> {
        let snapshots = self.config.snapshots.clone();
        let mut all_events: Vec<ChangeEvent> = Vec::new();
        let mut bulk = BulkFilterReport::default();
        let mut prev: Option<(NaiveDate, Vec<RpslObject>)> = None;
        for snap in &snapshots {
            let objects = self.load_snapshot(&snap.path, snap.date)?;
            if let Some((prev_date, prev_objects)) = prev.take() {
                let events = diff_snapshots(&prev_objects, prev_date, &objects, snap.date)?;
                let mut class_totals: BTreeMap<ObjectClass, u64> = BTreeMap::new();
                for obj in &objects {
                    *class_totals.entry(obj.object_class).or_default() += 1;
                }
                let (filtered, report) =
                    detect_bulk_updates(events, &class_totals, self.config.bulk_threshold);
                bulk.excluded_batches.extend(report.excluded_batches);
                all_events.extend(filtered);
            }
            prev = Some((snap.date, objects));
        }
        all_events.sort();
        self.report.bulk_batches_excluded = bulk.excluded_batches.len() as u64;

        let mut out = String::from("date,class,primary_key,kind\n");
        for ev in &all_events {
            out.push_str(&format!(
                "{},{},{},{}\n",
                ev.date,
                ev.object_class,
                ev.primary_key,
                ev.kind.as_str()
            ));
        }
        fs::write(self.out(EVENTS_CSV), out)?;
        fs::write(
            self.out(BULK_REPORT_JSON),
            serde_json::to_string_pretty(&bulk)?,
        )?;

        // per-group last change and the registry CDF
        let groups = self.load_groups()?;
        let mut out = String::from("group_id,last_change\n");
        let mut durations: Vec<Option<u64>> = Vec::new();
        for group in &groups {
            let last = last_registry_change(group, &all_events);
            durations.push(last.map(|d| (self.config.epoch - d).num_days().max(0) as u64));
            out.push_str(&format!(
                "{},{}\n",
                group.group_id,
                last.map(|d| d.to_string()).unwrap_or_default()
            ));
        }
        fs::write(self.out(REGISTRY_LAST_CSV), out)?;
        let cdf = activity_cdf(&durations);
        let rows: Vec<(String, f64)> = cdf
            .into_iter()
            .map(|(value, frac)| (duration_label(value), frac))
            .collect();
        emit_series(REGISTRY_CDF, &rows, &self.out(REGISTRY_CDF_CSV))?;
        Ok(())
    }

    fn stage_bgp(&mut self) -> Result<()> {
        let mut index = ActivityIndex::new();
        for path in &self.config.mrt_paths {
            let file = fs::File::open(path)?;
            let reader = decompress(file)?;
            let parsed = parse_mrt(reader)?;
            self.report.mrt_files += 1;
            self.report.mrt_records += parsed.records.len() as u64;
            self.report.mrt_skipped += parsed.skipped;
            self.report.mrt_ipv6_nlri_skipped += parsed.ipv6_nlri_skipped;
            if let Some(note) = parsed.truncation {
                self.report
                    .findings
                    .push(format!("{}: {note}", path.display()));
            }
            index.merge(&index_activity(&parsed.records));
        }
        write_activity_index(&index, &self.out(ACTIVITY_INDEX_CSV))?;

        let groups = self.load_groups()?;
        let mut out = String::from("group_id,last_seen_unix\n");
        let mut durations: Vec<Option<u64>> = Vec::new();
        let epoch_unix = self.config.thresholds().epoch_unix();
        for group in &groups {
            let last = last_bgp_activity(group, &index, self.config.match_mode);
            durations.push(last.map(|ts| ((epoch_unix - ts as i64).max(0) as u64) / 86_400));
            out.push_str(&format!(
                "{},{}\n",
                group.group_id,
                last.map(|ts| ts.to_string()).unwrap_or_default()
            ));
        }
        fs::write(self.out(BGP_LAST_CSV), out)?;
        let cdf = activity_cdf(&durations);
        let rows: Vec<(String, f64)> = cdf
            .into_iter()
            .map(|(value, frac)| (duration_label(value), frac))
            .collect();
        emit_series(BGP_CDF, &rows, &self.out(BGP_CDF_CSV))?;
        Ok(())
    }

    fn load_domain_records(&self) -> Result<BTreeMap<String, DomainRecord>> {
        let path = self.out(DOMAINS_JSONL);
        if !path.exists() {
            return Err(ScanError::Config(format!(
                "{} missing; run the domains stage first",
                path.display()
            )));
        }
        let text = fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let record: DomainRecord = serde_json::from_str(line)?;
            map.insert(record.domain.to_string(), record);
        }
        Ok(map)
    }

    fn load_last_registry(&self) -> Result<BTreeMap<String, NaiveDate>> {
        let mut map = BTreeMap::new();
        let path = self.out(REGISTRY_LAST_CSV);
        if !path.exists() {
            return Ok(map);
        }
        let text = fs::read_to_string(path)?;
        for line in text.lines().skip(1) {
            if let Some((id, date)) = line.rsplit_once(',') {
                if let Ok(date) = date.parse::<NaiveDate>() {
                    map.insert(id.to_string(), date);
                }
            }
        }
        Ok(map)
    }

    fn load_last_bgp(&self) -> Result<BTreeMap<String, i64>> {
        let mut map = BTreeMap::new();
        let path = self.out(BGP_LAST_CSV);
        if !path.exists() {
            return Ok(map);
        }
        let text = fs::read_to_string(path)?;
        for line in text.lines().skip(1) {
            if let Some((id, ts)) = line.rsplit_once(',') {
                if let Ok(ts) = ts.parse::<i64>() {
                    map.insert(id.to_string(), ts);
                }
            }
        }
        Ok(map)
    }

    fn stage_classify(&mut self) -> Result<()> {
        let groups = self.load_groups()?;
        let domain_records = self.load_domain_records()?;
        let last_registry = self.load_last_registry()?;
        let last_bgp = self.load_last_bgp()?;
        let thresholds = self.config.thresholds();

        let mut verdicts = Vec::new();
        for group in &groups {
            let Some(domain) = group.single_domain() else {
                self.report
                    .findings
                    .push(format!("group {} lacks a single domain", group.group_id));
                continue;
            };
            let record = match domain_records.get(domain.as_str()) {
                Some(record) => record.clone(),
                None => {
                    // stage ran without this domain (e.g. offline miss)
                    DomainRecord {
                        domain: domain.clone(),
                        expiry_date: None,
                        queried_at: self.config.epoch,
                        status: DomainStatus::Unknown,
                        raw_source: None,
                    }
                }
            };
            let verdict = classify(
                group,
                &record,
                last_registry.get(&group.group_id).copied(),
                last_bgp.get(&group.group_id).copied(),
                &thresholds,
            )?;
            verdicts.push(verdict);
        }
        verdicts.sort_by(|a, b| a.group_id.cmp(&b.group_id));

        let mut jsonl = String::new();
        let mut csv_out = String::from(
            "group_id,domain,domain_status,verdict,last_registry_change,last_bgp_activity,combined_inactivity_days,inetnum_count,slash24_equivalents,autnum_count\n",
        );
        for v in &verdicts {
            jsonl.push_str(&serde_json::to_string(v)?);
            jsonl.push('\n');
            csv_out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                v.group_id,
                v.domain,
                v.domain_status.as_str(),
                v.verdict.as_str(),
                v.last_registry_change
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                v.last_bgp_activity
                    .map(|t| t.format("%Y-%m-%dT%H:%M:%SZ").to_string())
                    .unwrap_or_default(),
                v.combined_inactivity_days
                    .map(|d| d.to_string())
                    .unwrap_or_else(|| "never".to_string()),
                v.inetnum_total,
                v.slash24_total,
                v.asn_total
            ));
        }
        fs::write(self.out(VERDICTS_JSONL), jsonl)?;
        fs::write(self.out(VERDICTS_CSV), csv_out)?;

        let durations: Vec<Option<u64>> = verdicts
            .iter()
            .map(|v| v.combined_inactivity_days)
            .collect();
        let cdf = activity_cdf(&durations);
        let rows: Vec<(String, f64)> = cdf
            .into_iter()
            .map(|(value, frac)| (duration_label(value), frac))
            .collect();
        emit_series(COMBINED_CDF, &rows, &self.out(COMBINED_CDF_CSV))?;

        let summary = summarize(&verdicts, &thresholds);
        fs::write(
            self.out(SUMMARY_JSON),
            serde_json::to_string_pretty(&summary)?,
        )?;
        self.report.summary = Some(summary);
        Ok(())
    }

    fn stage_report(&mut self) -> Result<()> {
        // fold persisted products back in when their stages ran earlier
        if self.report.cascade.is_none() {
            let path = self.out(CASCADE_JSON);
            if path.exists() {
                self.report.cascade = Some(serde_json::from_str(&fs::read_to_string(path)?)?);
            }
        }
        if self.report.summary.is_none() {
            let path = self.out(SUMMARY_JSON);
            if path.exists() {
                self.report.summary = Some(serde_json::from_str(&fs::read_to_string(path)?)?);
            }
        }
        fs::write(
            self.out(RUN_REPORT_JSON),
            serde_json::to_string_pretty(&self.report)?,
        )?;
        Ok(())
    }
}

/// Resolves WHOIS status for each domain; soft errors map to Unknown.
#[allow(clippy::too_many_arguments)]
fn resolve_domains(
    domains: &BTreeSet<DomainName>,
    epoch: NaiveDate,
    whois_config: &crate::whois::WhoisClientConfig,
    cache: &mut WhoisCache,
    limiter: &RateLimiter,
    clock: &dyn Clock,
    report: &mut RunReport,
) -> Result<Vec<DomainRecord>> {
    let mut records = Vec::new();
    for domain in domains {
        let cached = cache.lookup(domain, epoch)?.is_some()
            || (whois_config.offline && cache.lookup_latest(domain)?.is_some());
        let record = match query_whois(domain, epoch, whois_config, cache, limiter, clock) {
            Ok(response) => {
                if cached {
                    report.whois_cache_hits += 1;
                } else {
                    report.whois_misses += 1;
                }
                let raw_source = cache
                    .lookup(domain, epoch)?
                    .or(cache.lookup_latest(domain)?)
                    .map(|hit| hit.file);
                match parse_expiry(&response.body, domain.tld()) {
                    Ok(ExpirySignal::Expiry(date)) => DomainRecord {
                        domain: domain.clone(),
                        expiry_date: Some(date),
                        queried_at: epoch,
                        status: classify_domain(Some(date), false, epoch),
                        raw_source,
                    },
                    Ok(ExpirySignal::Unregistered) => DomainRecord {
                        domain: domain.clone(),
                        expiry_date: None,
                        queried_at: epoch,
                        status: classify_domain(None, true, epoch),
                        raw_source,
                    },
                    Ok(ExpirySignal::Absent) => DomainRecord {
                        domain: domain.clone(),
                        expiry_date: None,
                        queried_at: epoch,
                        status: DomainStatus::Unknown,
                        raw_source,
                    },
                    Err(err) => {
                        report
                            .findings
                            .push(format!("expiry parse for {domain}: {err}"));
                        DomainRecord {
                            domain: domain.clone(),
                            expiry_date: None,
                            queried_at: epoch,
                            status: DomainStatus::Unknown,
                            raw_source,
                        }
                    }
                }
            }
            Err(err) => {
                report.whois_unknown += 1;
                report.findings.push(format!("whois for {domain}: {err}"));
                DomainRecord {
                    domain: domain.clone(),
                    expiry_date: None,
                    queried_at: epoch,
                    status: DomainStatus::Unknown,
                    raw_source: None,
                }
            }
        };
        records.push(record);
    }
    Ok(records)
}

/// Persists an ActivityIndex as `kind,key,last_seen_unix` rows; the data
/// window is stored as a `window,<start>,<end>` row.
pub fn write_activity_index(index: &ActivityIndex, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "kind,key,last_seen_unix")?;
    if let Some((start, end)) = index.window() {
        writeln!(file, "window,{start},{end}")?;
    }
    for (prefix, ts) in index.prefix_entries() {
        writeln!(file, "prefix,{prefix},{ts}")?;
    }
    for (asn, ts) in index.asn_entries() {
        writeln!(file, "asn,{asn},{ts}")?;
    }
    Ok(())
}

/// Reloads an ActivityIndex persisted by [`write_activity_index`].
pub fn read_activity_index(path: &Path) -> Result<ActivityIndex> {
    let text = fs::read_to_string(path)?;
    let mut index = ActivityIndex::new();
    for line in text.lines().skip(1) {
        let mut parts = line.splitn(3, ',');
        let (Some(kind), Some(key), Some(value)) = (parts.next(), parts.next(), parts.next())
        else {
            continue;
        };
        match kind {
            "window" => {
                // start/end both extend the window
                if let (Ok(start), Ok(end)) = (key.parse::<u64>(), value.parse::<u64>()) {
                    let record = crate::mrt::BgpUpdateRecord {
                        timestamp: start,
                        announced: vec![],
                        withdrawn: vec![],
                        as_path: vec![],
                        has_as_set: false,
                    };
                    index.observe(&record);
                    let record = crate::mrt::BgpUpdateRecord {
                        timestamp: end,
                        ..record
                    };
                    index.observe(&record);
                }
            }
            "prefix" => {
                if let (Some(prefix), Ok(ts)) = (Cidr::parse(key), value.parse::<u64>()) {
                    index.insert_prefix(prefix, ts);
                }
            }
            "asn" => {
                if let (Some(asn), Ok(ts)) = (AsNumber::parse(key), value.parse::<u64>()) {
                    index.insert_asn(asn, ts);
                }
            }
            _ => {}
        }
    }
    Ok(index)
}

/// Parses stage names as used by the CLI.
pub fn parse_stage(name: &str) -> Option<Vec<Stage>> {
    match name {
        "stats" => Some(vec![Stage::Stats]),
        "group" => Some(vec![Stage::Group]),
        "domains" => Some(vec![Stage::Domains]),
        "registry" => Some(vec![Stage::Registry]),
        "bgp" => Some(vec![Stage::Bgp]),
        "classify" => Some(vec![Stage::Classify, Stage::Report]),
        "report" => Some(vec![Stage::Report]),
        "all" => Some(Stage::ALL.to_vec()),
        _ => None,
    }
}

/// Event-log row helper used when accumulating event logs across runs.
pub fn parse_event_row(line: &str) -> Option<ChangeEvent> {
    let mut parts = line.splitn(4, ',');
    let date = parts.next()?.parse::<NaiveDate>().ok()?;
    let class = ObjectClass::from_attr_name(parts.next()?);
    let key = parts.next()?.to_string();
    let kind = match parts.next()? {
        "Added" => ChangeKind::Added,
        "Modified" => ChangeKind::Modified,
        "Removed" => ChangeKind::Removed,
        _ => return None,
    };
    Some(ChangeEvent {
        object_class: class,
        primary_key: key,
        date,
        kind,
    })
}
