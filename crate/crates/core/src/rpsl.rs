//! RPSL snapshot parsing: typed registry objects, domain extraction and
//! per-class statistics.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ScanError};

/// Registry object classes. Unrecognized classes are kept as `Other` so
/// maintainer grouping still sees their `mnt-by` references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectClass {
    Inetnum,
    AutNum,
    Mntner,
    Route,
    Domain,
    Inet6num,
    Organisation,
    Role,
    AsSet,
    Route6,
    Irt,
    Other,
}

impl ObjectClass {
    pub fn from_attr_name(name: &str) -> ObjectClass {
        match name {
            "inetnum" => ObjectClass::Inetnum,
            "aut-num" => ObjectClass::AutNum,
            "mntner" => ObjectClass::Mntner,
            "route" => ObjectClass::Route,
            "domain" => ObjectClass::Domain,
            "inet6num" => ObjectClass::Inet6num,
            "organisation" => ObjectClass::Organisation,
            "role" => ObjectClass::Role,
            "as-set" => ObjectClass::AsSet,
            "route6" => ObjectClass::Route6,
            "irt" => ObjectClass::Irt,
            _ => ObjectClass::Other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectClass::Inetnum => "inetnum",
            ObjectClass::AutNum => "aut-num",
            ObjectClass::Mntner => "mntner",
            ObjectClass::Route => "route",
            ObjectClass::Domain => "domain",
            ObjectClass::Inet6num => "inet6num",
            ObjectClass::Organisation => "organisation",
            ObjectClass::Role => "role",
            ObjectClass::AsSet => "as-set",
            ObjectClass::Route6 => "route6",
            ObjectClass::Irt => "irt",
            ObjectClass::Other => "other",
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Stable hash of the normalized attribute list. Two objects share a digest
/// iff their normalized `(name, value)` sequences are identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContentDigest(#[serde(with = "hex_digest")] pub [u8; 32]);

mod hex_digest {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        let mut out = String::with_capacity(64);
        for b in bytes {
            out.push_str(&format!("{b:02x}"));
        }
        s.serialize_str(&out)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 64 {
            return Err(serde::de::Error::custom("digest must be 64 hex chars"));
        }
        let mut out = [0u8; 32];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16);
            let lo = (chunk[1] as char).to_digit(16);
            match (hi, lo) {
                (Some(h), Some(l)) => out[i] = (h * 16 + l) as u8,
                _ => return Err(serde::de::Error::custom("invalid hex in digest")),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ContentDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// One registry database object from a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RpslObject {
    pub object_class: ObjectClass,
    pub primary_key: String,
    /// Ordered `(lowercase name, value)` pairs; the first pair is the class
    /// attribute itself.
    pub attributes: Vec<(String, String)>,
    pub snapshot_date: NaiveDate,
    pub content_digest: ContentDigest,
}

impl RpslObject {
    pub fn new(attributes: Vec<(String, String)>, snapshot_date: NaiveDate) -> RpslObject {
        debug_assert!(!attributes.is_empty());
        let object_class = ObjectClass::from_attr_name(&attributes[0].0);
        let primary_key = normalize_whitespace(&attributes[0].1);
        let content_digest = digest_attributes(&attributes);
        RpslObject {
            object_class,
            primary_key,
            attributes,
            snapshot_date,
            content_digest,
        }
    }

    /// Key identifying the object across snapshots.
    pub fn object_key(&self) -> (ObjectClass, String) {
        (self.object_class, self.primary_key.clone())
    }

    /// All values of attributes with the given (lowercase) name.
    pub fn values<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> {
        self.attributes
            .iter()
            .filter(move |(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// The IPv4 range for an inetnum object, if its key parses as one.
    pub fn address_range(&self) -> Option<AddressRange> {
        if self.object_class != ObjectClass::Inetnum {
            return None;
        }
        AddressRange::parse(&self.primary_key)
    }

    /// The AS number for an aut-num object, if its key parses as one.
    pub fn as_number(&self) -> Option<AsNumber> {
        if self.object_class != ObjectClass::AutNum {
            return None;
        }
        AsNumber::parse(&self.primary_key)
    }

    /// Serialize back to `name: value` lines (one attribute per line).
    pub fn to_rpsl_text(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.attributes {
            out.push_str(name);
            out.push_str(": ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }
}

fn digest_attributes(attributes: &[(String, String)]) -> ContentDigest {
    let mut hasher = Sha256::new();
    for (name, value) in attributes {
        hasher.update((name.len() as u64).to_be_bytes());
        hasher.update(name.as_bytes());
        hasher.update((value.len() as u64).to_be_bytes());
        hasher.update(value.as_bytes());
    }
    ContentDigest(hasher.finalize().into())
}

fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Inclusive IPv4 address range, as used by inetnum primary keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AddressRange {
    pub start: u32,
    pub end: u32,
}

impl AddressRange {
    pub fn new(start: u32, end: u32) -> Option<AddressRange> {
        (start <= end).then_some(AddressRange { start, end })
    }

    /// Parses `a.b.c.d - a.b.c.d` or a single address.
    pub fn parse(s: &str) -> Option<AddressRange> {
        let s = s.trim();
        if let Some((lhs, rhs)) = s.split_once('-') {
            let start = parse_ipv4(lhs.trim())?;
            let end = parse_ipv4(rhs.trim())?;
            AddressRange::new(start, end)
        } else {
            let addr = parse_ipv4(s)?;
            AddressRange::new(addr, addr)
        }
    }

    pub fn len(&self) -> u64 {
        u64::from(self.end) - u64::from(self.start) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intersects(&self, other: &AddressRange) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for AddressRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {}", fmt_ipv4(self.start), fmt_ipv4(self.end))
    }
}

pub fn parse_ipv4(s: &str) -> Option<u32> {
    s.parse::<std::net::Ipv4Addr>().ok().map(u32::from)
}

pub fn fmt_ipv4(addr: u32) -> std::net::Ipv4Addr {
    std::net::Ipv4Addr::from(addr)
}

/// An autonomous system number, printed as `AS<decimal>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AsNumber(pub u32);

impl AsNumber {
    pub fn parse(s: &str) -> Option<AsNumber> {
        let rest = s
            .trim()
            .strip_prefix("AS")
            .or_else(|| s.trim().strip_prefix("as"))?;
        rest.parse::<u32>().ok().map(AsNumber)
    }
}

impl fmt::Display for AsNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AS{}", self.0)
    }
}

/// A lowercase registrable DNS name taken from an email address.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DomainName(String);

impl DomainName {
    /// Lowercases and validates: at least two labels, no empty labels.
    pub fn parse(s: &str) -> Option<DomainName> {
        let name = s.trim().trim_end_matches('.').to_ascii_lowercase();
        let labels: Vec<&str> = name.split('.').collect();
        if labels.len() < 2 {
            return None;
        }
        for label in &labels {
            if label.is_empty()
                || !label
                    .bytes()
                    .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
            {
                return None;
            }
        }
        Some(DomainName(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn tld(&self) -> &str {
        self.0.rsplit('.').next().unwrap()
    }
}

impl fmt::Display for DomainName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Outcome of parsing one snapshot stream.
#[derive(Debug, Clone, Default)]
pub struct SnapshotParse {
    pub objects: Vec<RpslObject>,
    pub paragraphs_seen: u64,
    pub paragraphs_skipped: u64,
}

impl SnapshotParse {
    /// True when more than 1% of paragraphs were malformed; flags likely
    /// format drift in the run report.
    pub fn drift_suspected(&self) -> bool {
        self.paragraphs_skipped * 100 > self.paragraphs_seen
    }
}

/// Wraps `input` with transparent gzip/bzip2 decompression based on magic
/// bytes. Plain data passes through untouched.
pub fn decompress(input: impl Read + 'static) -> Result<Box<dyn Read>> {
    let mut reader = BufReader::new(input);
    let magic = reader.fill_buf()?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(flate2::bufread::MultiGzDecoder::new(reader)))
    } else if magic.starts_with(b"BZh") {
        Ok(Box::new(bzip2::bufread::BzDecoder::new(reader)))
    } else {
        Ok(Box::new(reader))
    }
}

/// Parses an RPSL snapshot stream into typed objects.
///
/// Objects are paragraphs separated by blank lines; continuation lines
/// (leading space, tab or `+`) fold into the previous attribute value;
/// `#`/`%` comment lines and end-of-line `#` comments are stripped.
/// Malformed paragraphs are skipped and counted, never fatal.
pub fn parse_snapshot(input: impl Read, snapshot_date: NaiveDate) -> Result<SnapshotParse> {
    let mut reader = BufReader::new(input);
    let mut out = SnapshotParse::default();
    let mut paragraph: Vec<(String, String)> = Vec::new();
    let mut malformed = false;
    let mut in_paragraph = false;
    let mut line = Vec::new();

    loop {
        line.clear();
        let n = match reader.read_until(b'\n', &mut line) {
            Ok(n) => n,
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                return Err(ScanError::CorruptInput {
                    offset: 0,
                    detail: e.to_string(),
                })
            }
            Err(e) => return Err(ScanError::Io(e)),
        };
        let eof = n == 0;
        let text = String::from_utf8_lossy(&line);
        let text = text.trim_end_matches(['\n', '\r']);

        let blank = text.trim().is_empty();
        if eof || blank {
            if in_paragraph {
                out.paragraphs_seen += 1;
                if malformed || paragraph.is_empty() {
                    out.paragraphs_skipped += 1;
                } else {
                    out.objects.push(RpslObject::new(
                        std::mem::take(&mut paragraph),
                        snapshot_date,
                    ));
                }
                paragraph.clear();
                malformed = false;
                in_paragraph = false;
            }
            if eof {
                break;
            }
            continue;
        }

        // Whole-line comments are transparent: they neither contribute
        // attributes nor split paragraphs.
        if text.starts_with('#') || text.starts_with('%') {
            continue;
        }

        in_paragraph = true;
        if malformed {
            continue;
        }

        let stripped = strip_eol_comment(text);
        if stripped.trim().is_empty() {
            continue;
        }

        if stripped.starts_with([' ', '\t', '+']) {
            // Continuation of the previous attribute value.
            match paragraph.last_mut() {
                Some((_, value)) => {
                    let cont = stripped.trim_start_matches(['+', ' ', '\t']).trim();
                    if !cont.is_empty() {
                        if !value.is_empty() {
                            value.push(' ');
                        }
                        value.push_str(cont);
                    }
                }
                None => malformed = true,
            }
            continue;
        }

        match stripped.split_once(':') {
            Some((name, value)) => {
                let name = name.trim().to_ascii_lowercase();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    malformed = true;
                } else {
                    paragraph.push((name, value.trim().to_string()));
                }
            }
            None => malformed = true,
        }
    }

    Ok(out)
}

fn strip_eol_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => line[..pos].trim_end(),
        None => line,
    }
}

/// Attributes whose values carry contact email addresses in public snapshots.
const EMAIL_ATTRIBUTES: [&str; 2] = ["notify", "abuse-mailbox"];

/// Domains found in an object plus the count of values that held no valid
/// email address.
#[derive(Debug, Clone, Default)]
pub struct EmailScan {
    pub domains: BTreeSet<DomainName>,
    pub invalid_values: u64,
}

/// Scans notify/abuse-mailbox values for email addresses and collects the
/// registrable domain of each. Non-conforming values contribute nothing.
pub fn scan_emails(object: &RpslObject) -> EmailScan {
    let mut scan = EmailScan::default();
    for attr in EMAIL_ATTRIBUTES {
        for value in object.values(attr) {
            match email_domain(value) {
                Some(domain) => {
                    scan.domains.insert(domain);
                }
                None => scan.invalid_values += 1,
            }
        }
    }
    scan
}

/// Deduplicated registrable DNS names referenced by the object's contact
/// email addresses.
pub fn extract_domains(object: &RpslObject) -> BTreeSet<DomainName> {
    scan_emails(object).domains
}

/// The host part of a syntactically valid email address, lowercased.
/// The full host is kept; no public-suffix reduction is applied.
fn email_domain(value: &str) -> Option<DomainName> {
    let token = value.trim();
    let (local, host) = token.rsplit_once('@')?;
    if local.is_empty() || local.contains(char::is_whitespace) || host.contains('@') {
        return None;
    }
    DomainName::parse(host)
}

/// Per-class totals, domain-reference counts, and half-up percentages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStat {
    pub object_class: String,
    pub total: u64,
    pub with_domain_refs: u64,
    /// Percentage in hundredths (e.g. 3484 for 34.84%), half-up rounded.
    pub percent_hundredths: u64,
}

impl ClassStat {
    pub fn percent_string(&self) -> String {
        format!(
            "{}.{:02}",
            self.percent_hundredths / 100,
            self.percent_hundredths % 100
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub rows: Vec<ClassStat>,
    pub grand_total: Option<ClassStat>,
}

fn percent_hundredths(count: u64, total: u64) -> u64 {
    if total == 0 {
        return 0;
    }
    // round half up: floor((count * 10000 / total) + 0.5)
    (count * 10000 * 2 + total) / (2 * total)
}

/// Per-class object totals and domain-reference counts over a snapshot.
pub fn snapshot_stats<'a>(objects: impl IntoIterator<Item = &'a RpslObject>) -> SnapshotStats {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<ObjectClass, (u64, u64)> = BTreeMap::new();
    for obj in objects {
        let entry = counts.entry(obj.object_class).or_default();
        entry.0 += 1;
        if !extract_domains(obj).is_empty() {
            entry.1 += 1;
        }
    }
    if counts.is_empty() {
        return SnapshotStats::default();
    }
    let mut rows: Vec<ClassStat> = counts
        .into_iter()
        .map(|(class, (total, with_refs))| ClassStat {
            object_class: class.as_str().to_string(),
            total,
            with_domain_refs: with_refs,
            percent_hundredths: percent_hundredths(with_refs, total),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.total
            .cmp(&a.total)
            .then(a.object_class.cmp(&b.object_class))
    });
    let total: u64 = rows.iter().map(|r| r.total).sum();
    let with_refs: u64 = rows.iter().map(|r| r.with_domain_refs).sum();
    SnapshotStats {
        rows,
        grand_total: Some(ClassStat {
            object_class: "total".to_string(),
            total,
            with_domain_refs: with_refs,
            percent_hundredths: percent_hundredths(with_refs, total),
        }),
    }
}

/// Number of /24-sized blocks needed to cover the range, by the ceiling
/// convention: `ceil(len / 256)`. For unaligned ranges this may differ from
/// the count of distinct /24 containers touched.
pub fn slash24_equivalents(range: &AddressRange) -> u64 {
    range.len().div_ceil(256)
}
