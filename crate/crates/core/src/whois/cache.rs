//! On-disk WHOIS response cache.
//!
//! Layout (stable, documented):
//!   `<dir>/index.csv`  — `domain,query_date,server,file` rows
//!   `<dir>/objects/<sha256(domain "\n" query_date)>` — raw response bytes
//!
//! The cache is write-through; bodies are stored byte-exact. One file per
//! `(domain, query_date)` pair; re-storing the same key overwrites it.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::rpsl::DomainName;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedResponse {
    pub query_date: NaiveDate,
    pub server: String,
    pub body: Vec<u8>,
    /// Object filename relative to the cache directory.
    pub file: String,
}

#[derive(Debug)]
pub struct WhoisCache {
    dir: PathBuf,
    // domain -> query_date -> (server, object filename)
    index: BTreeMap<String, BTreeMap<NaiveDate, (String, String)>>,
}

pub fn object_name(domain: &str, date: NaiveDate) -> String {
    let mut hasher = Sha256::new();
    hasher.update(domain.as_bytes());
    hasher.update(b"\n");
    hasher.update(date.to_string().as_bytes());
    let digest = hasher.finalize();
    let mut name = String::from("objects/");
    for b in digest {
        name.push_str(&format!("{b:02x}"));
    }
    name
}

impl WhoisCache {
    /// Opens (creating if needed) a cache directory and loads its index.
    pub fn open(dir: impl Into<PathBuf>) -> Result<WhoisCache> {
        let dir = dir.into();
        fs::create_dir_all(dir.join("objects"))?;
        let mut index = BTreeMap::new();
        let index_path = dir.join("index.csv");
        if index_path.exists() {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_path(&index_path)?;
            for row in reader.records() {
                let row = row?;
                if row.len() != 4 {
                    continue;
                }
                let Ok(date) = row[1].parse::<NaiveDate>() else {
                    continue;
                };
                index
                    .entry(row[0].to_string())
                    .or_insert_with(BTreeMap::new)
                    .insert(date, (row[2].to_string(), row[3].to_string()));
            }
        }
        Ok(WhoisCache { dir, index })
    }

    pub fn lookup(&self, domain: &DomainName, date: NaiveDate) -> Result<Option<CachedResponse>> {
        let Some(entries) = self.index.get(domain.as_str()) else {
            return Ok(None);
        };
        let Some((server, file)) = entries.get(&date) else {
            return Ok(None);
        };
        self.read_entry(date, server, file).map(Some)
    }

    /// The most recent cached response for a domain, regardless of date.
    pub fn lookup_latest(&self, domain: &DomainName) -> Result<Option<CachedResponse>> {
        let Some(entries) = self.index.get(domain.as_str()) else {
            return Ok(None);
        };
        let Some((date, (server, file))) = entries.iter().next_back() else {
            return Ok(None);
        };
        self.read_entry(*date, server, file).map(Some)
    }

    fn read_entry(&self, date: NaiveDate, server: &str, file: &str) -> Result<CachedResponse> {
        let body = fs::read(self.dir.join(file))?;
        Ok(CachedResponse {
            query_date: date,
            server: server.to_string(),
            body,
            file: file.to_string(),
        })
    }

    /// Stores a response body, write-through, keyed by `(domain, date)`.
    pub fn store(
        &mut self,
        domain: &DomainName,
        date: NaiveDate,
        server: &str,
        body: &[u8],
    ) -> Result<String> {
        let file = object_name(domain.as_str(), date);
        fs::write(self.dir.join(&file), body)?;
        let mut index_file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join("index.csv"))?;
        writeln!(
            index_file,
            "{},{},{},{}",
            domain.as_str(),
            date,
            server,
            file
        )?;
        self.index
            .entry(domain.as_str().to_string())
            .or_default()
            .insert(date, (server.to_string(), file.clone()));
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(s: &str) -> DomainName {
        DomainName::parse(s).unwrap()
    }

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn store_then_lookup_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cache = WhoisCache::open(tmp.path()).unwrap();
        let body = b"paid-till: 2014.09.01\r\nbinary \x00\xff tail";
        cache
            .store(&dom("x.ru"), d(2014, 7, 9), "whois.tcinet.ru", body)
            .unwrap();
        let hit = cache.lookup(&dom("x.ru"), d(2014, 7, 9)).unwrap().unwrap();
        assert_eq!(hit.body, body);
        assert_eq!(hit.server, "whois.tcinet.ru");

        // a fresh handle must see the same entry through the index
        let cache2 = WhoisCache::open(tmp.path()).unwrap();
        let hit2 = cache2.lookup_latest(&dom("x.ru")).unwrap().unwrap();
        assert_eq!(hit2.body, body);
    }

    #[test]
    fn latest_picks_newest_date() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cache = WhoisCache::open(tmp.path()).unwrap();
        cache
            .store(&dom("x.com"), d(2014, 1, 1), "s", b"old")
            .unwrap();
        cache
            .store(&dom("x.com"), d(2014, 7, 1), "s", b"new")
            .unwrap();
        let hit = cache.lookup_latest(&dom("x.com")).unwrap().unwrap();
        assert_eq!(hit.body, b"new");
        assert_eq!(hit.query_date, d(2014, 7, 1));
    }

    #[test]
    fn miss_is_none() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = WhoisCache::open(tmp.path()).unwrap();
        assert!(cache
            .lookup_latest(&dom("nothing.example"))
            .unwrap()
            .is_none());
    }
}
