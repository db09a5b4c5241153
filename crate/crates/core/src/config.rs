//! Run configuration: a flat TOML file mirroring `RunConfig`, plus
//! environment overrides for the cache directory and rate limits.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crate::activity::MatchMode;
use crate::classify::Thresholds;
use crate::error::{Result, ScanError};
use crate::whois::WhoisClientConfig;

pub const ENV_CACHE_DIR: &str = "ABANDON_SCAN_CACHE_DIR";
pub const ENV_MAX_QPS: &str = "ABANDON_SCAN_WHOIS_MAX_QPS";

/// One dated snapshot input.
#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct SnapshotInput {
    pub date: NaiveDate,
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Dated snapshot files, ascending by date.
    pub snapshots: Vec<SnapshotInput>,
    pub mrt_paths: Vec<PathBuf>,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    pub epoch: NaiveDate,
    pub maintained_window_days: u64,
    pub active_window_days: u64,
    pub expiring_soon_days: u64,
    pub bulk_threshold: f64,
    pub match_mode: MatchMode,
    pub whois_servers: BTreeMap<String, String>,
    pub whois_max_qps: f64,
    pub offline: bool,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    snapshots: Option<Vec<SnapshotInput>>,
    mrt: Option<Vec<PathBuf>>,
    cache_dir: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    epoch: Option<NaiveDate>,
    maintained_window_days: Option<u64>,
    active_window_days: Option<u64>,
    expiring_soon_days: Option<u64>,
    bulk_threshold: Option<f64>,
    match_mode: Option<String>,
    whois_servers: Option<BTreeMap<String, String>>,
    whois_max_qps: Option<f64>,
    offline: Option<bool>,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|e| ScanError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<RunConfig> {
        let epoch = raw
            .epoch
            .ok_or_else(|| ScanError::Config("epoch is required".into()))?;
        let match_mode = match raw.match_mode.as_deref() {
            None | Some("overlap") => MatchMode::Overlap,
            Some("within") => MatchMode::Within,
            Some(other) => {
                return Err(ScanError::Config(format!(
                    "match_mode must be overlap or within, got {other:?}"
                )))
            }
        };
        let mut snapshots = raw.snapshots.unwrap_or_default();
        snapshots.sort_by_key(|s| s.date);
        let mut config = RunConfig {
            snapshots,
            mrt_paths: raw.mrt.unwrap_or_default(),
            cache_dir: raw
                .cache_dir
                .unwrap_or_else(|| PathBuf::from("whois-cache")),
            out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            epoch,
            maintained_window_days: raw.maintained_window_days.unwrap_or(180),
            active_window_days: raw.active_window_days.unwrap_or(90),
            expiring_soon_days: raw.expiring_soon_days.unwrap_or(7),
            bulk_threshold: raw.bulk_threshold.unwrap_or(0.95),
            match_mode,
            whois_servers: raw.whois_servers.unwrap_or_default(),
            whois_max_qps: raw.whois_max_qps.unwrap_or(0.5),
            offline: raw.offline.unwrap_or(false),
        };
        config.apply_env_overrides();
        Ok(config)
    }

    pub fn apply_env_overrides(&mut self) {
        if let Ok(dir) = std::env::var(ENV_CACHE_DIR) {
            if !dir.is_empty() {
                self.cache_dir = PathBuf::from(dir);
            }
        }
        if let Ok(qps) = std::env::var(ENV_MAX_QPS) {
            if let Ok(qps) = qps.parse::<f64>() {
                self.whois_max_qps = qps;
            }
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            maintained_window_days: self.maintained_window_days,
            active_window_days: self.active_window_days,
            expiring_soon_days: self.expiring_soon_days,
            epoch: self.epoch,
        }
    }

    pub fn whois_client_config(&self) -> WhoisClientConfig {
        WhoisClientConfig {
            servers: self.whois_servers.clone(),
            max_qps: self.whois_max_qps,
            offline: self.offline,
            ..WhoisClientConfig::default()
        }
    }

    /// Validation shared by every stage selection.
    pub fn validate_base(&self) -> Result<()> {
        self.thresholds().validate()?;
        if self.snapshots.is_empty() {
            return Err(ScanError::Config(
                "at least one snapshot is required".into(),
            ));
        }
        if let Some(latest) = self.snapshots.last() {
            if self.epoch < latest.date {
                return Err(ScanError::Config(format!(
                    "epoch {} precedes latest snapshot date {}",
                    self.epoch, latest.date
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.bulk_threshold) || self.bulk_threshold == 0.0 {
            return Err(ScanError::Config("bulk_threshold must be in (0, 1]".into()));
        }
        for snap in &self.snapshots {
            if !snap.path.exists() {
                return Err(ScanError::Config(format!(
                    "snapshot file missing: {}",
                    snap.path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn validate_registry_stage(&self) -> Result<()> {
        if self.snapshots.len() < 2 {
            return Err(ScanError::Config(
                "registry-activity stages need at least two snapshots".into(),
            ));
        }
        Ok(())
    }

    pub fn validate_bgp_stage(&self) -> Result<()> {
        if self.mrt_paths.is_empty() {
            return Err(ScanError::Config(
                "BGP stage selected but no MRT inputs configured".into(),
            ));
        }
        for path in &self.mrt_paths {
            if !path.exists() {
                return Err(ScanError::Config(format!(
                    "MRT file missing: {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn latest_snapshot(&self) -> Result<&SnapshotInput> {
        self.snapshots
            .last()
            .ok_or_else(|| ScanError::Config("no snapshots configured".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let snap = tmp.path().join("snap.db");
        std::fs::write(&snap, "mntner: M\n").unwrap();
        let config_path = tmp.path().join("scan.toml");
        std::fs::write(
            &config_path,
            format!(
                "epoch = \"2014-07-09\"\noffline = true\n\n[[snapshots]]\ndate = \"2014-07-09\"\npath = {:?}\n",
                snap
            ),
        )
        .unwrap();
        let config = RunConfig::from_toml_file(&config_path).unwrap();
        assert_eq!(config.epoch, NaiveDate::from_ymd_opt(2014, 7, 9).unwrap());
        assert!(config.offline);
        assert_eq!(config.maintained_window_days, 180);
        config.validate_base().unwrap();
        assert!(config.validate_registry_stage().is_err());
        assert!(config.validate_bgp_stage().is_err());
    }

    #[test]
    fn epoch_before_snapshot_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let snap = tmp.path().join("snap.db");
        std::fs::write(&snap, "mntner: M\n").unwrap();
        let config = RunConfig {
            snapshots: vec![SnapshotInput {
                date: NaiveDate::from_ymd_opt(2014, 7, 9).unwrap(),
                path: snap,
            }],
            mrt_paths: vec![],
            cache_dir: tmp.path().join("cache"),
            out_dir: tmp.path().join("out"),
            epoch: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            maintained_window_days: 180,
            active_window_days: 90,
            expiring_soon_days: 7,
            bulk_threshold: 0.95,
            match_mode: MatchMode::Overlap,
            whois_servers: BTreeMap::new(),
            whois_max_qps: 0.5,
            offline: true,
        };
        assert!(config.validate_base().is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let raw: std::result::Result<RawConfig, _> = toml::from_str("nonsense = 1");
        assert!(raw.is_err());
    }
}
