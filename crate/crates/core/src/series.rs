//! Plot-ready series files: two-column CSV, monotonicity checked before
//! anything is written.

use std::path::Path;

use crate::error::{Result, ScanError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesDirection {
    /// CDFs: fractions never decrease.
    NonDecreasing,
    /// CCDFs: fractions never increase.
    NonIncreasing,
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesKind {
    /// Used as the x-column header.
    pub name: &'static str,
    pub direction: SeriesDirection,
}

pub const GROUP_SIZE_CCDF: SeriesKind = SeriesKind {
    name: "group_size_ccdf",
    direction: SeriesDirection::NonIncreasing,
};
pub const REGISTRY_CDF: SeriesKind = SeriesKind {
    name: "registry_inactivity_days_cdf",
    direction: SeriesDirection::NonDecreasing,
};
pub const BGP_CDF: SeriesKind = SeriesKind {
    name: "bgp_inactivity_days_cdf",
    direction: SeriesDirection::NonDecreasing,
};
pub const COMBINED_CDF: SeriesKind = SeriesKind {
    name: "combined_inactivity_days_cdf",
    direction: SeriesDirection::NonDecreasing,
};

/// Writes `x,fraction` rows for one series. Monotonicity violations are a
/// contract error and nothing is written. An empty series yields a
/// header-only file.
pub fn emit_series(kind: SeriesKind, rows: &[(String, f64)], path: &Path) -> Result<()> {
    for pair in rows.windows(2) {
        let ok = match kind.direction {
            SeriesDirection::NonDecreasing => pair[1].1 >= pair[0].1,
            SeriesDirection::NonIncreasing => pair[1].1 <= pair[0].1,
        };
        if !ok {
            return Err(ScanError::SeriesContract(format!(
                "{}: fraction order violated between {} and {}",
                kind.name, pair[0].0, pair[1].0
            )));
        }
    }
    if rows.iter().any(|(_, f)| !(0.0..=1.0).contains(f)) {
        return Err(ScanError::SeriesContract(format!(
            "{}: fraction outside [0, 1]",
            kind.name
        )));
    }
    let mut out = String::new();
    out.push_str(kind.name);
    out.push_str(",fraction\n");
    for (x, fraction) in rows {
        out.push_str(&format!("{x},{fraction}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Maps durations (None = never) to series x labels.
pub fn duration_label(value: Option<u64>) -> String {
    match value {
        Some(days) => days.to_string(),
        None => "never".to_string(),
    }
}
