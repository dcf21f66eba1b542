//! Result rows and their CSV form.
//!
//! The schema is fixed and golden-file tested; downstream plotting scripts
//! key on it. Floats go through Rust's shortest-roundtrip formatting, so a
//! rerun with the same seed reproduces every non-timing cell byte for byte.
//! `NaN` in the value column marks a flagged cell (failed or degenerate),
//! never silence.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub const CSV_HEADER: &str = "experiment,method,n_states,n_samples,metric,value,stddev,seconds,seed";

/// One measured cell. Aggregate rows (whole-table metrics such as a fitted
/// slope) use `n_states = 0` and `n_samples = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub method: String,
    pub n_states: usize,
    pub n_samples: usize,
    pub metric: String,
    pub value: f64,
    pub stddev: f64,
    /// Wall-clock spent producing the cell. The one column exempt from
    /// byte-exact reproducibility.
    pub seconds: f64,
    pub seed: u64,
}

impl ResultRow {
    pub fn csv_line(&self) -> String {
        debug_assert!(
            !self.method.contains(',') && !self.metric.contains(','),
            "labels must not contain commas"
        );
        format!(
            "{},{},{},{},{},{},{},{:.6},{}",
            self.experiment,
            self.method,
            self.n_states,
            self.n_samples,
            self.metric,
            self.value,
            self.stddev,
            self.seconds,
            self.seed
        )
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.csv_line());
    }
    out
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, rows_to_csv(rows)).with_context(|| format!("writing {}", path.display()))
}
