//! Artifact writing: RFC-4180 CSV tallies and JSON summaries, both written
//! to a temp file and renamed so failures never leave partial output.

use std::path::Path;

use anyhow::{Context, Result};
use born_lab_core::{MindTally, Symbol};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!("{file_name}.tmp"));
    std::fs::write(&tmp, bytes)
        .with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot rename {} into place", path.display()))?;
    Ok(())
}

/// Per-repetition tallies as `repetition,outcome,aware_count,fraction`.
pub fn tallies_csv(outcomes: &[Symbol], tallies: &[MindTally]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["repetition", "outcome", "aware_count", "fraction"])?;
    for (rep, tally) in tallies.iter().enumerate() {
        let total = tally.total();
        for (a, outcome) in outcomes.iter().enumerate() {
            let count = tally.count(a);
            writer.write_record([
                rep.to_string(),
                outcome.to_string(),
                count.to_string(),
                format!("{}", count as f64 / total as f64),
            ])?;
        }
    }
    Ok(writer.into_inner()?)
}

/// Header-only CSV for models without per-repetition tallies.
pub fn empty_csv() -> Result<Vec<u8>> {
    tallies_csv(&[], &[])
}
