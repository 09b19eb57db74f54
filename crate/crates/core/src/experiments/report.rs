use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::hash::blob_hash;

use super::bench::{BenchOutput, ResultRecord};

/// Records as CSV with a fixed header, including when there are no records.
pub fn records_csv(records: &[ResultRecord]) -> Result<Vec<u8>> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    wtr.write_record(ResultRecord::COLUMNS)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(wtr.into_inner().map_err(|e| e.into_error())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub config_hash: &'a str,
    /// Git-style blob hash of the CSV bytes.
    pub csv_hash: String,
    pub records: usize,
    pub points: &'a [super::bench::PointSummary],
    pub flags: &'a [String],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// Writes `results.csv` and `summary.json` under `dir`.
pub fn emit_report(output: &BenchOutput, dir: &Path) -> Result<ReportPaths> {
    std::fs::create_dir_all(dir)?;
    let csv = records_csv(&output.records)?;
    let summary = Summary {
        config_hash: &output.config_hash,
        csv_hash: blob_hash(&csv),
        records: output.records.len(),
        points: &output.points,
        flags: &output.flags,
    };
    let paths = ReportPaths {
        csv: dir.join("results.csv"),
        summary: dir.join("summary.json"),
    };
    std::fs::write(&paths.csv, &csv)?;
    let mut f = std::fs::File::create(&paths.summary)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::LearnerKind;

    fn record(trial: usize, failure: bool) -> ResultRecord {
        ResultRecord {
            config_hash: "abc".into(),
            learner: LearnerKind::RandMargins,
            d: 2,
            n: 10,
            trial,
            seed: 7,
            empirical_error: Some(0.0),
            generalization_error: Some(0.25),
            failure,
            empty_hypothesis: Some(false),
            removed_total: Some(3),
            max_clamped_size: None,
            clamp_events: Some(0),
            solver_failures: Some(0),
            fallback: None,
            error: None,
        }
    }

    #[test]
    fn empty_records_give_header_only() {
        let bytes = records_csv(&[]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("config_hash,learner,d,n,trial,seed,"));
    }

    #[test]
    fn rows_follow_header() {
        let text = String::from_utf8(records_csv(&[record(0, true), record(1, false)]).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "abc,rand-margins,2,10,0,7,0.0,0.25,true,false,3,,0,0,,");
        let header_cols = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == header_cols));
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = BenchOutput {
            config_hash: "abc".into(),
            records: vec![record(0, false)],
            points: vec![],
            flags: vec![],
        };
        let paths = emit_report(&out, dir.path()).unwrap();
        let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(&paths.summary).unwrap()).unwrap();
        assert_eq!(summary["config_hash"], "abc");
        assert_eq!(summary["csv_hash"], blob_hash(&std::fs::read(&paths.csv).unwrap()));
    }
}
