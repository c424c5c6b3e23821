//! Correspondence CSV files and JSON reports.
//!
//! One correspondence per row: `x1,y1,x2,y2,quality`. A header row is
//! allowed and recognized by a non-numeric first field.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::EstimationReport;
use crate::geometry::{ModelKind, Point2};
use crate::ranking::Correspondence;

pub fn parse_correspondences(path: impl AsRef<Path>) -> Result<Vec<Correspondence>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_correspondences(file)
}

pub fn read_correspondences<R: Read>(reader: R) -> Result<Vec<Correspondence>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    let mut seen_row = false;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let first_row = !seen_row;
        seen_row = true;
        if first_row && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 5 fields (x1,y1,x2,y2,quality), found {}", record.len()),
            });
        }
        let mut v = [0.0; 5];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("'{field}' is not a number"),
            })?;
            if !slot.is_finite() {
                return Err(Error::Parse { line, message: format!("'{field}' is not finite") });
            }
        }
        out.push(Correspondence::new(Point2::new(v[0], v[1]), Point2::new(v[2], v[3]), v[4]));
    }
    Ok(out)
}

/// Writes a header and one row per correspondence. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_correspondences<W: Write>(writer: W, corrs: &[Correspondence]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Io { path: "<output>".into(), message: e.to_string() };
    w.write_record(["x1", "y1", "x2", "y2", "quality"]).map_err(io_err)?;
    for c in corrs {
        w.write_record([c.p1.x, c.p1.y, c.p2.x, c.p2.y, c.quality].map(|v| v.to_string()))
            .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<output>".into(), message: e.to_string() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelJson {
    pub kind: ModelKind,
    /// Row-major.
    pub matrix: [f64; 9],
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub estimator: String,
    pub model: ModelJson,
    pub inlier_ratio: f64,
    pub inlier_count: usize,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub termination: String,
    pub wall_time_s: f64,
    pub inlier_mask: Vec<bool>,
}

impl ReportJson {
    pub fn new(estimator: &str, report: &EstimationReport) -> Self {
        Self {
            estimator: estimator.to_string(),
            model: ModelJson { kind: report.best_model.kind(), matrix: report.best_model.to_row_major() },
            inlier_ratio: report.best_inlier_ratio,
            inlier_count: report.inlier_count,
            iterations: report.iterations_executed,
            history: report.epsilon_history.clone(),
            termination: report.termination.to_string(),
            wall_time_s: report.wall_time.as_secs_f64(),
            inlier_mask: report.inlier_mask.clone(),
        }
    }
}
