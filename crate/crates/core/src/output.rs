//! CSV and text writers for run results.
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::stepper::{RunOutput, Snapshot, SnapshotGrid};

/// `snap_<time in ms>ms.csv`, the time rounded to 1e-6 ms.
pub fn snapshot_file_name(time: f64) -> String {
    format!("snap_{}ms.csv", format_ms(time))
}

pub fn format_ms(time: f64) -> String {
    let ms = (time * 1e3 * 1e6).round() / 1e6;
    format!("{}", ms + 0.0)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn snapshot_csv(points: &[Point], values: &[f64]) -> String {
    let mut s = String::from("x,y,sigma\n");
    for (p, v) in points.iter().zip(values) {
        let _ = writeln!(s, "{},{},{}", p.x, p.y, v);
    }
    s
}

pub fn traces_csv(times: &[f64], traces: &[Vec<f64>], receivers: usize) -> String {
    let mut s = String::from("t");
    for r in 0..receivers {
        let _ = write!(s, ",receiver_{r}");
    }
    s.push('\n');
    for (t, row) in times.iter().zip(traces) {
        let _ = write!(s, "{t}");
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn peaks_csv(history: &[(f64, f64)]) -> String {
    let mut s = String::from("t,max_abs\n");
    for (t, v) in history {
        let _ = writeln!(s, "{t},{v}");
    }
    s
}

/// Writes snapshots, traces and the peak history; returns the files written.
pub fn write_run(dir: &Path, grid: &SnapshotGrid, out: &RunOutput, receivers: usize) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for snap in &out.snapshots {
        let path = dir.join(snapshot_file_name(snap.time));
        write_text(&path, &snapshot_csv(&grid.points, &snap.values))?;
        written.push(path);
    }
    if receivers > 0 {
        let path = dir.join("traces.csv");
        write_text(&path, &traces_csv(&out.trace_times, &out.traces, receivers))?;
        written.push(path);
    }
    if !out.peak_history.is_empty() {
        let path = dir.join("peaks.csv");
        write_text(&path, &peaks_csv(&out.peak_history))?;
        written.push(path);
    }
    Ok(written)
}

/// Snapshot summary lines `time peak boundary_max`.
pub fn snapshot_summary(snaps: &[Snapshot]) -> String {
    let mut s = String::from("time,peak,boundary_max\n");
    for snap in snaps {
        let _ = writeln!(s, "{},{},{}", snap.time, snap.peak, snap.boundary_max);
    }
    s
}
