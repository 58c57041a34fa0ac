//! CSV writers. Every float is written with 17 significant digits, which is
//! enough to read back the identical 64-bit value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::StatSeries;
use crate::error::{LabError, Result};
use crate::integrators::Trajectory;
use crate::manifold::JumpEvent;
use crate::systems::State3;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
    rows: u64,
}

impl CsvFile {
    fn create(path: &Path, header: &str) -> Result<Self> {
        let file = File::create(path).map_err(|e| LabError::io(path, e))?;
        let mut f = CsvFile {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
            rows: 0,
        };
        writeln!(f.out, "{header}").map_err(|e| LabError::io(path, e))?;
        Ok(f)
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(",")).map_err(|e| LabError::io(&self.path, e))?;
        self.rows += 1;
        Ok(())
    }

    fn finish(mut self) -> Result<u64> {
        self.out.flush().map_err(|e| LabError::io(&self.path, e))?;
        Ok(self.rows)
    }
}

/// Append-only `t,x,y,z` writer used while a run is in progress.
pub struct SampleWriter {
    file: CsvFile,
}

impl SampleWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(SampleWriter {
            file: CsvFile::create(path, "t,x,y,z")?,
        })
    }

    pub fn write(&mut self, t: f64, s: State3) -> Result<()> {
        self.file
            .row(&[fmt_f64(t), fmt_f64(s.x), fmt_f64(s.y), fmt_f64(s.z)])
    }

    /// Flushes and returns the number of data rows.
    pub fn finish(self) -> Result<u64> {
        self.file.finish()
    }
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<u64> {
    let mut w = SampleWriter::create(path)?;
    for s in &traj.samples {
        w.write(s.t, s.state)?;
    }
    w.finish()
}

/// Writes a `t,value` series. Empty series are rejected.
pub fn emit_series(series: &StatSeries, path: &Path) -> Result<u64> {
    if series.is_empty() {
        return Err(LabError::InvalidInput(format!(
            "refusing to write an empty series to {}",
            path.display()
        )));
    }
    let mut f = CsvFile::create(path, "t,value")?;
    for (t, v) in series.times.iter().zip(&series.values) {
        f.row(&[fmt_f64(*t), fmt_f64(*v)])?;
    }
    f.finish()
}

pub const EVENTS_HEADER: &str = "t,x_before,y_before,z_before,x_after,y_after,z_after,u_before,u_after,sector_before,sector_after";

pub fn write_events(path: &Path, events: &[JumpEvent]) -> Result<u64> {
    let mut f = CsvFile::create(path, EVENTS_HEADER)?;
    for e in events {
        f.row(&[
            fmt_f64(e.t),
            fmt_f64(e.state_before.x),
            fmt_f64(e.state_before.y),
            fmt_f64(e.state_before.z),
            fmt_f64(e.state_after.x),
            fmt_f64(e.state_after.y),
            fmt_f64(e.state_after.z),
            fmt_f64(e.u_before),
            fmt_f64(e.u_after),
            e.sector_before.to_string(),
            e.sector_after.to_string(),
        ])?;
    }
    f.finish()
}

/// Generic table of already formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<u64> {
    let mut f = CsvFile::create(path, &header.join(","))?;
    for r in rows {
        f.row(r)?;
    }
    f.finish()
}

pub fn write_points(path: &Path, header: [&str; 2], points: &[[f64; 2]]) -> Result<u64> {
    let mut f = CsvFile::create(path, &header.join(","))?;
    for p in points {
        f.row(&[fmt_f64(p[0]), fmt_f64(p[1])])?;
    }
    f.finish()
}
