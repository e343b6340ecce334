//! CSV formats: the per-step diagnostics table and field snapshots.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gsav_core::{GridFunction, GridSpec};
use serde::Serialize;

pub const DIAGNOSTICS_HEADER: &str = "step,t,tau,sup_norm,energy,modified_energy,s,g";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub t: f64,
    /// 0 on the initial row.
    pub tau: f64,
    pub sup_norm: f64,
    /// Original discrete energy `E_h(u)`.
    pub energy: f64,
    /// `ε²/2 ‖∇_h u‖² + s`.
    pub modified_energy: f64,
    pub s: f64,
    /// Frozen coefficient of the step that produced this row.
    pub g: f64,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        let floats = [self.t, self.tau, self.sup_norm, self.energy, self.modified_energy, self.s, self.g];
        let mut line = self.step.to_string();
        for x in floats {
            line.push(',');
            line.push_str(&fmt_float(x));
        }
        line
    }

    pub fn parse(line: &str) -> io::Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 8 {
            return Err(invalid(format!("expected 8 fields, got {}", fields.len())));
        }
        let f = |i: usize| fields[i].parse::<f64>().map_err(|e| invalid(format!("field {i}: {e}")));
        Ok(Self {
            step: fields[0].parse().map_err(|e| invalid(format!("step: {e}")))?,
            t: f(1)?,
            tau: f(2)?,
            sup_norm: f(3)?,
            energy: f(4)?,
            modified_energy: f(5)?,
            s: f(6)?,
            g: f(7)?,
        })
    }
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

/// Streams rows to `diagnostics.csv`, flushing each one so an aborted run
/// leaves everything up to the failure on disk.
pub struct DiagnosticsWriter {
    out: BufWriter<File>,
}

impl DiagnosticsWriter {
    pub fn create(dir: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let mut out = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
        writeln!(out, "{DIAGNOSTICS_HEADER}")?;
        Ok(Self { out })
    }

    pub fn write(&mut self, row: &DiagnosticsRow) -> io::Result<()> {
        writeln!(self.out, "{}", row.to_csv())?;
        self.out.flush()
    }
}

pub fn read_diagnostics(path: &Path) -> io::Result<Vec<DiagnosticsRow>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some(DIAGNOSTICS_HEADER) {
        return Err(invalid("missing diagnostics header".into()));
    }
    lines
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| DiagnosticsRow::parse(&l?))
        .collect()
}

pub fn snapshot_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("u_{step}.csv"))
}

/// `M` lines of `M` values; line `i` holds `u(x_i, y_j)` for `j = 0..M`.
pub fn write_snapshot(dir: &Path, step: u64, u: &GridFunction) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = snapshot_path(dir, step);
    let mut out = BufWriter::new(File::create(&path)?);
    let m = u.grid().m();
    for row in u.values().chunks_exact(m) {
        let line: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(path)
}

pub fn read_snapshot(path: &Path, grid: GridSpec) -> io::Result<GridFunction> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(grid.len());
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        for field in line.split(',') {
            values.push(field.trim().parse::<f64>().map_err(|e| invalid(e.to_string()))?);
        }
    }
    GridFunction::from_vec(grid, values).map_err(|e| invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gsav_core::Boundary;

    #[test]
    fn row_round_trips_exactly() {
        let row = DiagnosticsRow {
            step: 12,
            t: 0.1 + 0.2,
            tau: 1.0 / 3.0,
            sup_norm: 0.957_531_1,
            energy: -1.234_567_890_123_456_7e-3,
            modified_energy: f64::MIN_POSITIVE,
            s: -0.0,
            g: 1.0,
        };
        let back = DiagnosticsRow::parse(&row.to_csv()).unwrap();
        assert_eq!(back, row);
        assert_eq!(back.s.to_bits(), row.s.to_bits());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(0.1).split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn snapshot_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1.0, 5, Boundary::Neumann).unwrap();
        let u = GridFunction::from_index_fn(g, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0));
        let path = write_snapshot(dir.path(), 7, &u).unwrap();
        assert!(path.ends_with("u_7.csv"));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 5);
        assert_eq!(read_snapshot(&path, g).unwrap(), u);
    }
}
