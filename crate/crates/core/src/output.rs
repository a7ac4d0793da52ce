//! Text, CSV and JSON emitters. Every file is written through a temporary
//! file in the target directory and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::solver::{ExtinctionReport, RadialGrid, State};

pub const TRAJECTORY_HEADER: &str =
    "t,sup_norm,l1_mass,support_radius,origin_value,absorption_flux,comparison_margin";

/// Writes `contents` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Snapshot file: three `#` header lines (t, sup, mass) and one
/// `r_j<TAB>u_j` row per cell, 17 significant digits throughout.
pub fn format_snapshot(state: &State, grid: &RadialGrid) -> String {
    let mut out = String::with_capacity(48 * grid.cells() + 128);
    let _ = writeln!(out, "# t = {:.16e}", state.t());
    let _ = writeln!(out, "# sup = {:.16e}", state.sup());
    let _ = writeln!(out, "# mass = {:.16e}", state.mass(grid));
    for (r, u) in grid.centers().iter().zip(state.values()) {
        let _ = writeln!(out, "{r:.16e}\t{u:.16e}");
    }
    out
}

/// Parses a snapshot back into `(t, [(r_j, u_j)])`.
pub fn parse_snapshot(text: &str) -> Option<(f64, Vec<(f64, f64)>)> {
    let mut t = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# t = ") {
            t = rest.trim().parse().ok();
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else {
            let (r, u) = line.split_once('\t')?;
            rows.push((r.parse().ok()?, u.parse().ok()?));
        }
    }
    Some((t?, rows))
}

/// Trajectory CSV; `comparison_margin` is empty when no monitor is active.
/// Values use the shortest representation that round-trips exactly.
pub fn format_trajectory(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for rec in records {
        for x in [rec.t, rec.sup_norm, rec.l1_mass, rec.support_radius, rec.origin_value, rec.absorption_flux] {
            push_number(&mut out, x);
            out.push(',');
        }
        if let Some(margin) = rec.comparison_margin {
            push_number(&mut out, margin);
        }
        out.push('\n');
    }
    out
}

/// Plain notation in `[1e-4, 1e15)`, scientific otherwise; both forms are
/// the shortest that round-trip.
fn push_number(out: &mut String, x: f64) {
    let mag = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&mag) {
        let _ = write!(out, "{x}");
    } else {
        let _ = write!(out, "{x:e}");
    }
}

/// `{"extinct", "t_lower", "t_upper", "exact_zero"}`.
pub fn format_extinction(report: &ExtinctionReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::InitialData;

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let grid = RadialGrid::new(1.0, 7, 2).unwrap();
        let state = State::from_initial(&InitialData::gaussian(1.0 / 3.0, 0.3, 0.1).unwrap(), &grid);
        let text = format_snapshot(&state, &grid);
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 3);
        let (t, rows) = parse_snapshot(&text).unwrap();
        assert_eq!(t, 0.0);
        for ((r, u), (rr, uu)) in grid.centers().iter().zip(state.values()).zip(&rows) {
            assert_eq!(r.to_bits(), rr.to_bits());
            assert_eq!(u.to_bits(), uu.to_bits());
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let rec = DiagnosticsRecord {
            t: 0.5,
            sup_norm: 1.0,
            l1_mass: 2.0,
            support_radius: 0.25,
            origin_value: 0.0,
            absorption_flux: 0.125,
            comparison_margin: None,
        };
        let with = DiagnosticsRecord { comparison_margin: Some(-1e-5), ..rec };
        let tiny = DiagnosticsRecord { origin_value: 2.842170943040401e-14, ..rec };
        let csv = format_trajectory(&[rec, with, tiny]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines[1], "0.5,1,2,0.25,0,0.125,");
        assert_eq!(lines[2], "0.5,1,2,0.25,0,0.125,-1e-5");
        assert_eq!(lines[3], "0.5,1,2,0.25,2.842170943040401e-14,0.125,");
        for line in &lines[1..] {
            for field in line.split(',').filter(|f| !f.is_empty()) {
                let x: f64 = field.parse().unwrap();
                assert_eq!(x.to_string().parse::<f64>().unwrap(), x);
            }
        }
    }

    #[test]
    fn extinction_json_fields() {
        let report = ExtinctionReport {
            extinct: true,
            t_lower: Some(1.5),
            t_upper: Some(2.0),
            exact_zero: true,
        };
        let v: serde_json::Value = serde_json::from_str(&format_extinction(&report).unwrap()).unwrap();
        assert_eq!(v["extinct"], true);
        assert_eq!(v["t_lower"], 1.5);
        assert_eq!(v["t_upper"], 2.0);
        assert_eq!(v["exact_zero"], true);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
