//! Numeric formatting and the small CSV surfaces of the pipeline.
//! All numbers are written with 17 significant digits so files round-trip
//! through f64 exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use strobo_core::{Error, PersistenceDiagram, Result, StepReport, TimeSeries};

/// 17 significant digits, enough to reproduce any f64 bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_series_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let mut out = String::from("t,x\n");
    for (k, v) in series.values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f64(series.time_at(k)), fmt_f64(*v));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_series_csv(path: &Path) -> Result<TimeSeries> {
    let text = fs::read_to_string(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (t, x) = (parts.next(), parts.next());
        match (t, x) {
            (Some(t), Some(x)) => {
                times.push(
                    t.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad t at line {lineno}: {e}")))?,
                );
                values.push(
                    x.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad x at line {lineno}: {e}")))?,
                );
            }
            _ => return Err(Error::InvalidArgument(format!("short row at line {lineno}"))),
        }
    }
    if values.len() < 2 {
        return Err(Error::InvalidArgument("series file has < 2 samples".into()));
    }
    let dt = times[1] - times[0];
    Ok(TimeSeries {
        t0: times[0],
        dt,
        values,
    })
}

pub fn write_pairs_csv(path: &Path, header: &str, pairs: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in pairs {
        let _ = writeln!(out, "{},{}", fmt_f64(*a), fmt_f64(*b));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_step_reports_csv(path: &Path, reports: &[StepReport]) -> Result<()> {
    let mut out = String::from("step,iters,residual,ratio,maxabs\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step,
            r.iterations,
            fmt_f64(r.residual),
            fmt_f64(r.contraction_ratio),
            fmt_f64(r.max_abs)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Diagram CSV: one row per pair, columns k,birth,death.
pub fn write_diagrams_csv(path: &Path, diagrams: &[PersistenceDiagram]) -> Result<()> {
    let mut out = String::from("k,birth,death\n");
    for dgm in diagrams {
        for &(b, d) in &dgm.pairs {
            let _ = writeln!(out, "{},{},{}", dgm.k, fmt_f64(b), fmt_f64(d));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a diagram CSV back into diagrams H0..=max_k (empty diagrams for
/// dimensions without rows).
pub fn read_diagrams_csv(path: &Path, max_k: usize) -> Result<Vec<PersistenceDiagram>> {
    let text = fs::read_to_string(path)?;
    let mut pairs: Vec<Vec<(f64, f64)>> = vec![Vec::new(); max_k + 1];
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::InvalidArgument(format!("bad diagram row at line {lineno}")));
        }
        let k: usize = cols[0]
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad k at line {lineno}: {e}")))?;
        if k > max_k {
            continue;
        }
        let b: f64 = cols[1]
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad birth at line {lineno}: {e}")))?;
        let d: f64 = cols[2]
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad death at line {lineno}: {e}")))?;
        pairs[k].push((b, d));
    }
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(k, p)| PersistenceDiagram::new(k, p))
        .collect())
}

/// Reads a point cloud CSV (one comma-separated point per row, no header).
pub fn read_points_csv(path: &Path) -> Result<strobo_core::analysis::PointCloud> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| Error::InvalidArgument(format!("bad point at line {lineno}: {e}")))?);
    }
    strobo_core::analysis::PointCloud::from_rows(rows, path.to_string_lossy().as_ref())
}

/// Linear-interpolation quantile (the numpy default convention).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// (median, interquartile range) of an unsorted sample.
pub fn median_iqr(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some((
        quantile(&v, 0.5),
        quantile(&v, 0.75) - quantile(&v, 0.25),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for &v in &[
            std::f64::consts::PI,
            1.0 / 3.0,
            -2.5e-17,
            1.9400000000000001,
        ] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn quantiles_linear_interpolation() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        let (m, iqr) = median_iqr(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(iqr, 1.0);
        assert!(median_iqr(&[]).is_none());
    }

    #[test]
    fn series_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = TimeSeries {
            t0: 0.25,
            dt: 0.5,
            values: vec![1.0, -0.125, std::f64::consts::E],
        };
        write_series_csv(&path, &s).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back.values, s.values);
        assert_eq!(back.t0, s.t0);
        assert_eq!(back.dt, s.dt);
    }
}
