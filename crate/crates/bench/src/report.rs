//! Aggregation of metrics rows and log-log growth fits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::runner::Record;
use crate::BenchError;

pub fn write_records<W: Write>(w: W, records: &[Record]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<Record>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize().map(|row| row.map_err(BenchError::from)).collect()
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct `x` values or a non-positive coordinate.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-12 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Mean of one `(algo, alpha, n)` group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub algo: String,
    pub alpha: f64,
    pub n: usize,
    pub runs: usize,
    pub mean_m: f64,
    pub mean_work: f64,
    pub mean_scans: f64,
    pub mismatches: u64,
}

/// Growth exponent of work in `n` for one `(algo, alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub algo: String,
    pub alpha: f64,
    pub points: usize,
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub fits: Vec<Fit>,
}

type Key = (String, u64, usize);

pub fn summarize(records: &[Record]) -> Report {
    let mut groups: BTreeMap<Key, Vec<&Record>> = BTreeMap::new();
    for r in records {
        groups.entry((r.algo.clone(), r.alpha.to_bits(), r.n)).or_default().push(r);
    }
    let rows: Vec<Row> = groups
        .into_iter()
        .map(|((algo, alpha, n), rs)| {
            let k = rs.len() as f64;
            Row {
                algo,
                alpha: f64::from_bits(alpha),
                n,
                runs: rs.len(),
                mean_m: rs.iter().map(|r| r.m as f64).sum::<f64>() / k,
                mean_work: rs.iter().map(|r| r.work as f64).sum::<f64>() / k,
                mean_scans: rs.iter().map(|r| r.graph_scans as f64).sum::<f64>() / k,
                mismatches: rs.iter().map(|r| r.mismatches).sum(),
            }
        })
        .collect();
    let mut series: BTreeMap<(String, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        series.entry((r.algo.clone(), r.alpha.to_bits())).or_default().push((r.n as f64, r.mean_work));
    }
    let fits = series
        .into_iter()
        .map(|((algo, alpha), pts)| Fit {
            algo,
            alpha: f64::from_bits(alpha),
            points: pts.len(),
            exponent: loglog_slope(&pts),
        })
        .collect();
    Report { rows, fits }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>6} {:>6} {:>5} {:>10} {:>14} {:>14} {:>9}",
            "algo", "alpha", "n", "runs", "mean_m", "mean_work", "mean_scans", "mismatch"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<12} {:>6.2} {:>6} {:>5} {:>10.1} {:>14.0} {:>14.0} {:>9}",
                r.algo, r.alpha, r.n, r.runs, r.mean_m, r.mean_work, r.mean_scans, r.mismatches
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<12} {:>6} {:>6} {:>9}", "algo", "alpha", "points", "exponent");
        for f in &self.fits {
            let e = f.exponent.map_or("-".to_string(), |e| format!("{e:.3}"));
            let _ = writeln!(s, "{:<12} {:>6.2} {:>6} {:>9}", f.algo, f.alpha, f.points, e);
        }
        s
    }

    /// Table rows followed by one `fit` row per series, in one CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,algo,alpha,n,runs,mean_m,mean_work,mean_scans,mismatches,exponent\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "row,{},{},{},{},{},{},{},{},",
                r.algo, r.alpha, r.n, r.runs, r.mean_m, r.mean_work, r.mean_scans, r.mismatches
            );
        }
        for f in &self.fits {
            let e = f.exponent.map_or(String::new(), |e| format!("{e}"));
            let _ = writeln!(s, "fit,{},{},,{},,,,,{}", f.algo, f.alpha, f.points, e);
        }
        s
    }
}
