use std::io::Write;

use serde::{Deserialize, Serialize};
use svrs_core::solvers::TraceRecord;

use crate::Result;

/// Communications-to-ε statistics of one solver over a seed sweep.
/// Runs that never reach ε count as `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub solver: String,
    pub seeds: usize,
    pub reached: usize,
    pub median_comm: f64,
    pub q1_comm: f64,
    pub q3_comm: f64,
    pub iqr_comm: f64,
    pub median_grads: f64,
}

/// Type-7 quantile (linear between order statistics) of sorted data.
/// Interpolating against `+∞` gives `+∞`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    if sorted[hi].is_infinite() {
        return f64::INFINITY;
    }
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

fn first_reach(records: &[TraceRecord], eps: f64) -> Option<&TraceRecord> {
    records.iter().find(|r| r.f_gap.is_some_and(|g| g <= eps))
}

impl ComparisonRow {
    /// Row for one solver from its per-seed trace records.
    pub fn from_traces(solver: &str, traces: &[&[TraceRecord]], eps: f64) -> Self {
        let hit: Vec<Option<&TraceRecord>> = traces.iter().map(|t| first_reach(t, eps)).collect();
        let mut comm: Vec<f64> = hit.iter().map(|h| h.map_or(f64::INFINITY, |r| r.comm as f64)).collect();
        let mut grads: Vec<f64> = hit.iter().map(|h| h.map_or(f64::INFINITY, |r| r.grads as f64)).collect();
        comm.sort_by(f64::total_cmp);
        grads.sort_by(f64::total_cmp);
        let q1 = quantile(&comm, 0.25);
        let q3 = quantile(&comm, 0.75);
        Self {
            solver: solver.to_string(),
            seeds: traces.len(),
            reached: hit.iter().filter(|h| h.is_some()).count(),
            median_comm: quantile(&comm, 0.5),
            q1_comm: q1,
            q3_comm: q3,
            iqr_comm: if q3.is_infinite() { f64::INFINITY } else { q3 - q1 },
            median_grads: quantile(&grads, 0.5),
        }
    }
}

pub const SUMMARY_HEADER: &str = "solver,seeds,reached,median_comm,q1_comm,q3_comm,iqr_comm,median_grads";

pub fn write_summary<W: Write>(rows: &[ComparisonRow], mut out: W) -> Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.solver, r.seeds, r.reached, r.median_comm, r.q1_comm, r.q3_comm, r.iqr_comm, r.median_grads
        )?;
    }
    Ok(())
}

pub fn read_summary(text: &str) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || crate::BenchError::Config(format!("summary line {}: malformed", i + 1));
        let c: Vec<&str> = line.split(',').collect();
        if c.len() != 8 {
            return Err(bad());
        }
        let f = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let u = |s: &str| s.parse::<usize>().map_err(|_| bad());
        rows.push(ComparisonRow {
            solver: c[0].to_string(),
            seeds: u(c[1])?,
            reached: u(c[2])?,
            median_comm: f(c[3])?,
            q1_comm: f(c[4])?,
            q3_comm: f(c[5])?,
            iqr_comm: f(c[6])?,
            median_grads: f(c[7])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(comm: u64, gap: f64) -> TraceRecord {
        TraceRecord { k: comm, comm, grads: 2 * comm, proxes: 0, f_gap: Some(gap), dist_sq: None }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&[1.0, f64::INFINITY], 0.5), f64::INFINITY);
        assert_eq!(quantile(&[1.0, 2.0, f64::INFINITY], 0.5), 2.0);
    }

    #[test]
    fn unreached_runs_count_as_infinite() {
        let a = [rec(0, 1.0), rec(10, 1e-7)];
        let b = [rec(0, 1.0), rec(30, 1e-3)];
        let c = [rec(0, 1.0), rec(20, 1e-9)];
        let row = ComparisonRow::from_traces("x", &[&a, &b, &c], 1e-6);
        assert_eq!(row.reached, 2);
        assert_eq!(row.median_comm, 20.0);
        assert_eq!(row.median_grads, 40.0);
        assert_eq!(row.q3_comm, f64::INFINITY);
    }

    #[test]
    fn summary_round_trips() {
        let a = [rec(0, 1.0), rec(10, 1e-7)];
        let rows = vec![ComparisonRow::from_traces("svrs", &[&a], 1e-6)];
        let mut buf = Vec::new();
        write_summary(&rows, &mut buf).unwrap();
        assert_eq!(read_summary(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
    }
}
