use std::io::Write;

use serde::{Deserialize, Serialize};

use super::CertificateLog;
use crate::netsim::{CommLedger, CountingMode};
use crate::oracle::ProblemDescriptor;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    pub comm: u64,
    pub grads: u64,
    pub proxes: u64,
    pub f_gap: Option<f64>,
    pub dist_sq: Option<f64>,
}

/// Sidecar metadata for one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub solver: String,
    pub seed: u64,
    pub rng: String,
    pub counting: CountingMode,
    pub hyper: serde_json::Value,
    pub problem: ProblemDescriptor,
    pub certificates: CertificateLog,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub meta: RunMeta,
}

impl RunTrace {
    pub fn new(meta: RunMeta) -> Self {
        Self { records: Vec::new(), meta }
    }

    pub(crate) fn push(&mut self, k: u64, ledger: &CommLedger, f_gap: Option<f64>, dist_sq: Option<f64>) {
        self.records.push(TraceRecord {
            k,
            comm: ledger.vector_exchanges(),
            grads: ledger.component_grad_calls(),
            proxes: ledger.component_prox_calls(),
            f_gap,
            dist_sq,
        });
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Communications at the first record with `f_gap ≤ eps`.
    pub fn comm_to_gap(&self, eps: f64) -> Option<u64> {
        self.records.iter().find(|r| r.f_gap.is_some_and(|g| g <= eps)).map(|r| r.comm)
    }

    /// Gradient calls at the first record with `f_gap ≤ eps`.
    pub fn grads_to_gap(&self, eps: f64) -> Option<u64> {
        self.records.iter().find(|r| r.f_gap.is_some_and(|g| g <= eps)).map(|r| r.grads)
    }

    /// Gap after `k` outer iterations, when recorded.
    pub fn gap_at(&self, k: u64) -> Option<f64> {
        self.records.iter().find(|r| r.k == k).and_then(|r| r.f_gap)
    }

    /// Writes `k,comm,grads,proxes,f_gap,dist_sq`; unknown gaps are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,comm,grads,proxes,f_gap,dist_sq")?;
        for r in &self.records {
            writeln!(out, "{},{},{},{},{},{}", r.k, r.comm, r.grads, r.proxes, fmt_opt(r.f_gap), fmt_opt(r.dist_sq))?;
        }
        Ok(())
    }

    pub fn write_meta<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.meta)?;
        Ok(())
    }

    /// Parses CSV written by [`RunTrace::write_csv`] (metadata is not restored).
    pub fn read_csv(text: &str) -> Result<Vec<TraceRecord>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| crate::Error::Parse { line: i + 1, msg: msg.to_string() };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(bad("expected 6 columns"));
            }
            let int = |s: &str| s.parse::<u64>().map_err(|_| bad("bad integer"));
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>().map(Some).map_err(|_| bad("bad float"))
                }
            };
            out.push(TraceRecord {
                k: int(cols[0])?,
                comm: int(cols[1])?,
                grads: int(cols[2])?,
                proxes: int(cols[3])?,
                f_gap: opt(cols[4])?,
                dist_sq: opt(cols[5])?,
            });
        }
        Ok(out)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    // `{:e}` round-trips exactly
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}
