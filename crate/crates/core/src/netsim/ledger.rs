use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::Result;

/// How a sampled client that happens to be the master is charged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountingMode {
    /// Charge 2 for every sampled node, master included.
    #[default]
    Paper,
    /// Charge only exchanges that actually cross an edge.
    Exact,
}

impl std::str::FromStr for CountingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Self::Paper),
            "exact" => Ok(Self::Exact),
            other => Err(format!("unknown counting mode `{other}` (expected paper|exact)")),
        }
    }
}

impl std::fmt::Display for CountingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Exact => "exact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    AnchorGradient,
    ComponentGradient,
    ComponentProx,
    PairExchange,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AnchorGradient => "anchor_gradient",
            Self::ComponentGradient => "component_gradient",
            Self::ComponentProx => "component_prox",
            Self::PairExchange => "pair_exchange",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub step: u64,
    pub event: EventKind,
    pub node: usize,
    pub cost: u64,
}

/// Communication counters for one solver run.
#[derive(Clone, Debug, Default)]
pub struct CommLedger {
    vector_exchanges: u64,
    component_grad_calls: u64,
    component_prox_calls: u64,
    full_gradient_rounds: u64,
    step: u64,
    log: Option<Vec<LedgerEvent>>,
}

impl CommLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_log() -> Self {
        Self { log: Some(Vec::new()), ..Self::default() }
    }

    pub fn vector_exchanges(&self) -> u64 {
        self.vector_exchanges
    }

    pub fn component_grad_calls(&self) -> u64 {
        self.component_grad_calls
    }

    pub fn component_prox_calls(&self) -> u64 {
        self.component_prox_calls
    }

    pub fn full_gradient_rounds(&self) -> u64 {
        self.full_gradient_rounds
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn events(&self) -> Option<&[LedgerEvent]> {
        self.log.as_deref()
    }

    /// Steps at which an anchor broadcast happened, in order (needs the event log).
    pub fn anchor_steps(&self) -> Option<Vec<u64>> {
        let log = self.log.as_ref()?;
        let mut steps: Vec<u64> = log.iter().filter(|e| e.event == EventKind::AnchorGradient).map(|e| e.step).collect();
        steps.dedup();
        Some(steps)
    }

    /// Gaps between consecutive anchor broadcasts, in steps.
    pub fn anchor_gaps(&self) -> Option<Vec<u64>> {
        let steps = self.anchor_steps()?;
        Some(steps.windows(2).map(|w| w[1] - w[0]).collect())
    }

    pub(crate) fn charge(&mut self, event: EventKind, node: usize, cost: u64) {
        self.vector_exchanges += cost;
        if let Some(log) = &mut self.log {
            log.push(LedgerEvent { step: self.step, event, node, cost });
        }
    }

    pub(crate) fn count_grads(&mut self, calls: u64) {
        self.component_grad_calls += calls;
    }

    pub(crate) fn count_proxes(&mut self, calls: u64) {
        self.component_prox_calls += calls;
    }

    pub(crate) fn count_full_round(&mut self) {
        self.full_gradient_rounds += 1;
    }

    pub(crate) fn advance_step(&mut self) {
        self.step += 1;
    }

    /// Writes the event log as `step,event,node,cost`; nodes are 1-based.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,event,node,cost")?;
        for e in self.log.iter().flatten() {
            writeln!(out, "{},{},{},{}", e.step, e.event.as_str(), e.node + 1, e.cost)?;
        }
        Ok(())
    }
}

/// `2(n-1) + 2/p`: broadcast plus the expected number of sampled exchanges.
pub fn expected_epoch_cost(n: usize, p: f64) -> f64 {
    2.0 * (n as f64 - 1.0) + 2.0 / p
}
