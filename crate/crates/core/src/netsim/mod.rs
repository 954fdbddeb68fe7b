//! Star-network communication model. Every oracle call a solver makes goes
//! through [`NetProblem`], which charges the ledger and otherwise delegates to
//! the underlying [`Problem`].

mod ledger;

pub use ledger::{expected_epoch_cost, CommLedger, CountingMode, EventKind, LedgerEvent};

use crate::numkit::DenseVector;
use crate::oracle::Problem;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Gradient,
    Prox,
}

/// How an oracle call reached its node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// Part of a full-gradient broadcast.
    Broadcast,
    /// Uniformly sampled client.
    Sampled,
    /// Targeted fetch from one client.
    Fetch,
    /// Two-point exchange closing an accelerated epoch.
    Pair,
    /// Master's own component.
    Local,
}

/// Raw oracle traffic, kept for information-set tracking.
#[derive(Clone, Debug)]
pub enum NetEvent<T> {
    Oracle { kind: OracleKind, channel: Channel, node: usize, input: DenseVector<T>, output: DenseVector<T> },
    /// End of one algorithm round, with the iterates the solver holds.
    RoundEnd { iterates: Vec<DenseVector<T>> },
}

/// Anchor point with every component gradient held at the master.
#[derive(Clone, Debug)]
struct AnchorCache<T> {
    point: DenseVector<T>,
    component_grads: Vec<DenseVector<T>>,
    full_grad: DenseVector<T>,
}

pub struct NetProblem<'a, T: Real> {
    inner: &'a Problem<T>,
    mode: CountingMode,
    ledger: CommLedger,
    accounting: bool,
    recorder: Option<Vec<NetEvent<T>>>,
    anchor: Option<AnchorCache<T>>,
}

impl<'a, T: Real> NetProblem<'a, T> {
    pub fn new(inner: &'a Problem<T>, mode: CountingMode) -> Self {
        Self { inner, mode, ledger: CommLedger::new(), accounting: true, recorder: None, anchor: None }
    }

    /// Keeps a `step,event,node,cost` log alongside the counters.
    pub fn with_event_log(mut self) -> Self {
        self.ledger = CommLedger::with_log();
        self
    }

    /// Keeps every oracle input/output pair.
    pub fn with_recorder(mut self) -> Self {
        self.recorder = Some(Vec::new());
        self
    }

    /// Turns charging off; values are unaffected.
    pub fn without_accounting(mut self) -> Self {
        self.accounting = false;
        self
    }

    pub fn problem(&self) -> &'a Problem<T> {
        self.inner
    }

    pub fn mode(&self) -> CountingMode {
        self.mode
    }

    pub fn ledger(&self) -> &CommLedger {
        &self.ledger
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn master(&self) -> usize {
        self.inner.master()
    }

    pub fn recorded(&self) -> Option<&[NetEvent<T>]> {
        self.recorder.as_deref()
    }

    pub fn take_recorded(&mut self) -> Option<Vec<NetEvent<T>>> {
        self.recorder.as_mut().map(std::mem::take)
    }

    fn charge(&mut self, event: EventKind, node: usize, cost: u64) {
        if self.accounting {
            self.ledger.charge(event, node, cost);
        }
    }

    fn physical_cost(&self, node: usize) -> u64 {
        if node == self.master() {
            0
        } else {
            2
        }
    }

    fn sampled_cost(&self, node: usize) -> u64 {
        match self.mode {
            CountingMode::Paper => 2,
            CountingMode::Exact => self.physical_cost(node),
        }
    }

    fn record(&mut self, kind: OracleKind, channel: Channel, node: usize, input: &DenseVector<T>, output: &DenseVector<T>) {
        if let Some(rec) = &mut self.recorder {
            rec.push(NetEvent::Oracle { kind, channel, node, input: input.clone(), output: output.clone() });
        }
    }

    fn raw_gradient(&mut self, channel: Channel, i: usize, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.inner.check_index(i)?;
        x.check_dim(self.inner.dim())?;
        let g = self.inner.component(i).gradient(x);
        if self.accounting {
            self.ledger.count_grads(1);
        }
        self.record(OracleKind::Gradient, channel, i, x, &g);
        Ok(g)
    }

    fn raw_prox(&mut self, channel: Channel, i: usize, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        self.inner.check_index(i)?;
        x.check_dim(self.inner.dim())?;
        let u = self.inner.component(i).prox(x, gamma).map_err(|e| match e {
            Error::NoProx(_) => Error::NoProx(i),
            other => other,
        })?;
        if self.accounting {
            self.ledger.count_proxes(1);
        }
        self.record(OracleKind::Prox, channel, i, x, &u);
        Ok(u)
    }

    /// Master sends `x` to every client and collects all component gradients:
    /// `2(n-1)` exchanges. The gradients stay cached at the master.
    pub fn broadcast_full_gradient(&mut self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        x.check_dim(self.inner.dim())?;
        let n = self.n();
        let mut grads = Vec::with_capacity(n);
        for i in 0..n {
            let g = self.raw_gradient(Channel::Broadcast, i, x)?;
            let cost = self.physical_cost(i);
            self.charge(EventKind::AnchorGradient, i, cost);
            grads.push(g);
        }
        if self.accounting {
            self.ledger.count_full_round();
        }
        let mut full = DenseVector::zeros(self.inner.dim());
        for g in &grads {
            full += g;
        }
        full.scale_mut(T::one() / T::from_usize_lossy(n));
        self.anchor = Some(AnchorCache { point: x.clone(), component_grads: grads, full_grad: full.clone() });
        Ok(full)
    }

    /// `∇f_i(w) - ∇f(w)` at the last broadcast anchor `w`; free.
    pub fn anchor_correction(&self, i: usize) -> Result<DenseVector<T>> {
        self.inner.check_index(i)?;
        let a = self
            .anchor
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("no anchor gradient has been broadcast".into()))?;
        Ok(&a.component_grads[i] - &a.full_grad)
    }

    pub fn anchor_point(&self) -> Option<&DenseVector<T>> {
        self.anchor.as_ref().map(|a| &a.point)
    }

    /// `∇f_i(x)` from node `i`: 2 exchanges unless `i` is the master.
    pub fn fetch_component_gradient(&mut self, i: usize, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        let g = self.raw_gradient(Channel::Fetch, i, x)?;
        let cost = self.physical_cost(i);
        self.charge(EventKind::ComponentGradient, i, cost);
        Ok(g)
    }

    /// `∇f_i(x)` for a uniformly sampled `i`, charged per the counting mode.
    pub fn sample_component_gradient(&mut self, i: usize, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        let g = self.raw_gradient(Channel::Sampled, i, x)?;
        let cost = self.sampled_cost(i);
        self.charge(EventKind::ComponentGradient, i, cost);
        Ok(g)
    }

    /// `prox_{f_i}^γ(x)` for a uniformly sampled `i`, charged per the counting mode.
    pub fn sample_component_prox(&mut self, i: usize, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        let u = self.raw_prox(Channel::Sampled, i, x, gamma)?;
        let cost = self.sampled_cost(i);
        self.charge(EventKind::ComponentProx, i, cost);
        Ok(u)
    }

    /// Master sends `x` and `y` to node `j`, which returns `∇f_j(x)` and `∇f_j(y)`.
    /// Charged 4, or 0 for `j` = master under exact counting.
    pub fn exchange_pair(
        &mut self,
        j: usize,
        x: &DenseVector<T>,
        y: &DenseVector<T>,
    ) -> Result<(DenseVector<T>, DenseVector<T>)> {
        let gx = self.raw_gradient(Channel::Pair, j, x)?;
        let gy = self.raw_gradient(Channel::Pair, j, y)?;
        let cost = 2 * self.sampled_cost(j);
        self.charge(EventKind::PairExchange, j, cost);
        Ok((gx, gy))
    }

    /// Local gradient of the master's own component.
    pub fn master_gradient(&mut self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        let m = self.master();
        self.raw_gradient(Channel::Local, m, x)
    }

    /// Local prox of the master's own component.
    pub fn master_prox(&mut self, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        let m = self.master();
        self.raw_prox(Channel::Local, m, x, gamma)
    }

    /// Closes a round; `iterates` are the points the solver currently holds.
    pub fn mark_round(&mut self, iterates: &[&DenseVector<T>]) {
        self.ledger.advance_step();
        if let Some(rec) = &mut self.recorder {
            rec.push(NetEvent::RoundEnd { iterates: iterates.iter().map(|v| (*v).clone()).collect() });
        }
    }
}
