use serde::Serialize;

use super::{HardInstance, PartitionTable};
use crate::netsim::{Channel, NetEvent};
use crate::Real;

/// Coordinates below this magnitude count as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Oracle output left the subspace the transition rule allows.
    EventRule,
    /// A query point lay outside the current information set.
    Span,
    /// More growth within one round than allowed.
    RoundGrowth,
    /// The initialization stage produced more than `𝔽_1`.
    Init,
    /// Dimension exceeded the stopping-time bound.
    StoppingTime,
    /// Best suboptimality fell below the subspace floor.
    Floor,
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoViolation {
    /// Index into the recorded event list.
    pub event: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Per-round information dimension of one recorded run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InfoDimTrace {
    /// Dimension after the initialization stage.
    pub init_dim: usize,
    /// Dimension after each round.
    pub round_dims: Vec<usize>,
    /// Whether the round contacted all nodes (or closed an epoch).
    pub round_anchor: Vec<bool>,
    /// Node sampled in the round, if any.
    pub round_sampled: Vec<Option<usize>>,
    /// Best gap over all iterates held up to each round (scaled instances).
    pub best_gaps: Vec<f64>,
    /// Rounds `T_1 < T_2 < …` at which the stopping-time condition fired.
    pub hit_rounds: Vec<usize>,
    pub violations: Vec<InfoViolation>,
}

impl InfoDimTrace {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn final_dim(&self) -> usize {
        self.round_dims.last().copied().unwrap_or(self.init_dim)
    }

    /// Gaps `Y_k = T_k - T_{k-1}` with `T_0 = -1`.
    pub fn hit_gaps(&self) -> Vec<usize> {
        let mut prev: isize = -1;
        self.hit_rounds
            .iter()
            .map(|&t| {
                let y = (t as isize - prev) as usize;
                prev = t as isize;
                y
            })
            .collect()
    }
}

/// Largest output support node `node` may produce from an input with support `k_in`.
pub fn allowed_support(partition: &PartitionTable, node: usize, k_in: usize) -> usize {
    let out = if node == 0 {
        k_in.max(1)
    } else if k_in >= 1 && partition.owner(k_in) == Some(node) {
        k_in + 1
    } else {
        k_in
    };
    out.min(partition.m())
}

fn support<T: Real>(v: &crate::numkit::DenseVector<T>) -> usize {
    v.support_end(T::lit(SUPPORT_THRESHOLD))
}

/// Replays a recorded run and checks the information-set rules against the
/// reference `partition`. Events before the first round boundary form the
/// initialization stage. When `instance` is a scaled instance, the best gap
/// over held iterates is also checked against `Δ q^{2k}`.
pub fn track_info_dim<T: Real>(
    events: &[NetEvent<T>],
    partition: &PartitionTable,
    instance: Option<&HardInstance>,
) -> InfoDimTrace {
    let m = partition.m();
    let mut out = InfoDimTrace::default();
    let mut dim = 0usize;
    let mut round_start_dim = 0usize;
    let mut in_init = true;
    let mut anchor = false;
    let mut sampled: Option<usize> = None;
    let mut best_gap = f64::INFINITY;
    // stopping-time state: next index k whose hit is awaited
    let mut next_k = 1usize;

    for (idx, ev) in events.iter().enumerate() {
        match ev {
            NetEvent::Oracle { node, input, output, channel, .. } => {
                let k_in = support(input);
                let k_out = support(output);
                if k_in > dim {
                    out.violations.push(InfoViolation {
                        event: idx,
                        kind: ViolationKind::Span,
                        detail: format!("query with support {k_in} outside 𝔽_{dim}"),
                    });
                }
                let allowed = allowed_support(partition, *node, k_in);
                if k_out > allowed {
                    out.violations.push(InfoViolation {
                        event: idx,
                        kind: ViolationKind::EventRule,
                        detail: format!("node {} mapped 𝔽_{k_in} to support {k_out} (allowed {allowed})", node + 1),
                    });
                }
                dim = dim.max(k_out);
                match channel {
                    Channel::Broadcast | Channel::Pair => anchor = true,
                    Channel::Sampled if sampled.is_none() => sampled = Some(*node),
                    _ => {}
                }
            }
            NetEvent::RoundEnd { iterates } => {
                if let Some(inst) = instance.filter(|i| i.params().scaled.is_some()) {
                    for x in iterates {
                        let xf = x.cast::<f64>();
                        if let Ok(g) = inst.gap(&xf) {
                            best_gap = best_gap.min(g);
                        }
                    }
                }
                if in_init {
                    in_init = false;
                    out.init_dim = dim;
                    if dim > 1 {
                        out.violations.push(InfoViolation {
                            event: idx,
                            kind: ViolationKind::Init,
                            detail: format!("initialization reached 𝔽_{dim}"),
                        });
                    }
                } else {
                    let t = out.round_dims.len();
                    let limit = if anchor { 3 } else { 1 };
                    if dim > round_start_dim + limit {
                        out.violations.push(InfoViolation {
                            event: idx,
                            kind: ViolationKind::RoundGrowth,
                            detail: format!("round {t} grew {round_start_dim} -> {dim} (limit {limit})"),
                        });
                    }
                    let l = 3 * next_k - 2;
                    let hit = anchor || (l <= m && sampled.is_some() && partition.owner(l) == sampled);
                    if hit {
                        out.hit_rounds.push(t);
                        next_k += 1;
                    }
                    if 3 * next_k < m && dim > 3 * next_k - 2 {
                        out.violations.push(InfoViolation {
                            event: idx,
                            kind: ViolationKind::StoppingTime,
                            detail: format!("round {t}: 𝔽_{dim} exceeds bound 𝔽_{}", 3 * next_k - 2),
                        });
                    }
                    out.round_dims.push(dim);
                    out.round_anchor.push(anchor);
                    out.round_sampled.push(sampled);
                }
                if let Some(inst) = instance {
                    if best_gap.is_finite() && dim < m {
                        if let Some((floor, _)) = inst.subspace_floor(dim) {
                            if best_gap < floor {
                                out.violations.push(InfoViolation {
                                    event: idx,
                                    kind: ViolationKind::Floor,
                                    detail: format!("best gap {best_gap:e} below floor {floor:e} at 𝔽_{dim}"),
                                });
                            }
                        }
                    }
                    if inst.params().scaled.is_some() {
                        out.best_gaps.push(best_gap);
                    }
                }
                round_start_dim = dim;
                anchor = false;
                sampled = None;
            }
        }
    }
    out
}
