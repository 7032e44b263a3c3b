use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ops::{transition, GainContext, OpFilter, OpKind, Operation, OperationProposal};
use crate::error::Result;
use crate::net::{NetworkGraph, NodeId, Topology};
use crate::objective::{Coalition, Objective, ObjectiveParams, Partition};

/// Temperature schedule for log-linear acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningParams {
    pub epsilon: f64,
    /// Geometric factor applied per slot.
    pub decay: f64,
    pub floor: f64,
    /// The `epsilon -> 0` limit: apply the trail operation whenever its gain
    /// is at least the maintained one.
    pub greedy: bool,
}

impl LearningParams {
    pub fn greedy() -> Self {
        Self {
            epsilon: 0.0,
            decay: 1.0,
            floor: 0.0,
            greedy: true,
        }
    }

    pub fn constant(epsilon: f64) -> Self {
        Self {
            epsilon,
            decay: 1.0,
            floor: epsilon,
            greedy: false,
        }
    }

    pub fn epsilon_at(&self, slot: usize) -> f64 {
        if self.greedy {
            return 0.0;
        }
        (self.epsilon * self.decay.powi(slot.min(i32::MAX as usize) as i32)).max(self.floor)
    }
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            decay: 0.98,
            floor: 1e-3,
            greedy: false,
        }
    }
}

/// Probability of switching to the trail operation instead of maintaining
/// the last one: `e^{g/eps} / (e^{g/eps} + e^{g_last/eps})`.
pub fn acceptance_probability(trail_gain: f64, last_gain: f64, epsilon: f64) -> f64 {
    1.0 / (1.0 + ((last_gain - trail_gain) / epsilon).exp())
}

/// One Bernoulli draw at [`acceptance_probability`].
pub fn log_linear_accept<R: Rng>(
    rng: &mut R,
    trail_gain: f64,
    last_gain: f64,
    epsilon: f64,
) -> bool {
    rng.gen::<f64>() < acceptance_probability(trail_gain, last_gain, epsilon)
}

/// A node's remembered operation, anchored on node ids so it can be
/// re-evaluated after coalition indices shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LastOp {
    pub kind: OpKind,
    pub counterpart: Option<NodeId>,
    /// A member of the destination coalition when the op was chosen.
    pub anchor: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub slot: usize,
    #[serde(rename = "G1")]
    pub g1: f64,
    pub chi_total: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub ops_applied: usize,
    pub epsilon: f64,
}

/// Potential before and after one applied operation (audit mode only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedOp {
    pub slot: usize,
    pub proposal: OperationProposal,
    pub potential_before: f64,
    pub potential_after: f64,
}

#[derive(Debug, Clone)]
pub struct EngineState {
    pub partition: Partition,
    pub slot: usize,
    rng: ChaCha8Rng,
    pub last_op: Vec<Option<LastOp>>,
    pub trace: Vec<MetricsRecord>,
    audit: Option<Vec<AppliedOp>>,
}

impl EngineState {
    pub fn new(partition: Partition, seed: u64) -> Self {
        let n = partition.node_count();
        Self {
            partition,
            slot: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_op: vec![None; n],
            trace: Vec::new(),
            audit: None,
        }
    }

    /// Records the from-scratch potential around every applied operation.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn audit(&self) -> &[AppliedOp] {
        self.audit.as_deref().unwrap_or(&[])
    }

    pub fn ops_applied(&self) -> usize {
        self.trace.iter().map(|r| r.ops_applied).sum()
    }
}

/// Engine configuration shared by the distributed algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub params: ObjectiveParams,
    pub learning: LearningParams,
    pub filter: OpFilter,
}

impl Dynamics {
    pub fn dca(params: ObjectiveParams, learning: LearningParams) -> Self {
        Self {
            params,
            learning,
            filter: OpFilter::ALL,
        }
    }
}

/// Gain of the remembered operation against the current partition; 0 when
/// it no longer applies.
fn maintained_gain(ctx: &GainContext, i: NodeId, last: Option<LastOp>) -> f64 {
    let Some(last) = last else { return 0.0 };
    let p = ctx.partition;
    let src = p.index_of(i);
    let op = match last.kind {
        OpKind::HeadElection => {
            let head = p.coalition(src).head();
            if last.counterpart != Some(head) || head == i {
                return 0.0;
            }
            Operation {
                kind: last.kind,
                actor: i,
                counterpart: last.counterpart,
                src,
                dst: src,
            }
        }
        OpKind::Switch | OpKind::Replace => {
            let dst = p.index_of(last.counterpart.unwrap_or(last.anchor));
            Operation {
                kind: last.kind,
                actor: i,
                counterpart: last.counterpart,
                src,
                dst,
            }
        }
    };
    ctx.evaluate(&op).unwrap_or(0.0)
}

/// One activation of node `i`: gather positive-gain operations, pick the
/// trail operation and apply it under log-linear (or greedy) acceptance.
pub fn dca_step(
    i: NodeId,
    state: &mut EngineState,
    obj: &Objective,
    dynamics: &Dynamics,
    epsilon: f64,
) -> bool {
    let (trail, removed, added) = {
        let ctx = GainContext::new(obj, &state.partition);
        let proposals = ctx.enumerate(i, dynamics.filter);
        let Some(&trail) = ctx.best(&proposals) else {
            return false;
        };
        let last_gain = maintained_gain(&ctx, i, state.last_op[i]);
        let accept = if dynamics.learning.greedy {
            trail.gain >= last_gain
        } else {
            log_linear_accept(&mut state.rng, trail.gain, last_gain, epsilon)
        };
        if !accept {
            return false;
        }
        let t = transition(&trail.op, &state.partition, obj)
            .expect("enumerated operations are well formed");
        (trail, t.removed, t.added)
    };
    let anchor = state.partition.coalition(trail.op.dst).head();
    let before = state
        .audit
        .as_ref()
        .map(|_| obj.potential(&state.partition));
    state
        .partition
        .replace(&removed, added)
        .expect("operations preserve the partition invariants");
    if let (Some(log), Some(before)) = (state.audit.as_mut(), before) {
        log.push(AppliedOp {
            slot: state.slot,
            proposal: trail,
            potential_before: before,
            potential_after: obj.potential(&state.partition),
        });
    }
    state.last_op[i] = Some(LastOp {
        kind: trail.op.kind,
        counterpart: trail.op.counterpart,
        anchor,
    });
    true
}

/// Splits coalitions the current graph no longer supports: the head keeps
/// members (ascending id) while the coalition stays feasible, the rest
/// become singletons. Returns the number of coalitions broken up.
pub fn repair(partition: &mut Partition, obj: &Objective) -> usize {
    let broken: Vec<usize> = (0..partition.len())
        .filter(|&k| !obj.feasible(partition.coalition(k).members()))
        .collect();
    if broken.is_empty() {
        return 0;
    }
    let mut added = Vec::new();
    for &k in &broken {
        let c = partition.coalition(k);
        let mut kept = vec![c.head()];
        let mut dropped = Vec::new();
        for &m in c.members() {
            if m == c.head() {
                continue;
            }
            let mut trial = kept.clone();
            trial.push(m);
            trial.sort_unstable();
            if obj.feasible(&trial) {
                kept = trial;
            } else {
                dropped.push(m);
            }
        }
        added.push(Coalition::new(c.head(), kept).expect("head kept"));
        added.extend(dropped.into_iter().map(Coalition::singleton));
    }
    partition
        .replace(&broken, added)
        .expect("repair preserves the cover");
    broken.len()
}

pub fn metrics(
    obj: &Objective,
    partition: &Partition,
    slot: usize,
    ops_applied: usize,
    epsilon: f64,
) -> MetricsRecord {
    let b = obj.global_objective(partition);
    MetricsRecord {
        slot,
        g1: b.g1,
        chi_total: b.chi_total(),
        e_total: b.e_total(),
        m: partition.len(),
        ops_applied,
        epsilon,
    }
}

/// Runs one slot on `graph`: repair, then activate every node once in a
/// fresh random order. Returns the number of applied operations.
pub fn run_slot(state: &mut EngineState, graph: &NetworkGraph, dynamics: &Dynamics) -> usize {
    let obj = Objective::new(graph, dynamics.params);
    repair(&mut state.partition, &obj);
    let epsilon = dynamics.learning.epsilon_at(state.slot);
    let mut order: Vec<NodeId> = (0..state.partition.node_count()).collect();
    order.shuffle(&mut state.rng);
    let mut applied = 0;
    for i in order {
        if dca_step(i, state, &obj, dynamics, epsilon) {
            applied += 1;
        }
    }
    let record = metrics(&obj, &state.partition, state.slot, applied, epsilon);
    state.trace.push(record);
    state.slot += 1;
    applied
}

/// Asynchronous scheduler over `slots` time slots. On a frozen topology in
/// greedy mode it stops after the first round that applies nothing.
pub fn run<T: Topology + ?Sized>(
    state: &mut EngineState,
    topology: &mut T,
    dynamics: &Dynamics,
    slots: usize,
) -> Result<()> {
    for _ in 0..slots {
        if state.slot > 0 && !topology.is_frozen() {
            topology.advance()?;
        }
        let applied = run_slot(state, topology.graph(), dynamics);
        if applied == 0 && topology.is_frozen() && dynamics.learning.greedy {
            break;
        }
    }
    Ok(())
}
