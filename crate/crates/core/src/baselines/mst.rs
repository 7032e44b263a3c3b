use serde::Serialize;

use crate::error::Result;
use crate::game::{
    metrics, repair, successor_head, GainContext, MetricsRecord, Transition, GAIN_EPS,
};
use crate::net::{NetworkGraph, NodeId, Topology};
use crate::objective::{Coalition, Objective, ObjectiveParams, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MstMoveKind {
    Merge,
    Split,
    Transfer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstMove {
    pub kind: MstMoveKind,
    pub transition: Transition,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstOutcome {
    pub partition: Partition,
    /// Potential increase of every applied move, in order.
    pub gains: Vec<f64>,
}

impl MstOutcome {
    pub fn iterations(&self) -> usize {
        self.gains.len()
    }
}

/// Picks a head for every part by one pass of coordinate ascent on the
/// potential change, starting from the surviving old head (or the
/// successor rule). Returns the transition if it is admissible and improving.
fn with_best_heads(
    ctx: &GainContext,
    removed: Vec<usize>,
    parts: Vec<Vec<NodeId>>,
) -> Option<(Transition, f64)> {
    let old_heads: Vec<NodeId> = removed
        .iter()
        .map(|&k| ctx.partition.coalition(k).head())
        .collect();
    let added: Vec<Coalition> = parts
        .into_iter()
        .map(|members| {
            let head = old_heads
                .iter()
                .copied()
                .find(|h| members.binary_search(h).is_ok())
                .unwrap_or_else(|| successor_head(ctx.obj, &members));
            Coalition::new(head, members).expect("head chosen among members")
        })
        .collect();
    let mut t = Transition { removed, added };
    let mut gain = ctx.delta(&t);
    for k in 0..t.added.len() {
        let members = t.added[k].members().to_vec();
        let mut best = t.added[k].clone();
        for &h in &members {
            if h == best.head() {
                continue;
            }
            t.added[k] = best.with_head(h).expect("member");
            let g = ctx.delta(&t);
            if g > gain {
                gain = g;
                best = t.added[k].clone();
            }
        }
        t.added[k] = best;
    }
    (gain > GAIN_EPS && ctx.admissible(&t)).then_some((t, gain))
}

fn sorted_union(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out
}

/// Best improving merge, split or transfer over the whole partition.
/// Splits are limited to peeling off one member and to cutting a
/// coalition into the head's closed neighbourhood and the rest.
pub fn mst_best_move(obj: &Objective, partition: &Partition) -> Option<MstMove> {
    let ctx = GainContext::new(obj, partition);
    let n_max = obj.params.n_max;
    let m = partition.len();
    let mut best: Option<MstMove> = None;
    let mut offer = |kind: MstMoveKind, found: Option<(Transition, f64)>| {
        if let Some((transition, gain)) = found {
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(MstMove {
                    kind,
                    transition,
                    gain,
                });
            }
        }
    };

    for a in 0..m {
        for b in a + 1..m {
            let (ca, cb) = (partition.coalition(a), partition.coalition(b));
            if ca.len() + cb.len() > n_max {
                continue;
            }
            let union = sorted_union(ca.members(), cb.members());
            if obj.feasible(&union) {
                offer(
                    MstMoveKind::Merge,
                    with_best_heads(&ctx, vec![a, b], vec![union]),
                );
            }
        }
    }

    for a in 0..m {
        let c = partition.coalition(a);
        if c.len() < 2 {
            continue;
        }
        for &x in c.members() {
            let rest: Vec<NodeId> = c.members().iter().copied().filter(|&y| y != x).collect();
            if obj.feasible(&rest) {
                offer(
                    MstMoveKind::Split,
                    with_best_heads(&ctx, vec![a], vec![rest, vec![x]]),
                );
            }
        }
        let (core, periphery): (Vec<NodeId>, Vec<NodeId>) = c
            .members()
            .iter()
            .partition(|&&y| y == c.head() || obj.graph.has_edge(c.head(), y));
        if periphery.len() > 1 && obj.feasible(&core) && obj.feasible(&periphery) {
            offer(
                MstMoveKind::Split,
                with_best_heads(&ctx, vec![a], vec![core, periphery]),
            );
        }
    }

    for i in 0..partition.node_count() {
        let s = partition.index_of(i);
        let rest: Vec<NodeId> = partition
            .coalition(s)
            .members()
            .iter()
            .copied()
            .filter(|&y| y != i)
            .collect();
        if !obj.feasible(&rest) {
            continue;
        }
        for b in 0..m {
            let dst = partition.coalition(b);
            if b == s || dst.len() + 1 > n_max {
                continue;
            }
            let grown = sorted_union(dst.members(), &[i]);
            if !obj.feasible(&grown) {
                continue;
            }
            let mut parts = Vec::with_capacity(2);
            if !rest.is_empty() {
                parts.push(rest.clone());
            }
            parts.push(grown);
            offer(
                MstMoveKind::Transfer,
                with_best_heads(&ctx, vec![s, b], parts),
            );
        }
    }
    best
}

/// Centralized merge/split/transfer search from all singletons.
pub fn mst_cfa(graph: &NetworkGraph, params: &ObjectiveParams) -> MstOutcome {
    mst_cfa_from(graph, params, Partition::singletons(graph.len()))
}

/// Applies the single best improving move until none is left.
pub fn mst_cfa_from(
    graph: &NetworkGraph,
    params: &ObjectiveParams,
    initial: Partition,
) -> MstOutcome {
    let obj = Objective::new(graph, *params);
    let mut partition = initial;
    repair(&mut partition, &obj);
    let mut gains = Vec::new();
    while let Some(mv) = mst_best_move(&obj, &partition) {
        partition
            .replace(&mv.transition.removed, mv.transition.added)
            .expect("moves preserve the partition invariants");
        gains.push(mv.gain);
    }
    MstOutcome { partition, gains }
}

/// Centralized clustering maintenance over `slots` slots of a moving
/// network: each slot repairs the current partition and then searches to
/// convergence from it. One trace row per slot, `ops_applied` counting moves.
pub fn mst_cfa_tracking<T: Topology + ?Sized>(
    initial: Partition,
    topology: &mut T,
    params: &ObjectiveParams,
    slots: usize,
) -> Result<(Partition, Vec<MetricsRecord>)> {
    let mut partition = initial;
    let mut trace = Vec::with_capacity(slots);
    for slot in 0..slots {
        if slot > 0 && !topology.is_frozen() {
            topology.advance()?;
        }
        let outcome = mst_cfa_from(topology.graph(), params, partition);
        partition = outcome.partition;
        let obj = Objective::new(topology.graph(), *params);
        trace.push(metrics(&obj, &partition, slot, outcome.gains.len(), 0.0));
        if outcome.gains.is_empty() && topology.is_frozen() {
            break;
        }
    }
    Ok((partition, trace))
}
