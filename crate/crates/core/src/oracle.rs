//! Brute-force ground truth for tiny instances: every head-assigned
//! partition, the constrained optimum, and a from-scratch Nash check that
//! rebuilds and rescores every deviation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{NetworkGraph, NodeId};
use crate::objective::{Coalition, Objective, ObjectiveParams, Partition};

pub const ENUMERATION_LIMIT: usize = 10;
pub const NASH_LIMIT: usize = 12;

/// Gains at or below this are not counted as deviations.
const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumeratedPartition {
    pub partition: Partition,
    pub score: f64,
    pub feasible: bool,
}

/// Calls `visit` with every set partition of `0..n` as a list of blocks.
fn for_each_set_partition(n: usize, visit: &mut impl FnMut(&[Vec<NodeId>])) {
    fn go(
        i: usize,
        n: usize,
        blocks: &mut Vec<Vec<NodeId>>,
        visit: &mut impl FnMut(&[Vec<NodeId>]),
    ) {
        if i == n {
            visit(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, visit);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, visit);
        blocks.pop();
    }
    go(0, n, &mut Vec::new(), visit);
}

/// Calls `visit` with every head assignment of every set partition.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(Partition)) {
    for_each_set_partition(n, &mut |blocks| {
        let mut choice = vec![0usize; blocks.len()];
        loop {
            let coalitions = blocks
                .iter()
                .zip(&choice)
                .map(|(b, &k)| Coalition::new(b[k], b.iter().copied()).expect("head in block"))
                .collect();
            visit(Partition::new(n, coalitions).expect("blocks cover 0..n"));
            let mut k = 0;
            loop {
                if k == blocks.len() {
                    return;
                }
                choice[k] += 1;
                if choice[k] < blocks[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    });
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { nodes: n, limit });
    }
    Ok(())
}

pub fn enumerate_all(
    graph: &NetworkGraph,
    params: &ObjectiveParams,
) -> Result<Vec<EnumeratedPartition>> {
    check_size(graph.len(), ENUMERATION_LIMIT)?;
    let obj = Objective::new(graph, *params);
    let mut out = Vec::new();
    for_each_partition(graph.len(), |partition| {
        let score = obj.global_objective(&partition).g1;
        let feasible = obj.all_feasible(&partition);
        out.push(EnumeratedPartition {
            partition,
            score,
            feasible,
        });
    });
    Ok(out)
}

/// Highest-scoring feasible partition; ties keep the first enumerated.
pub fn optimum(graph: &NetworkGraph, params: &ObjectiveParams) -> Result<EnumeratedPartition> {
    check_size(graph.len(), ENUMERATION_LIMIT)?;
    let obj = Objective::new(graph, *params);
    let mut best: Option<EnumeratedPartition> = None;
    for_each_partition(graph.len(), |partition| {
        if !obj.all_feasible(&partition) {
            return;
        }
        let score = obj.global_objective(&partition).g1;
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(EnumeratedPartition {
                partition,
                score,
                feasible: true,
            });
        }
    });
    Ok(best.expect("all singletons are feasible"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationKind {
    HeadElection,
    Join,
    Swap,
    Replace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub kind: DeviationKind,
    pub actor: NodeId,
    pub counterpart: Option<NodeId>,
    /// Lowest member of the coalition the actor moves into.
    pub target: NodeId,
    pub after: Partition,
    pub gain: f64,
    pub admissible: bool,
}

/// Member with the largest sum of bottleneck capacity to its in-coalition
/// neighbours; lowest id wins ties.
fn new_head(graph: &NetworkGraph, members: &[NodeId]) -> NodeId {
    let mut best = (f64::NEG_INFINITY, NodeId::MAX);
    for &m in members {
        let mut score = 0.0;
        for &x in members {
            if x != m && graph.has_edge(m, x) {
                score += graph.kappa(m, x);
            }
        }
        if score > best.0 || (score == best.0 && m < best.1) {
            best = (score, m);
        }
    }
    best.1
}

/// Coalitions as plain (head, members) pairs, rebuilt into a partition.
fn assemble(graph: &NetworkGraph, groups: Vec<(NodeId, Vec<NodeId>)>) -> Partition {
    let coalitions = groups
        .into_iter()
        .filter(|(_, m)| !m.is_empty())
        .map(|(old_head, m)| {
            let head = if m.contains(&old_head) {
                old_head
            } else {
                new_head(graph, &m)
            };
            Coalition::new(head, m).expect("head among members")
        })
        .collect();
    Partition::new(graph.len(), coalitions).expect("deviation keeps the cover")
}

/// Every head election, join, swap and replace of `actor` towards coalitions
/// holding one of its neighbours, each rescored from scratch.
pub fn deviations(
    partition: &Partition,
    graph: &NetworkGraph,
    params: &ObjectiveParams,
    actor: NodeId,
) -> Vec<Deviation> {
    let obj = Objective::new(graph, *params);
    let base = obj.global_objective(partition).g1;
    let groups: Vec<(NodeId, Vec<NodeId>)> = partition
        .coalitions()
        .iter()
        .map(|c| (c.head(), c.members().to_vec()))
        .collect();
    let own = groups
        .iter()
        .position(|(_, m)| m.contains(&actor))
        .expect("actor is covered");
    let mut targets: Vec<usize> = Vec::new();
    for (k, (_, m)) in groups.iter().enumerate() {
        if k != own && m.iter().any(|&x| graph.has_edge(actor, x)) {
            targets.push(k);
        }
    }

    let score = |kind, counterpart, target, after: Partition| {
        let changed: Vec<&Coalition> = after
            .coalitions()
            .iter()
            .filter(|c| !partition.coalitions().contains(c))
            .collect();
        let admissible = changed.iter().all(|c| obj.coalition_value(c, &after) > 0.0);
        let gain = obj.global_objective(&after).g1 - base;
        Deviation {
            kind,
            actor,
            counterpart,
            target,
            after,
            gain,
            admissible,
        }
    };

    let mut out = Vec::new();
    let (own_head, own_members) = &groups[own];
    if *own_head != actor {
        let mut g = groups.clone();
        g[own].0 = actor;
        out.push(score(
            DeviationKind::HeadElection,
            Some(*own_head),
            own_members[0],
            assemble(graph, g),
        ));
    }
    let without = |members: &[NodeId], x: NodeId| -> Vec<NodeId> {
        members.iter().copied().filter(|&y| y != x).collect()
    };
    for &t in &targets {
        let target_members = &groups[t].1;
        let target = *target_members.iter().min().expect("non-empty");

        let mut g = groups.clone();
        g[own].1 = without(own_members, actor);
        g[t].1.push(actor);
        g[t].1.sort_unstable();
        out.push(score(DeviationKind::Join, None, target, assemble(graph, g)));

        for &j in target_members {
            let mut g = groups.clone();
            g[own].1 = without(own_members, actor);
            g[own].1.push(j);
            g[own].1.sort_unstable();
            g[t].1 = without(target_members, j);
            g[t].1.push(actor);
            g[t].1.sort_unstable();
            out.push(score(
                DeviationKind::Swap,
                Some(j),
                target,
                assemble(graph, g),
            ));

            let mut g = groups.clone();
            g[own].1 = without(own_members, actor);
            g[t].1 = without(target_members, j);
            g[t].1.push(actor);
            g[t].1.sort_unstable();
            g.push((j, vec![j]));
            out.push(score(
                DeviationKind::Replace,
                Some(j),
                target,
                assemble(graph, g),
            ));
        }
    }
    out
}

/// True iff no node has an admissible deviation with positive gain.
pub fn verify_nash(
    partition: &Partition,
    graph: &NetworkGraph,
    params: &ObjectiveParams,
) -> Result<bool> {
    check_size(graph.len(), NASH_LIMIT)?;
    Ok(first_witness(partition, graph, params).is_none())
}

/// The first improving admissible deviation found, scanning actors by id.
pub fn first_witness(
    partition: &Partition,
    graph: &NetworkGraph,
    params: &ObjectiveParams,
) -> Option<Deviation> {
    (0..graph.len())
        .flat_map(|i| deviations(partition, graph, params, i))
        .find(|d| d.admissible && d.gain > TOLERANCE)
}
