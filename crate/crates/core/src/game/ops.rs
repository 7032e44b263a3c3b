//! Operations on a partition and their gains.
//!
//! The gain of an operation is the change of the potential `sum_S v(S)`
//! between the partition before and after the move. For moves that keep the
//! coalition count and head set this is exactly the textbook difference of
//! the touched coalitions' values; otherwise it additionally carries the
//! shift that the new `M` and head set induce on every other coalition.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::NodeId;
use crate::objective::{Coalition, Objective, Partition};

/// Gains at or below this are treated as zero.
pub const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    HeadElection,
    Switch,
    Replace,
}

/// Structural description of a move. `counterpart = None` on a switch is
/// the unilateral join of `actor` into `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    pub actor: NodeId,
    pub counterpart: Option<NodeId>,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationProposal {
    #[serde(flatten)]
    pub op: Operation,
    pub gain: f64,
}

/// Which operation families a node may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpFilter {
    pub head_election: bool,
    pub join: bool,
    pub switch: bool,
    pub replace: bool,
}

impl OpFilter {
    pub const ALL: OpFilter = OpFilter {
        head_election: true,
        join: true,
        switch: true,
        replace: true,
    };
    pub const JOINS_ONLY: OpFilter = OpFilter {
        head_election: false,
        join: true,
        switch: false,
        replace: false,
    };
}

/// Coalitions touched by an operation and what replaces them.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub removed: Vec<usize>,
    pub added: Vec<Coalition>,
}

/// Head of a coalition whose head left: the member with the largest
/// outgoing one-hop capacity inside the coalition, lowest id on ties.
pub fn successor_head(obj: &Objective, members: &[NodeId]) -> NodeId {
    let mut best = members[0];
    let mut best_score = f64::NEG_INFINITY;
    for &m in members {
        let row = obj.graph.kappa_row(m);
        let score: f64 = obj
            .graph
            .neighbors(m)
            .iter()
            .filter(|j| members.binary_search(j).is_ok())
            .map(|&j| row[j])
            .sum();
        if score > best_score {
            best = m;
            best_score = score;
        }
    }
    best
}

fn rebuild(obj: &Objective, old_head: NodeId, members: Vec<NodeId>) -> Coalition {
    let mut members = members;
    members.sort_unstable();
    let head = if members.binary_search(&old_head).is_ok() {
        old_head
    } else {
        successor_head(obj, &members)
    };
    Coalition::new(head, members).expect("head chosen among members")
}

/// Post-operation coalitions, or a structural error.
pub fn transition(op: &Operation, partition: &Partition, obj: &Objective) -> Result<Transition> {
    let bad = |msg: &str| Err(Error::MalformedOperation(format!("{op:?}: {msg}")));
    if op.actor >= partition.node_count() || op.src >= partition.len() || op.dst >= partition.len()
    {
        return bad("index out of range");
    }
    let src = partition.coalition(op.src);
    if !src.contains(op.actor) {
        return bad("actor is not in the source coalition");
    }
    match op.kind {
        OpKind::HeadElection => {
            if op.dst != op.src || op.counterpart != Some(src.head()) || src.head() == op.actor {
                return bad(
                    "head election must target the current head of the actor's own coalition",
                );
            }
            Ok(Transition {
                removed: vec![op.src],
                added: vec![src.with_head(op.actor)?],
            })
        }
        OpKind::Switch | OpKind::Replace => {
            if op.dst == op.src {
                return bad("destination equals source");
            }
            let dst = partition.coalition(op.dst);
            if let Some(j) = op.counterpart {
                if !dst.contains(j) {
                    return bad("counterpart is not in the destination coalition");
                }
            } else if op.kind == OpKind::Replace {
                return bad("replace needs a counterpart");
            }
            let src_rest: Vec<NodeId> = src
                .members()
                .iter()
                .copied()
                .filter(|&m| m != op.actor)
                .collect();
            let mut dst_new: Vec<NodeId> = dst
                .members()
                .iter()
                .copied()
                .filter(|&m| Some(m) != op.counterpart)
                .collect();
            dst_new.push(op.actor);
            let mut added = Vec::with_capacity(3);
            match (op.kind, op.counterpart) {
                (OpKind::Switch, Some(j)) => {
                    let mut src_new = src_rest;
                    src_new.push(j);
                    added.push(rebuild(obj, src.head(), src_new));
                    added.push(rebuild(obj, dst.head(), dst_new));
                }
                _ => {
                    if !src_rest.is_empty() {
                        added.push(rebuild(obj, src.head(), src_rest));
                    }
                    added.push(rebuild(obj, dst.head(), dst_new));
                    if let Some(j) = op.counterpart {
                        added.push(Coalition::singleton(j));
                    }
                }
            }
            Ok(Transition {
                removed: vec![op.src, op.dst],
                added,
            })
        }
    }
}

/// Partition-level aggregates needed to score transitions incrementally.
#[derive(Debug, Clone)]
pub struct GainContext<'a, 'g> {
    pub obj: &'a Objective<'g>,
    pub partition: &'a Partition,
    heads: Vec<NodeId>,
    is_head: Vec<bool>,
}

impl<'a, 'g> GainContext<'a, 'g> {
    pub fn new(obj: &'a Objective<'g>, partition: &'a Partition) -> Self {
        let heads: Vec<NodeId> = partition.heads().collect();
        let mut is_head = vec![false; partition.node_count()];
        for &h in &heads {
            is_head[h] = true;
        }
        Self {
            obj,
            partition,
            heads,
            is_head,
        }
    }

    /// `sum_{k in kept} kappa(k,x) + kappa(x,k)` where kept = current heads minus `dropped`.
    fn cross(&self, x: NodeId, dropped: &[NodeId]) -> f64 {
        let row = self.obj.graph.kappa_row(x);
        let mut sum = 0.0;
        for &k in &self.heads {
            if k == x || dropped.contains(&k) {
                continue;
            }
            sum += row[k] + self.obj.graph.kappa(k, x);
        }
        sum
    }

    fn pair_sum(&self, set: &[NodeId]) -> f64 {
        let mut sum = 0.0;
        for &a in set {
            for &b in set {
                if a != b {
                    sum += self.obj.graph.kappa(a, b);
                }
            }
        }
        sum
    }

    /// Change in the sum over ordered head pairs of kappa.
    fn head_pair_delta(&self, t: &Transition) -> f64 {
        let old: Vec<NodeId> = t
            .removed
            .iter()
            .map(|&k| self.partition.coalition(k).head())
            .collect();
        let new: Vec<NodeId> = t.added.iter().map(Coalition::head).collect();
        let lost: Vec<NodeId> = old.iter().copied().filter(|h| !new.contains(h)).collect();
        let gained: Vec<NodeId> = new.iter().copied().filter(|h| !old.contains(h)).collect();
        if lost.is_empty() && gained.is_empty() {
            return 0.0;
        }
        debug_assert!(gained.iter().all(|&h| !self.is_head[h]));
        let gained_terms: f64 =
            gained.iter().map(|&a| self.cross(a, &lost)).sum::<f64>() + self.pair_sum(&gained);
        let lost_terms: f64 =
            lost.iter().map(|&r| self.cross(r, &lost)).sum::<f64>() + self.pair_sum(&lost);
        gained_terms - lost_terms
    }

    fn post_m(&self, t: &Transition) -> usize {
        self.partition.len() + t.added.len() - t.removed.len()
    }

    /// Potential change caused by `t`.
    pub fn delta(&self, t: &Transition) -> f64 {
        let obj = self.obj;
        let p = &obj.params;
        let mut d_chi_intra = 0.0;
        let mut d_e_intra = 0.0;
        for &k in &t.removed {
            let c = self.partition.coalition(k);
            d_chi_intra -= obj.chi_intra(c.members());
            d_e_intra -= obj.e_intra(c.len());
        }
        for c in &t.added {
            d_chi_intra += obj.chi_intra(c.members());
            d_e_intra += obj.e_intra(c.len());
        }
        let m = self.partition.len() as f64;
        let m2 = self.post_m(t) as f64;
        let d_e_inter = p.v_inter * (m2 * (m2 - 1.0) - m * (m - 1.0));
        let d_chi = d_chi_intra + p.beta * self.head_pair_delta(t);
        (1.0 - p.zeta) * d_chi / obj.norm.chi_max
            - p.zeta * (d_e_intra + d_e_inter) / obj.norm.e_max
    }

    /// Every post-operation coalition must have positive value, which also
    /// requires it to satisfy the size and diameter constraints.
    pub fn admissible(&self, t: &Transition) -> bool {
        let obj = self.obj;
        let p = &obj.params;
        let m2 = self.post_m(t);
        for c in &t.added {
            if !obj.feasible(c.members()) {
                return false;
            }
            let overhead_part =
                obj.norm.e_max / m2 as f64 - obj.e_inter_share(m2) - obj.e_intra(c.len());
            if overhead_part > 0.0 {
                continue;
            }
            let heads = self.post_heads(t);
            let chi =
                obj.chi_intra(c.members()) + obj.chi_inter_from(c.head(), heads.iter().copied());
            let v =
                (1.0 - p.zeta) * chi / obj.norm.chi_max + p.zeta * overhead_part / obj.norm.e_max;
            if !(v > 0.0) {
                return false;
            }
        }
        true
    }

    fn post_heads(&self, t: &Transition) -> Vec<NodeId> {
        let old: Vec<NodeId> = t
            .removed
            .iter()
            .map(|&k| self.partition.coalition(k).head())
            .collect();
        let mut heads: Vec<NodeId> = self
            .heads
            .iter()
            .copied()
            .filter(|h| !old.contains(h))
            .collect();
        heads.extend(t.added.iter().map(Coalition::head));
        heads
    }

    /// Gain of a structurally valid operation (admissibility not checked).
    pub fn gain(&self, op: &Operation) -> Result<f64> {
        let t = transition(op, self.partition, self.obj)?;
        Ok(self.delta(&t))
    }

    /// Gain if the operation is structurally valid, targets a neighbouring
    /// coalition and is admissible; `None` otherwise.
    pub fn evaluate(&self, op: &Operation) -> Option<f64> {
        if op.kind != OpKind::HeadElection && !self.neighbor_clusters(op.actor).contains(&op.dst) {
            return None;
        }
        let t = transition(op, self.partition, self.obj).ok()?;
        self.admissible(&t).then(|| self.delta(&t))
    }

    /// Coalitions other than the actor's own that hold a one-hop neighbour.
    pub fn neighbor_clusters(&self, i: NodeId) -> Vec<usize> {
        let own = self.partition.index_of(i);
        let mut out: Vec<usize> = self
            .obj
            .graph
            .neighbors(i)
            .iter()
            .map(|&j| self.partition.index_of(j))
            .filter(|&k| k != own)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every admissible operation of node `i` with gain above [`GAIN_EPS`].
    pub fn enumerate(&self, i: NodeId, filter: OpFilter) -> Vec<OperationProposal> {
        let mut out = Vec::new();
        let src = self.partition.index_of(i);
        let consider = |op: Operation, out: &mut Vec<OperationProposal>| {
            if let Ok(t) = transition(&op, self.partition, self.obj) {
                let gain = self.delta(&t);
                if gain > GAIN_EPS && self.admissible(&t) {
                    out.push(OperationProposal { op, gain });
                }
            }
        };
        for dst in self.neighbor_clusters(i) {
            if filter.join {
                let op = Operation {
                    kind: OpKind::Switch,
                    actor: i,
                    counterpart: None,
                    src,
                    dst,
                };
                consider(op, &mut out);
            }
            if filter.switch || filter.replace {
                for &j in self.partition.coalition(dst).members() {
                    if filter.switch {
                        let op = Operation {
                            kind: OpKind::Switch,
                            actor: i,
                            counterpart: Some(j),
                            src,
                            dst,
                        };
                        consider(op, &mut out);
                    }
                    if filter.replace {
                        let op = Operation {
                            kind: OpKind::Replace,
                            actor: i,
                            counterpart: Some(j),
                            src,
                            dst,
                        };
                        consider(op, &mut out);
                    }
                }
            }
        }
        let own = self.partition.coalition(src);
        if filter.head_election && own.head() != i {
            let op = Operation {
                kind: OpKind::HeadElection,
                actor: i,
                counterpart: Some(own.head()),
                src,
                dst: src,
            };
            consider(op, &mut out);
        }
        out
    }

    fn dst_key(&self, op: &Operation) -> NodeId {
        self.partition.coalition(op.dst).members()[0]
    }

    /// Highest gain; ties go to the lower kind, then the lower counterpart
    /// (a join before any swap), then the destination with the lowest member.
    pub fn best<'p>(&self, proposals: &'p [OperationProposal]) -> Option<&'p OperationProposal> {
        proposals.iter().min_by(|a, b| {
            b.gain
                .partial_cmp(&a.gain)
                .unwrap_or(Ordering::Equal)
                .then(a.op.kind.cmp(&b.op.kind))
                .then(a.op.counterpart.cmp(&b.op.counterpart))
                .then(self.dst_key(&a.op).cmp(&self.dst_key(&b.op)))
        })
    }
}
