//! Two-objective partition score: cooperative capacity against management
//! overhead, plus the per-coalition value whose sum reproduces it.
//!
//! Normalisation constants are per graph snapshot:
//! - `chi_max = sum over directed edges of Rt / alpha` (1 when edgeless)
//! - `e_max = (v_intra + v_inter) * N * (N - 1)` (1 when N = 1)
//!
//! Each coalition carries an inter-cluster overhead share of
//! `v_inter * (M - 1)`, so the shares add up to `v_inter * M * (M - 1)`.

mod partition;

pub use partition::{Coalition, Partition};

use serde::{Deserialize, Serialize};

use crate::net::{NetworkGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub zeta: f64,
    pub beta: f64,
    pub v_intra: f64,
    pub v_inter: f64,
    pub n_max: usize,
    pub d_max: usize,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        Self {
            zeta: 0.5,
            beta: 0.1,
            v_intra: 1.0,
            v_inter: 0.2,
            n_max: 15,
            d_max: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub chi_max: f64,
    pub e_max: f64,
}

impl Normalization {
    pub fn for_graph(graph: &NetworkGraph, params: &ObjectiveParams) -> Self {
        let chi = graph.total_rate() / graph.alpha();
        let n = graph.len() as f64;
        let e = (params.v_intra + params.v_inter) * n * (n - 1.0);
        Self {
            chi_max: if chi > 0.0 { chi } else { 1.0 },
            e_max: if e > 0.0 { e } else { 1.0 },
        }
    }
}

/// Per-partition totals, one row of the objective breakdown output.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Breakdown {
    pub chi_intra: f64,
    pub chi_inter: f64,
    pub e_intra: f64,
    pub e_inter: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
}

impl Breakdown {
    pub fn chi_total(&self) -> f64 {
        self.chi_intra + self.chi_inter
    }

    pub fn e_total(&self) -> f64 {
        self.e_intra + self.e_inter
    }
}

/// Scoring context bound to one graph snapshot.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'g> {
    pub graph: &'g NetworkGraph,
    pub params: ObjectiveParams,
    pub norm: Normalization,
}

impl<'g> Objective<'g> {
    pub fn new(graph: &'g NetworkGraph, params: ObjectiveParams) -> Self {
        Self {
            graph,
            params,
            norm: Normalization::for_graph(graph, &params),
        }
    }

    /// Sum of `kappa` over ordered one-hop neighbour pairs inside the coalition.
    pub fn chi_intra(&self, members: &[NodeId]) -> f64 {
        let mut sum = 0.0;
        for &i in members {
            for &j in self.graph.neighbors(i) {
                if members.binary_search(&j).is_ok() {
                    sum += self.graph.kappa(i, j);
                }
            }
        }
        sum
    }

    /// `beta` times the outgoing capacity from `head` to every other head.
    pub fn chi_inter_from(&self, head: NodeId, heads: impl IntoIterator<Item = NodeId>) -> f64 {
        let row = self.graph.kappa_row(head);
        let sum: f64 = heads
            .into_iter()
            .filter(|&j| j != head)
            .map(|j| row[j])
            .sum();
        self.params.beta * sum
    }

    pub fn chi_inter(&self, coalition: &Coalition, partition: &Partition) -> f64 {
        self.chi_inter_from(coalition.head(), partition.heads())
    }

    pub fn e_intra(&self, size: usize) -> f64 {
        let s = size as f64;
        self.params.v_intra * s * (s - 1.0)
    }

    pub fn e_inter_share(&self, m: usize) -> f64 {
        self.params.v_inter * (m as f64 - 1.0)
    }

    /// `(e_inter, e_intra)` of one coalition inside a partition of `M` coalitions.
    pub fn overhead(&self, coalition: &Coalition, partition: &Partition) -> (f64, f64) {
        (
            self.e_inter_share(partition.len()),
            self.e_intra(coalition.len()),
        )
    }

    /// Size bound plus connectivity and hop diameter of the induced subgraph.
    pub fn feasible(&self, members: &[NodeId]) -> bool {
        if members.len() > self.params.n_max {
            return false;
        }
        if members.len() <= 1 {
            return true;
        }
        induced_diameter(self.graph, members).is_some_and(|d| d <= self.params.d_max)
    }

    pub fn coalition_value(&self, coalition: &Coalition, partition: &Partition) -> f64 {
        if !self.feasible(coalition.members()) {
            return 0.0;
        }
        let chi = self.chi_intra(coalition.members()) + self.chi_inter(coalition, partition);
        let (e_inter, e_intra) = self.overhead(coalition, partition);
        let m = partition.len() as f64;
        let p = &self.params;
        (1.0 - p.zeta) * chi / self.norm.chi_max
            + p.zeta * (self.norm.e_max / m - e_inter - e_intra) / self.norm.e_max
    }

    /// Sum of coalition values; equals `G1` when every coalition is feasible.
    pub fn potential(&self, partition: &Partition) -> f64 {
        partition
            .coalitions()
            .iter()
            .map(|c| self.coalition_value(c, partition))
            .sum()
    }

    /// Global objective from network-level totals. Infeasible coalitions
    /// still contribute their raw capacity and overhead terms.
    pub fn global_objective(&self, partition: &Partition) -> Breakdown {
        let heads: Vec<NodeId> = partition.heads().collect();
        let mut chi_intra = 0.0;
        let mut e_intra = 0.0;
        for c in partition.coalitions() {
            chi_intra += self.chi_intra(c.members());
            e_intra += self.e_intra(c.len());
        }
        let mut head_pairs = 0.0;
        for &a in &heads {
            let row = self.graph.kappa_row(a);
            for &b in &heads {
                if a != b {
                    head_pairs += row[b];
                }
            }
        }
        let chi_inter = self.params.beta * head_pairs;
        let m = heads.len() as f64;
        let e_inter = self.params.v_inter * m * (m - 1.0);
        let p = &self.params;
        let g1 = (1.0 - p.zeta) * (chi_intra + chi_inter) / self.norm.chi_max
            + p.zeta * (self.norm.e_max - e_intra - e_inter) / self.norm.e_max;
        Breakdown {
            chi_intra,
            chi_inter,
            e_intra,
            e_inter,
            g1,
        }
    }

    pub fn all_feasible(&self, partition: &Partition) -> bool {
        partition
            .coalitions()
            .iter()
            .all(|c| self.feasible(c.members()))
    }
}

/// Hop diameter of the subgraph induced by `members` (sorted), or `None`
/// when that subgraph is disconnected.
pub fn induced_diameter(graph: &NetworkGraph, members: &[NodeId]) -> Option<usize> {
    let k = members.len();
    let mut dist = vec![usize::MAX; k];
    let mut queue = Vec::with_capacity(k);
    let mut diameter = 0;
    for src in 0..k {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push(src);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in graph.neighbors(members[u]) {
                if let Ok(pos) = members.binary_search(&v) {
                    if dist[pos] == usize::MAX {
                        dist[pos] = dist[u] + 1;
                        diameter = diameter.max(dist[pos]);
                        queue.push(pos);
                    }
                }
            }
        }
        if queue.len() < k {
            return None;
        }
    }
    Some(diameter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;

    fn path_graph(n: usize, rate: f64) -> NetworkGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, rate, rate)).collect();
        NetworkGraph::from_edges(n, &edges, 2.0).unwrap()
    }

    fn part(n: usize, groups: &[(NodeId, &[NodeId])]) -> Result<Partition> {
        Partition::new(
            n,
            groups
                .iter()
                .map(|(h, m)| Coalition::new(*h, m.iter().copied()).unwrap())
                .collect(),
        )
    }

    #[test]
    fn chi_intra_cases() {
        let g = path_graph(2, 10.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        assert_eq!(obj.chi_intra(&[0]), 0.0);
        assert_eq!(obj.chi_intra(&[0, 1]), 10.0);
    }

    /// Six nodes in three clusters {1,2,3}, {4,5}, {6} relabelled to 0-based
    /// ids 0..6; intra edges drawn: 1-2, 1-3, 2-3 and 4-5.
    #[test]
    fn chi_intra_hand_sum_on_six_nodes() {
        let edges = [
            (0, 1, 4.0, 6.0),
            (0, 2, 8.0, 8.0),
            (1, 2, 2.0, 10.0),
            (2, 3, 20.0, 20.0),
            (3, 4, 12.0, 14.0),
            (4, 5, 30.0, 30.0),
        ];
        let g = NetworkGraph::from_edges(6, &edges, 2.0).unwrap();
        let obj = Objective::new(&g, ObjectiveParams::default());
        let p = part(6, &[(0, &[0, 1, 2]), (3, &[3, 4]), (5, &[5])]).unwrap();
        let total: f64 = p
            .coalitions()
            .iter()
            .map(|c| obj.chi_intra(c.members()))
            .sum();
        // (4+6+8+8+2+10)/2 + (12+14)/2
        assert_eq!(total, 19.0 + 13.0);
    }

    #[test]
    fn chi_inter_three_heads_lists_both_directions() {
        // heads 0, 3, 5 on a path 0-1-2-3-4-5 with distinct rates
        let edges = [
            (0, 1, 9.0, 8.0),
            (1, 2, 7.0, 6.0),
            (2, 3, 5.0, 4.0),
            (3, 4, 3.0, 2.0),
            (4, 5, 10.0, 1.0),
        ];
        let g = NetworkGraph::from_edges(6, &edges, 2.0).unwrap();
        let params = ObjectiveParams {
            beta: 0.1,
            ..Default::default()
        };
        let obj = Objective::new(&g, params);
        let p = part(6, &[(0, &[0, 1]), (3, &[2, 3]), (5, &[4, 5])]).unwrap();
        let total: f64 = p.coalitions().iter().map(|c| obj.chi_inter(c, &p)).sum();
        let k = |a, b| g.kappa(a, b);
        let want = 0.1 * (k(0, 3) + k(3, 5) + k(0, 5) + k(3, 0) + k(5, 3) + k(5, 0));
        assert!((total - want).abs() < 1e-12);
        assert!((obj.global_objective(&p).chi_inter - want).abs() < 1e-12);
    }

    #[test]
    fn chi_inter_edge_cases() {
        let g = path_graph(3, 10.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        let grand = part(3, &[(1, &[0, 1, 2])]).unwrap();
        assert_eq!(obj.chi_inter(grand.coalition(0), &grand), 0.0);
        let zero_beta = Objective::new(
            &g,
            ObjectiveParams {
                beta: 0.0,
                ..Default::default()
            },
        );
        let singles = Partition::singletons(3);
        assert!(singles
            .coalitions()
            .iter()
            .all(|c| zero_beta.chi_inter(c, &singles) == 0.0));
    }

    #[test]
    fn overhead_cases() {
        let g = path_graph(1, 1.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        let p = Partition::singletons(1);
        assert_eq!(obj.overhead(p.coalition(0), &p), (0.0, 0.0));
        assert_eq!(obj.e_intra(15), 210.0);
    }

    #[test]
    fn inter_overhead_shares_sum_to_network_total() {
        let g = path_graph(9, 1.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        let p = part(
            9,
            &[
                (0, &[0, 1]),
                (2, &[2]),
                (3, &[3, 4, 5]),
                (6, &[6, 7]),
                (8, &[8]),
            ],
        )
        .unwrap();
        let m = p.len() as f64;
        let sum: f64 = p.coalitions().iter().map(|c| obj.overhead(c, &p).0).sum();
        assert!((sum - 0.2 * m * (m - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn feasibility_cases() {
        let g = path_graph(16, 1.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        assert!(obj.feasible(&[7]));
        let all: Vec<NodeId> = (0..16).collect();
        assert!(!obj.feasible(&all));
        assert!(!obj.feasible(&[0, 1, 2, 3]));
        assert!(obj.feasible(&[0, 1, 2]));
        assert!(!obj.feasible(&[0, 2]));
    }

    #[test]
    fn infeasible_coalition_scores_zero() {
        let g = path_graph(4, 1.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        let p = part(4, &[(0, &[0, 2]), (1, &[1]), (3, &[3])]).unwrap();
        assert_eq!(obj.coalition_value(p.coalition(0), &p), 0.0);
    }

    #[test]
    fn overhead_only_singleton_value() {
        let g = path_graph(5, 1.0);
        let obj = Objective::new(
            &g,
            ObjectiveParams {
                zeta: 1.0,
                ..Default::default()
            },
        );
        let p = Partition::singletons(5);
        let e_max = obj.norm.e_max;
        // the value carries the singleton's inter-cluster share as well
        let want = (e_max / 5.0 - 0.2 * 4.0) / e_max;
        assert!((obj.coalition_value(p.coalition(0), &p) - want).abs() < 1e-15);
    }

    #[test]
    fn all_singletons_overhead_only_objective() {
        let g = path_graph(6, 3.0);
        let obj = Objective::new(
            &g,
            ObjectiveParams {
                zeta: 1.0,
                ..Default::default()
            },
        );
        let p = Partition::singletons(6);
        let e_max = 1.2 * 30.0;
        let want = (e_max - 0.2 * 30.0) / e_max;
        assert!((obj.global_objective(&p).g1 - want).abs() < 1e-15);
        let shares: f64 = p.coalitions().iter().map(|c| obj.overhead(c, &p).0).sum();
        assert!((shares - 0.2 * 30.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_only_objective() {
        let g = path_graph(4, 5.0);
        let obj = Objective::new(
            &g,
            ObjectiveParams {
                zeta: 0.0,
                ..Default::default()
            },
        );
        let p = part(4, &[(1, &[0, 1, 2]), (3, &[3])]).unwrap();
        let b = obj.global_objective(&p);
        assert_eq!(b.g1, b.chi_total() / obj.norm.chi_max);
    }

    #[test]
    fn normalization_fallbacks() {
        let g = NetworkGraph::from_edges(1, &[], 2.0).unwrap();
        let norm = Normalization::for_graph(&g, &ObjectiveParams::default());
        assert_eq!(
            norm,
            Normalization {
                chi_max: 1.0,
                e_max: 1.0
            }
        );
    }

    #[test]
    fn adding_a_member_raises_intra_overhead() {
        let g = path_graph(2, 1.0);
        let obj = Objective::new(&g, ObjectiveParams::default());
        for s in 1..20 {
            assert!(obj.e_intra(s + 1) > obj.e_intra(s));
        }
    }

    #[test]
    fn diameter_of_induced_subgraph() {
        let g = path_graph(5, 1.0);
        assert_eq!(induced_diameter(&g, &[0, 1, 2, 3]), Some(3));
        assert_eq!(induced_diameter(&g, &[1, 3]), None);
        assert_eq!(induced_diameter(&g, &[4]), Some(0));
    }
}
