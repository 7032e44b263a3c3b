use std::collections::VecDeque;
use std::sync::OnceLock;

use super::channel::{link_rate, sinr, ChannelGain, ChannelParams};
use super::{Node, NodeId};
use crate::error::{Error, Result};

/// Undirected LOS graph with directed link rates and a lazily filled
/// multi-hop capacity cache.
///
/// `kappa(i, j)` is the bottleneck rate of the fewest-hop path from `i` to
/// `j`, divided by `alpha * hops`. Among fewest-hop paths the one with the
/// largest bottleneck wins; remaining ties only affect which path
/// [`NetworkGraph::shortest_path`] reports (lexicographically smallest ids).
#[derive(Debug)]
pub struct NetworkGraph {
    n: usize,
    adj: Vec<Vec<NodeId>>,
    /// Dense `n x n` directed rates; zero where there is no edge.
    rates: Vec<f64>,
    alpha: f64,
    total_rate: f64,
    kappa_rows: Vec<OnceLock<Box<[f64]>>>,
}

impl Clone for NetworkGraph {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            adj: self.adj.clone(),
            rates: self.rates.clone(),
            alpha: self.alpha,
            total_rate: self.total_rate,
            kappa_rows: (0..self.n).map(|_| OnceLock::new()).collect(),
        }
    }
}

impl NetworkGraph {
    /// Builds the graph from node geometry: an edge exists iff
    /// `d <= min(range_i, range_j)`; each direction gets its own rate.
    pub fn build(
        nodes: &[Node],
        ch: &ChannelParams,
        alpha: f64,
        gain: &ChannelGain,
    ) -> Result<Self> {
        let n = nodes.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = nodes[i].distance(&nodes[j]);
                if d <= nodes[i].range.min(nodes[j].range) {
                    let rij = link_rate(sinr(nodes, i, j, ch, gain)?, ch.bandwidth_hz);
                    let rji = link_rate(sinr(nodes, j, i, ch, gain)?, ch.bandwidth_hz);
                    edges.push((i, j, rij, rji));
                }
            }
        }
        Self::from_edges(n, &edges, alpha)
    }

    /// Builds a graph from explicit `(i, j, rate_ij, rate_ji)` edges.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, f64, f64)], alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::Config(format!(
                "multi-hop loss must exceed 1, got {alpha}"
            )));
        }
        let mut adj = vec![Vec::new(); n];
        let mut rates = vec![0.0; n * n];
        let mut total_rate = 0.0;
        for &(i, j, rij, rji) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::Config(format!("bad edge ({i}, {j}) for {n} nodes")));
            }
            if !(rij >= 0.0 && rji >= 0.0) {
                return Err(Error::Config(format!("negative rate on edge ({i}, {j})")));
            }
            if adj[i].contains(&j) {
                continue;
            }
            adj[i].push(j);
            adj[j].push(i);
            rates[i * n + j] = rij;
            rates[j * n + i] = rji;
            total_rate += rij + rji;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            adj,
            rates,
            alpha,
            total_rate,
            kappa_rows: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Directed rate `Rt_{i,j}`.
    pub fn link_rate(&self, i: NodeId, j: NodeId) -> Result<f64> {
        if self.has_edge(i, j) {
            Ok(self.rates[i * self.n + j])
        } else {
            Err(Error::AbsentEdge(i, j))
        }
    }

    /// Sum of `Rt` over all directed edges.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }

    fn rate(&self, i: NodeId, j: NodeId) -> f64 {
        self.rates[i * self.n + j]
    }

    /// Multi-hop capacity; 0 for `i == j` and for disconnected pairs.
    pub fn kappa(&self, i: NodeId, j: NodeId) -> f64 {
        self.kappa_row(i)[j]
    }

    pub fn kappa_row(&self, i: NodeId) -> &[f64] {
        self.kappa_rows[i].get_or_init(|| self.compute_kappa_row(i))
    }

    pub fn invalidate_kappa_cache(&mut self) {
        for row in &mut self.kappa_rows {
            row.take();
        }
    }

    pub fn cached_kappa_rows(&self) -> usize {
        self.kappa_rows.iter().filter(|r| r.get().is_some()).count()
    }

    /// Hop distances from `src`; `usize::MAX` when unreachable.
    pub fn hops_from(&self, src: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn compute_kappa_row(&self, src: NodeId) -> Box<[f64]> {
        let mut dist = vec![usize::MAX; self.n];
        let mut bottleneck = vec![0.0f64; self.n];
        let mut order = Vec::with_capacity(self.n);
        dist[src] = 0;
        bottleneck[src] = f64::INFINITY;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        // BFS order guarantees every predecessor is final before its successors
        for &v in order.iter().skip(1) {
            let mut best = 0.0f64;
            for &u in &self.adj[v] {
                if dist[u] != usize::MAX && dist[u] + 1 == dist[v] {
                    best = best.max(bottleneck[u].min(self.rate(u, v)));
                }
            }
            bottleneck[v] = best;
        }
        (0..self.n)
            .map(|v| {
                if v == src || dist[v] == usize::MAX {
                    0.0
                } else {
                    bottleneck[v] / (self.alpha * dist[v] as f64)
                }
            })
            .collect()
    }

    /// The path used for `kappa(i, j)`: fewest hops, then largest bottleneck,
    /// then lexicographically smallest node sequence.
    pub fn shortest_path(&self, i: NodeId, j: NodeId) -> Option<Vec<NodeId>> {
        if i == j {
            return Some(vec![i]);
        }
        let to_target = self.hops_from(j);
        if to_target[i] == usize::MAX {
            return None;
        }
        // best bottleneck from v to j over fewest-hop paths (Rt directed v -> ... -> j)
        let mut order: Vec<NodeId> = (0..self.n)
            .filter(|&v| to_target[v] != usize::MAX)
            .collect();
        order.sort_by_key(|&v| to_target[v]);
        let mut reach = vec![0.0f64; self.n];
        reach[j] = f64::INFINITY;
        for &v in order.iter().filter(|&&v| v != j) {
            let mut best = 0.0f64;
            for &w in &self.adj[v] {
                if to_target[w] != usize::MAX && to_target[w] + 1 == to_target[v] {
                    best = best.max(self.rate(v, w).min(reach[w]));
                }
            }
            reach[v] = best;
        }
        let target = reach[i];
        let mut path = vec![i];
        let mut u = i;
        while u != j {
            let next = self.adj[u]
                .iter()
                .copied()
                .find(|&v| {
                    to_target[v] != usize::MAX
                        && to_target[v] + 1 == to_target[u]
                        && self.rate(u, v).min(reach[v]) >= target
                })
                .expect("a successor on an optimal path exists");
            path.push(next);
            u = next;
        }
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive simple-path enumeration, independent of the BFS code.
    fn brute_kappa(g: &NetworkGraph, i: NodeId, j: NodeId) -> (f64, Option<Vec<NodeId>>) {
        fn walk(
            g: &NetworkGraph,
            u: NodeId,
            j: NodeId,
            path: &mut Vec<NodeId>,
            out: &mut Vec<Vec<NodeId>>,
        ) {
            if u == j {
                out.push(path.clone());
                return;
            }
            for &v in g.neighbors(u) {
                if !path.contains(&v) {
                    path.push(v);
                    walk(g, v, j, path, out);
                    path.pop();
                }
            }
        }
        if i == j {
            return (0.0, Some(vec![i]));
        }
        let mut all = Vec::new();
        walk(g, i, j, &mut vec![i], &mut all);
        if all.is_empty() {
            return (0.0, None);
        }
        let bn = |p: &Vec<NodeId>| {
            p.windows(2)
                .map(|w| g.link_rate(w[0], w[1]).unwrap())
                .fold(f64::INFINITY, f64::min)
        };
        let hops = all.iter().map(|p| p.len() - 1).min().unwrap();
        let mut best: Vec<_> = all.into_iter().filter(|p| p.len() - 1 == hops).collect();
        let top = best.iter().map(bn).fold(0.0, f64::max);
        best.retain(|p| bn(p) == top);
        best.sort();
        (top / (g.alpha() * hops as f64), best.into_iter().next())
    }

    fn lcg_graph(seed: u64, n: usize, p: f64) -> NetworkGraph {
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if next() < p {
                    // coarse rates so bottleneck ties actually occur
                    let a = (1.0 + (next() * 4.0).floor()) * 10.0;
                    let b = (1.0 + (next() * 4.0).floor()) * 10.0;
                    edges.push((i, j, a, b));
                }
            }
        }
        NetworkGraph::from_edges(n, &edges, 2.0).unwrap()
    }

    #[test]
    fn single_hop_kappa() {
        let g = NetworkGraph::from_edges(2, &[(0, 1, 10.0, 10.0)], 2.0).unwrap();
        assert_eq!(g.kappa(0, 1), 5.0);
        assert_eq!(g.kappa(0, 0), 0.0);
    }

    #[test]
    fn disconnected_pair_has_zero_kappa() {
        let g = NetworkGraph::from_edges(3, &[(0, 1, 10.0, 10.0)], 2.0).unwrap();
        assert_eq!(g.kappa(0, 2), 0.0);
        assert_eq!(g.shortest_path(0, 2), None);
    }

    #[test]
    fn fewest_hops_beats_higher_bottleneck() {
        // 0-1 direct (rate 1) vs 0-2-1 (rate 100 each)
        let g = NetworkGraph::from_edges(
            3,
            &[(0, 1, 1.0, 1.0), (0, 2, 100.0, 100.0), (2, 1, 100.0, 100.0)],
            2.0,
        )
        .unwrap();
        assert_eq!(g.kappa(0, 1), 0.5);
        assert_eq!(g.shortest_path(0, 1), Some(vec![0, 1]));
    }

    #[test]
    fn bottleneck_breaks_hop_ties() {
        // two 2-hop routes 0-1-3 (min 10) and 0-2-3 (min 30)
        let edges = [
            (0, 1, 10.0, 10.0),
            (1, 3, 50.0, 50.0),
            (0, 2, 30.0, 30.0),
            (2, 3, 40.0, 40.0),
        ];
        let g = NetworkGraph::from_edges(4, &edges, 2.0).unwrap();
        assert_eq!(g.kappa(0, 3), 30.0 / 4.0);
        assert_eq!(g.shortest_path(0, 3), Some(vec![0, 2, 3]));
    }

    #[test]
    fn absent_edge_rate_is_an_error() {
        let g = NetworkGraph::from_edges(3, &[(0, 1, 1.0, 2.0)], 2.0).unwrap();
        assert_eq!(g.link_rate(0, 1), Ok(1.0));
        assert_eq!(g.link_rate(1, 0), Ok(2.0));
        assert_eq!(g.link_rate(0, 2), Err(Error::AbsentEdge(0, 2)));
    }

    #[test]
    fn alpha_must_exceed_one() {
        assert!(NetworkGraph::from_edges(2, &[], 1.0).is_err());
    }

    #[test]
    fn kappa_matches_exhaustive_path_enumeration() {
        for seed in 0..40 {
            let g = lcg_graph(seed, 5 + (seed as usize % 3), 0.45);
            for i in 0..g.len() {
                for j in 0..g.len() {
                    let (want, path) = brute_kappa(&g, i, j);
                    assert_eq!(g.kappa(i, j), want, "seed {seed} pair ({i},{j})");
                    if i != j {
                        assert_eq!(g.shortest_path(i, j), path, "seed {seed} pair ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_bottleneck_bounds() {
        for seed in 0..20 {
            let g = lcg_graph(seed, 9, 0.3);
            let global = g.max_rate() / g.alpha();
            for i in 0..g.len() {
                for j in 0..g.len() {
                    let k = g.kappa(i, j);
                    assert!(k <= global + 1e-12);
                    if let Some(path) = g.shortest_path(i, j).filter(|p| p.len() > 1) {
                        let min_edge = path
                            .windows(2)
                            .map(|w| g.link_rate(w[0], w[1]).unwrap())
                            .fold(f64::INFINITY, f64::min);
                        assert!(k <= min_edge / g.alpha() + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cache_refill_is_coherent() {
        let mut g = lcg_graph(3, 9, 0.35);
        let before: Vec<Vec<f64>> = (0..9).map(|i| g.kappa_row(i).to_vec()).collect();
        assert_eq!(g.cached_kappa_rows(), 9);
        g.invalidate_kappa_cache();
        assert_eq!(g.cached_kappa_rows(), 0);
        let after: Vec<Vec<f64>> = (0..9).map(|i| g.kappa_row(i).to_vec()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn geometric_edges_are_symmetric_and_respect_min_range() {
        let ch = ChannelParams {
            tx_power_dbm: 30.0,
            antenna_gain_dbi: 20.0,
            bandwidth_hz: 800e6,
            noise_dbm_per_mhz: -134.0,
            path_loss_exponent: 2.0,
            wavelength: 0.0508,
            interference: false,
        };
        let mk = |id, x: f64, range| Node {
            id,
            pos: [x, 0.0],
            vel: [0.0, 0.0],
            range,
            is_rsu: false,
        };
        // 0-1 at 250 m: range 300 vs 240 -> no edge; 1-2 at 200 m, both ranges >= 200 -> edge
        let nodes = [mk(0, 0.0, 300.0), mk(1, 250.0, 240.0), mk(2, 450.0, 260.0)];
        let g = NetworkGraph::build(&nodes, &ch, 2.0, &ChannelGain::Unit).unwrap();
        assert!(!g.has_edge(0, 1) && !g.has_edge(1, 0));
        assert!(g.has_edge(1, 2) && g.has_edge(2, 1));
        assert_eq!(g.link_rate(1, 2).unwrap(), g.link_rate(2, 1).unwrap());
    }
}
