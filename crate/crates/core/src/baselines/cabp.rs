use crate::game::repair;
use crate::net::NetworkGraph;
use crate::objective::{Coalition, Objective, ObjectiveParams, Partition};

/// Lowest-id clustering without size limits: the lowest unclustered node
/// becomes a head and claims its unclustered neighbours. Since heads are
/// taken in ascending order, a node in reach of several heads ends up with
/// the lowest one.
pub fn ca_bp_clusters(graph: &NetworkGraph) -> Partition {
    let n = graph.len();
    let mut clustered = vec![false; n];
    let mut coalitions = Vec::new();
    for u in 0..n {
        if clustered[u] {
            continue;
        }
        clustered[u] = true;
        let mut members = vec![u];
        for &v in graph.neighbors(u) {
            if !clustered[v] {
                clustered[v] = true;
                members.push(v);
            }
        }
        coalitions.push(Coalition::new(u, members).expect("head is a member"));
    }
    Partition::new(n, coalitions).expect("every node is claimed once")
}

/// Bootstrap partition: [`ca_bp_clusters`] with oversize clusters cut down to
/// `n_max` by dropping their highest ids to singletons, then any remaining
/// diameter violation repaired.
pub fn ca_bp_init(graph: &NetworkGraph, params: &ObjectiveParams) -> Partition {
    let raw = ca_bp_clusters(graph);
    let n_max = params.n_max.max(1);
    let mut coalitions = Vec::with_capacity(raw.len());
    for c in raw.coalitions() {
        if c.len() <= n_max {
            coalitions.push(c.clone());
            continue;
        }
        // the head is the lowest id, so it is always kept
        let (kept, dropped) = c.members().split_at(n_max);
        coalitions.push(Coalition::new(c.head(), kept.iter().copied()).expect("head kept"));
        coalitions.extend(dropped.iter().map(|&m| Coalition::singleton(m)));
    }
    let mut partition =
        Partition::new(graph.len(), coalitions).expect("truncation keeps the cover");
    repair(&mut partition, &Objective::new(graph, *params));
    partition
}
