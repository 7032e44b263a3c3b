#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vcluster::bench::snapshot_graph;
use vcluster::net::NetworkGraph;
use vcluster::objective::{Coalition, Objective, Partition};
use vcluster::SimConfig;

/// Default radio and range settings packed into a smaller square so that
/// tiny node counts still form multi-hop graphs.
pub fn dense_config(nodes: usize, area: f64) -> SimConfig {
    SimConfig {
        nodes,
        area_length: area,
        ..SimConfig::default()
    }
}

pub fn dense_graph(nodes: usize, area: f64, seed: u64) -> NetworkGraph {
    snapshot_graph(&dense_config(nodes, area), seed).expect("scenario builds")
}

/// Random partition whose coalitions all satisfy the size and diameter
/// bounds: nodes are visited in random order and join a random feasible
/// neighbouring coalition (or stay alone); heads are random members.
pub fn random_feasible_partition(obj: &Objective, rng: &mut ChaCha8Rng) -> Partition {
    let n = obj.graph.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for u in order {
        let mut options: Vec<usize> = obj
            .graph
            .neighbors(u)
            .iter()
            .filter(|&&v| block_of[v] != usize::MAX)
            .map(|&v| block_of[v])
            .collect();
        options.sort_unstable();
        options.dedup();
        options.retain(|&b| {
            let mut trial = blocks[b].clone();
            trial.push(u);
            trial.sort_unstable();
            obj.feasible(&trial)
        });
        if !options.is_empty() && rng.gen_bool(0.8) {
            let b = *options.choose(rng).unwrap();
            blocks[b].push(u);
            blocks[b].sort_unstable();
            block_of[u] = b;
        } else {
            block_of[u] = blocks.len();
            blocks.push(vec![u]);
        }
    }
    let coalitions = blocks
        .into_iter()
        .map(|b| {
            let head = *b.choose(rng).unwrap();
            Coalition::new(head, b).unwrap()
        })
        .collect();
    Partition::new(n, coalitions).unwrap()
}
