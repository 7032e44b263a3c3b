//! Network model: node placement, mobility, the LOS channel and the
//! capacity-weighted communication graph.

mod channel;
mod graph;
mod topology;

pub use channel::{dbm_to_watts, link_rate, path_loss, sinr, ChannelGain, ChannelParams};
pub use graph::NetworkGraph;
pub use topology::{FrozenTopology, MobileTopology, Topology};

use std::f64::consts::TAU;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{derive_seed, SimConfig};
use crate::error::{Error, Result};

pub type NodeId = usize;

const SCENARIO_STREAM: u64 = 0x5CE7_A210;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub range: f64,
    pub is_rsu: bool,
}

impl Node {
    pub fn distance(&self, other: &Node) -> f64 {
        let dx = self.pos[0] - other.pos[0];
        let dy = self.pos[1] - other.pos[1];
        dx.hypot(dy)
    }
}

/// Places `cfg.nodes` nodes uniformly on the square, flags `floor(rsu_fraction * N)`
/// of them as stationary RSUs and gives every vehicle a uniform speed and heading.
pub fn generate_scenario(cfg: &SimConfig, seed: u64) -> Result<Vec<Node>> {
    cfg.validate()?;
    let n = cfg.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, SCENARIO_STREAM));
    let mut nodes = Vec::with_capacity(n);
    for id in 0..n {
        let x = rng.gen_range(0.0..=cfg.area_length);
        let y = rng.gen_range(0.0..=cfg.area_length);
        let range = rng.gen_range(cfg.range_min..=cfg.range_max);
        let speed = rng.gen_range(cfg.speed_min..=cfg.speed_max);
        let heading = rng.gen_range(0.0..TAU);
        nodes.push(Node {
            id,
            pos: [x, y],
            vel: [speed * heading.cos(), speed * heading.sin()],
            range,
            is_rsu: false,
        });
    }
    // small slack so that e.g. 0.29 * 100 does not floor to 28
    let rsu_count = ((cfg.rsu_fraction * n as f64) + 1e-9).floor() as usize;
    for id in index::sample(&mut rng, n, rsu_count.min(n)) {
        let node = &mut nodes[id];
        node.is_rsu = true;
        node.vel = [0.0, 0.0];
        node.range *= cfg.rsu_range_factor;
    }
    Ok(nodes)
}

/// Constant-velocity step with specular reflection at the square's edges.
pub fn step_mobility(nodes: &[Node], dt: f64, bounds: f64) -> Vec<Node> {
    nodes
        .iter()
        .map(|node| {
            let mut next = node.clone();
            if node.is_rsu {
                return next;
            }
            for axis in 0..2 {
                let mut p = node.pos[axis] + node.vel[axis] * dt;
                let mut v = node.vel[axis];
                while p < 0.0 || p > bounds {
                    if p < 0.0 {
                        p = -p;
                    } else {
                        p = 2.0 * bounds - p;
                    }
                    v = -v;
                }
                next.pos[axis] = p;
                next.vel[axis] = v;
            }
            next
        })
        .collect()
}

/// Serializable scenario snapshot used for golden files and replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub channel: ChannelParams,
    pub nodes: Vec<Node>,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (k, node) in scenario.nodes.iter().enumerate() {
            if node.id != k {
                return Err(Error::Config(format!(
                    "node ids must be dense, found {} at index {k}",
                    node.id
                )));
            }
            if !(node.range > 0.0) {
                return Err(Error::Config(format!("node {k} has non-positive range")));
            }
        }
        Ok(scenario)
    }
}
