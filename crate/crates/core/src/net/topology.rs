use super::channel::{ChannelGain, ChannelParams};
use super::graph::NetworkGraph;
use super::{step_mobility, Node};
use crate::error::Result;

/// A time-indexed sequence of graphs.
pub trait Topology {
    fn graph(&self) -> &NetworkGraph;

    /// Moves to the next time slot.
    fn advance(&mut self) -> Result<()>;

    /// True when `advance` never changes the graph.
    fn is_frozen(&self) -> bool;
}

#[derive(Debug, Clone)]
pub struct FrozenTopology {
    graph: NetworkGraph,
}

impl FrozenTopology {
    pub fn new(graph: NetworkGraph) -> Self {
        Self { graph }
    }
}

impl Topology for FrozenTopology {
    fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    fn advance(&mut self) -> Result<()> {
        Ok(())
    }

    fn is_frozen(&self) -> bool {
        true
    }
}

/// Constant-velocity mobility with the graph rebuilt every slot.
#[derive(Debug, Clone)]
pub struct MobileTopology {
    nodes: Vec<Node>,
    channel: ChannelParams,
    alpha: f64,
    dt: f64,
    bounds: f64,
    fading_seed: Option<u64>,
    epoch: u64,
    graph: NetworkGraph,
}

impl MobileTopology {
    pub fn new(
        nodes: Vec<Node>,
        channel: ChannelParams,
        alpha: f64,
        dt: f64,
        bounds: f64,
        fading_seed: Option<u64>,
    ) -> Result<Self> {
        let gain = Self::gain(fading_seed, 0);
        let graph = NetworkGraph::build(&nodes, &channel, alpha, &gain)?;
        Ok(Self {
            nodes,
            channel,
            alpha,
            dt,
            bounds,
            fading_seed,
            epoch: 0,
            graph,
        })
    }

    fn gain(fading_seed: Option<u64>, epoch: u64) -> ChannelGain {
        match fading_seed {
            Some(seed) => ChannelGain::Rayleigh { seed, epoch },
            None => ChannelGain::Unit,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }
}

impl Topology for MobileTopology {
    fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    fn advance(&mut self) -> Result<()> {
        self.nodes = step_mobility(&self.nodes, self.dt, self.bounds);
        self.epoch += 1;
        let gain = Self::gain(self.fading_seed, self.epoch);
        self.graph = NetworkGraph::build(&self.nodes, &self.channel, self.alpha, &gain)?;
        Ok(())
    }

    fn is_frozen(&self) -> bool {
        false
    }
}
