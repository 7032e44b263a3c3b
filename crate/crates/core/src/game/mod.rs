//! Coalition formation game: operations, gains, the distributed per-node
//! step with log-linear acceptance, the asynchronous scheduler and the
//! Nash-stability check.

mod engine;
mod ops;

pub use engine::{
    acceptance_probability, dca_step, log_linear_accept, metrics, repair, run, run_slot, AppliedOp,
    Dynamics, EngineState, LastOp, LearningParams, MetricsRecord,
};
pub use ops::{
    successor_head, transition, GainContext, OpFilter, OpKind, Operation, OperationProposal,
    Transition, GAIN_EPS,
};

use crate::net::NetworkGraph;
use crate::objective::{Objective, ObjectiveParams, Partition};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<OperationProposal>,
}

/// True iff no node has an admissible operation with positive gain; the
/// first node (by id) that has one yields its best operation as witness.
pub fn is_nash_stable(
    partition: &Partition,
    graph: &NetworkGraph,
    params: &ObjectiveParams,
) -> StabilityReport {
    let obj = Objective::new(graph, *params);
    let ctx = GainContext::new(&obj, partition);
    for i in 0..partition.node_count() {
        let proposals = ctx.enumerate(i, OpFilter::ALL);
        if let Some(best) = ctx.best(&proposals) {
            return StabilityReport {
                stable: false,
                witness: Some(*best),
            };
        }
    }
    StabilityReport {
        stable: true,
        witness: None,
    }
}
