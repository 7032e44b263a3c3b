//! Reference algorithms: lowest-id bootstrap clustering, a unilateral-join
//! greedy dynamic and a centralized merge/split/transfer search.

mod cabp;
mod mst;

pub use cabp::{ca_bp_clusters, ca_bp_init};
pub use mst::{
    mst_best_move, mst_cfa, mst_cfa_from, mst_cfa_tracking, MstMove, MstMoveKind, MstOutcome,
};

use crate::error::Result;
use crate::game::{run, Dynamics, EngineState, LearningParams, OpFilter};
use crate::net::Topology;
use crate::objective::ObjectiveParams;

/// Output-metadata note: the unilateral baseline never elects heads.
pub const UNILATERAL_OPS: &str = "join-only";

pub fn greedy_unilateral_dynamics(params: ObjectiveParams) -> Dynamics {
    Dynamics {
        params,
        learning: LearningParams::greedy(),
        filter: OpFilter::JOINS_ONLY,
    }
}

/// Same scheduler as DCA, restricted to unilateral joins with take-best acceptance.
pub fn greedy_unilateral<T: Topology + ?Sized>(
    state: &mut EngineState,
    topology: &mut T,
    params: ObjectiveParams,
    slots: usize,
) -> Result<()> {
    run(state, topology, &greedy_unilateral_dynamics(params), slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GainContext, OpKind};
    use crate::net::{FrozenTopology, NetworkGraph};
    use crate::objective::{Coalition, Objective, Partition};

    fn swap_instance() -> (NetworkGraph, ObjectiveParams, Partition) {
        let edges = [
            (0, 1, 1.0, 1.0),
            (2, 3, 1.0, 1.0),
            (0, 2, 100.0, 100.0),
            (1, 3, 100.0, 100.0),
        ];
        let g = NetworkGraph::from_edges(4, &edges, 2.0).unwrap();
        let params = ObjectiveParams {
            n_max: 2,
            ..ObjectiveParams::default()
        };
        let p = Partition::new(
            4,
            vec![
                Coalition::new(0, [0, 1]).unwrap(),
                Coalition::new(2, [2, 3]).unwrap(),
            ],
        )
        .unwrap();
        (g, params, p)
    }

    #[test]
    fn only_a_swap_helps_so_unilateral_stays_put() {
        let (g, params, p) = swap_instance();
        let obj = Objective::new(&g, params);
        let ctx = GainContext::new(&obj, &p);
        for i in 0..4 {
            assert!(ctx.enumerate(i, OpFilter::JOINS_ONLY).is_empty());
        }
        let swaps: Vec<_> = (0..4)
            .flat_map(|i| ctx.enumerate(i, OpFilter::ALL))
            .filter(|pr| pr.op.kind == OpKind::Switch && pr.op.counterpart.is_some())
            .collect();
        assert!(!swaps.is_empty());

        let mut uni = EngineState::new(p.clone(), 3);
        greedy_unilateral(&mut uni, &mut FrozenTopology::new(g.clone()), params, 10).unwrap();
        assert_eq!(uni.partition, p);
        assert_eq!(uni.ops_applied(), 0);

        let mut dca = EngineState::new(p.clone(), 3);
        run(
            &mut dca,
            &mut FrozenTopology::new(g.clone()),
            &Dynamics::dca(params, LearningParams::greedy()),
            10,
        )
        .unwrap();
        assert!(dca.ops_applied() > 0);
        assert!(obj.potential(&dca.partition) > obj.potential(&p));
    }

    #[test]
    fn edgeless_graph_is_an_immediate_fixed_point() {
        let g = NetworkGraph::from_edges(5, &[], 2.0).unwrap();
        let mut state = EngineState::new(Partition::singletons(5), 1);
        greedy_unilateral(
            &mut state,
            &mut FrozenTopology::new(g),
            ObjectiveParams::default(),
            100,
        )
        .unwrap();
        assert_eq!(state.slot, 1);
        assert_eq!(state.partition, Partition::singletons(5));
    }
}
