mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vcluster::config::derive_seed;
use vcluster::game::{
    is_nash_stable, run, Dynamics, EngineState, GainContext, LearningParams, OpFilter, OpKind,
};
use vcluster::net::FrozenTopology;
use vcluster::objective::{Coalition, Objective, ObjectiveParams, Partition};
use vcluster::oracle::{deviations, enumerate_all, optimum, verify_nash, DeviationKind};

use common::{dense_graph, random_feasible_partition};

fn kind_of(kind: OpKind, counterpart: Option<usize>) -> DeviationKind {
    match (kind, counterpart) {
        (OpKind::HeadElection, _) => DeviationKind::HeadElection,
        (OpKind::Switch, None) => DeviationKind::Join,
        (OpKind::Switch, Some(_)) => DeviationKind::Swap,
        (OpKind::Replace, _) => DeviationKind::Replace,
    }
}

#[test]
fn engine_gains_match_oracle_rescoring_on_frozen_instances() {
    let params = ObjectiveParams::default();
    let mut compared = 0;
    for k in 0..10u64 {
        let graph = dense_graph(8, 600.0, derive_seed(11, k));
        let obj = Objective::new(&graph, params);
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        for _ in 0..5 {
            let p = random_feasible_partition(&obj, &mut rng);
            let ctx = GainContext::new(&obj, &p);
            for i in 0..graph.len() {
                let oracle = deviations(&p, &graph, &params, i);
                let engine = ctx.enumerate(i, OpFilter::ALL);
                // every engine proposal has a matching admissible oracle deviation
                for pr in &engine {
                    let target = p.coalition(pr.op.dst).members()[0];
                    let d = oracle
                        .iter()
                        .find(|d| {
                            d.kind == kind_of(pr.op.kind, pr.op.counterpart)
                                && d.counterpart == pr.op.counterpart
                                && d.target == target
                        })
                        .expect("oracle knows the operation");
                    assert!(d.admissible);
                    assert!((d.gain - pr.gain).abs() < 1e-9, "{pr:?} vs {d:?}");
                    compared += 1;
                }
                // and every improving admissible deviation shows up in the engine
                let improving = oracle
                    .iter()
                    .filter(|d| d.admissible && d.gain > 1e-12)
                    .count();
                assert_eq!(improving, engine.len(), "node {i} of {p:?}");
            }
        }
    }
    assert!(compared > 100);
}

#[test]
fn stability_verdicts_agree_on_random_and_converged_partitions() {
    let params = ObjectiveParams {
        n_max: 4,
        ..ObjectiveParams::default()
    };
    let mut stable_seen = 0;
    let mut unstable_seen = 0;
    for k in 0..30u64 {
        let graph = dense_graph(9, 700.0, derive_seed(12, k));
        let obj = Objective::new(&graph, params);
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        let mut candidates = vec![random_feasible_partition(&obj, &mut rng)];
        let mut state = EngineState::new(Partition::singletons(9), k);
        run(
            &mut state,
            &mut FrozenTopology::new(graph.clone()),
            &Dynamics::dca(params, LearningParams::greedy()),
            100,
        )
        .unwrap();
        candidates.push(state.partition);
        for p in candidates {
            let engine = is_nash_stable(&p, &graph, &params).stable;
            assert_eq!(engine, verify_nash(&p, &graph, &params).unwrap());
            if engine {
                stable_seen += 1;
            } else {
                unstable_seen += 1;
            }
        }
    }
    assert!(stable_seen > 0 && unstable_seen > 0);
}

#[test]
fn perturbed_optimum_exposes_a_witness() {
    let params = ObjectiveParams::default();
    let mut found = 0;
    for k in 0..20u64 {
        let graph = dense_graph(7, 500.0, derive_seed(13, k));
        let best = optimum(&graph, &params).unwrap();
        assert!(verify_nash(&best.partition, &graph, &params).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        // move one node to a singleton and look for a move back
        for _ in 0..10 {
            let i = rng.gen_range(0..7);
            let mut cs: Vec<Coalition> = Vec::new();
            for c in best.partition.coalitions() {
                let rest: Vec<usize> = c.members().iter().copied().filter(|&m| m != i).collect();
                if rest.is_empty() {
                    continue;
                }
                let head = if rest.contains(&c.head()) {
                    c.head()
                } else {
                    *rest.choose(&mut rng).unwrap()
                };
                cs.push(Coalition::new(head, rest).unwrap());
            }
            cs.push(Coalition::singleton(i));
            let p = Partition::new(7, cs).unwrap();
            let obj = Objective::new(&graph, params);
            if !obj.all_feasible(&p) || obj.global_objective(&p).g1 >= best.score {
                continue;
            }
            let oracle = verify_nash(&p, &graph, &params).unwrap();
            assert_eq!(oracle, is_nash_stable(&p, &graph, &params).stable);
            if !oracle {
                found += 1;
                break;
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn greedy_outcome_never_beats_the_feasible_optimum() {
    let params = ObjectiveParams::default();
    for k in 0..10u64 {
        let graph = dense_graph(7, 500.0, derive_seed(14, k));
        let all = enumerate_all(&graph, &params).unwrap();
        let best = all
            .iter()
            .filter(|e| e.feasible)
            .map(|e| e.score)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut state = EngineState::new(Partition::singletons(7), k);
        run(
            &mut state,
            &mut FrozenTopology::new(graph.clone()),
            &Dynamics::dca(params, LearningParams::greedy()),
            100,
        )
        .unwrap();
        let reached = Objective::new(&graph, params)
            .global_objective(&state.partition)
            .g1;
        assert!(reached <= best + 1e-12);
    }
}
