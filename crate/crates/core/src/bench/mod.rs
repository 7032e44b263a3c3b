//! Seeded multi-run experiments: per-run execution, aggregation and the
//! output files (traces, partitions, run table, aggregate table, curves).

mod output;

pub use output::{
    aggregate, curve, partition_path, read_config, read_runs_csv, read_trace_csv, read_traces,
    render_table, run_experiment, trace_csv, trace_path, write_aggregate, write_curve,
    write_experiment, AggregateRow, CurvePoint, ExperimentOutput, AGGREGATE_FILE, CONFIG_FILE,
    CURVE_FILE, PARTITION_DIR, RUNS_FILE, TABLE_FILE, TRACE_DIR,
};

use serde::{Deserialize, Serialize};

use crate::baselines::{ca_bp_init, greedy_unilateral_dynamics, mst_cfa_tracking, UNILATERAL_OPS};
use crate::config::{derive_seed, Algorithm, InitMode, SimConfig};
use crate::error::Result;
use crate::game::{run, Dynamics, EngineState, MetricsRecord};
use crate::net::{generate_scenario, MobileTopology, NetworkGraph, Topology};
use crate::objective::Partition;

const SCENARIO_STREAM: u64 = 0x5ce4;
const ENGINE_STREAM: u64 = 0xe4e;
const FADING_STREAM: u64 = 0xfad;

/// One (node count, algorithm, init, run index) cell of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub nodes: usize,
    pub algorithm: Algorithm,
    pub init: InitMode,
    pub run: usize,
}

impl Job {
    /// Scenario seed shared by every algorithm and init mode of the same run,
    /// so comparisons are paired.
    pub fn scenario_seed(&self, base: u64) -> u64 {
        derive_seed(
            derive_seed(base ^ SCENARIO_STREAM, self.nodes as u64),
            self.run as u64,
        )
    }

    pub fn stem(&self) -> String {
        format!(
            "n{}_{}_{}_run{:02}",
            self.nodes,
            self.algorithm.tag(),
            self.init.tag(),
            self.run
        )
    }
}

/// Final per-run figures; one line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub nodes: usize,
    pub algorithm: Algorithm,
    pub init: InitMode,
    pub run: usize,
    pub seed: u64,
    #[serde(rename = "G1")]
    pub g1: f64,
    pub chi_total: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    #[serde(rename = "M")]
    pub m: usize,
    /// Slots (distributed) or moves (centralized) until the last change.
    pub settle: usize,
    pub ops_applied: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub job: Job,
    pub record: RunRecord,
    pub trace: Vec<MetricsRecord>,
    pub partition: Partition,
}

pub fn jobs(cfg: &SimConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for nodes in cfg.node_counts() {
        for &algorithm in &cfg.algorithms {
            for &init in &cfg.inits {
                for run in 0..cfg.runs {
                    out.push(Job {
                        nodes,
                        algorithm,
                        init,
                        run,
                    });
                }
            }
        }
    }
    out
}

pub fn ops_note(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Dca => "head-election,switch,replace",
        Algorithm::GreedyUnilateral => UNILATERAL_OPS,
        Algorithm::MstCfa => "merge,split,transfer",
    }
}

fn topology(cfg: &SimConfig, seed: u64) -> Result<MobileTopology> {
    let nodes = generate_scenario(cfg, seed)?;
    let fading = cfg.fading.then(|| derive_seed(seed, FADING_STREAM));
    MobileTopology::new(
        nodes,
        cfg.channel(),
        cfg.multihop_loss,
        cfg.dt,
        cfg.area_length,
        fading,
    )
}

fn initial_partition(init: InitMode, graph: &NetworkGraph, cfg: &SimConfig) -> Partition {
    match init {
        InitMode::None => Partition::singletons(graph.len()),
        InitMode::Cabp => ca_bp_init(graph, &cfg.objective()),
    }
}

/// Executes one job. Distributed algorithms run for `cfg.slots` slots on the
/// moving network; the centralized search maintains its clustering over the
/// same slots.
pub fn run_job(cfg: &SimConfig, job: Job) -> Result<RunOutcome> {
    let cfg = cfg.with_nodes(job.nodes);
    let seed = job.scenario_seed(cfg.seed);
    let mut topo = topology(&cfg, seed)?;
    let params = cfg.objective();
    let (trace, partition, settle, ops_applied) = match job.algorithm {
        Algorithm::Dca | Algorithm::GreedyUnilateral => {
            let dynamics = match job.algorithm {
                Algorithm::Dca => Dynamics::dca(params, cfg.learning()),
                _ => greedy_unilateral_dynamics(params),
            };
            let start = initial_partition(job.init, topo.graph(), &cfg);
            let mut state = EngineState::new(start, derive_seed(seed, ENGINE_STREAM));
            run(&mut state, &mut topo, &dynamics, cfg.slots)?;
            let settle = state
                .trace
                .iter()
                .rposition(|r| r.ops_applied > 0)
                .map_or(0, |s| s + 1);
            let ops = state.ops_applied();
            (state.trace, state.partition, settle, ops)
        }
        Algorithm::MstCfa => {
            let start = initial_partition(job.init, topo.graph(), &cfg);
            let (partition, trace) = mst_cfa_tracking(start, &mut topo, &params, cfg.slots)?;
            let settle = trace
                .iter()
                .rposition(|r| r.ops_applied > 0)
                .map_or(0, |s| s + 1);
            let ops = trace.iter().map(|r| r.ops_applied).sum();
            (trace, partition, settle, ops)
        }
    };
    let last = trace.last().expect("at least one slot");
    let record = RunRecord {
        nodes: job.nodes,
        algorithm: job.algorithm,
        init: job.init,
        run: job.run,
        seed,
        g1: last.g1,
        chi_total: last.chi_total,
        e_total: last.e_total,
        m: last.m,
        settle,
        ops_applied,
    };
    Ok(RunOutcome {
        job,
        record,
        trace,
        partition,
    })
}

/// Graph of a freshly generated scenario at slot 0, with unit channel gain.
pub fn snapshot_graph(cfg: &SimConfig, seed: u64) -> Result<NetworkGraph> {
    let nodes = generate_scenario(cfg, seed)?;
    NetworkGraph::build(
        &nodes,
        &cfg.channel(),
        cfg.multihop_loss,
        &crate::net::ChannelGain::Unit,
    )
}

/// Graph of the slot a job's final partition was formed on.
pub fn final_graph(cfg: &SimConfig, job: &Job) -> Result<NetworkGraph> {
    let cfg = cfg.with_nodes(job.nodes);
    let mut topo = topology(&cfg, job.scenario_seed(cfg.seed))?;
    for _ in 1..cfg.slots {
        topo.advance()?;
    }
    Ok(topo.graph().clone())
}
