use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vcluster::bench::{
    aggregate, curve, read_config, read_runs_csv, read_traces, render_table, run_experiment,
    snapshot_graph, write_aggregate, write_curve, write_experiment, RUNS_FILE,
};
use vcluster::config::derive_seed;
use vcluster::game::{is_nash_stable, run, Dynamics, EngineState, LearningParams};
use vcluster::net::FrozenTopology;
use vcluster::objective::{Objective, Partition};
use vcluster::oracle::{optimum, verify_nash};
use vcluster::{Algorithm, InitMode, SimConfig};

#[derive(Parser)]
#[command(
    name = "vcluster",
    version,
    about = "Coalition-game clustering experiments for vehicular networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write every output file.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory.
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Recompute aggregate.csv and table.txt from an output directory's runs.csv.
    Table {
        #[arg(long, short, default_value = "out")]
        dir: PathBuf,
    },
    /// Recompute curve.csv from an output directory's traces.
    Curve {
        #[arg(long, short, default_value = "out")]
        dir: PathBuf,
    },
    /// Check greedy fixed points against the exhaustive oracle on small frozen instances.
    Verify {
        #[command(flatten)]
        source: ConfigSource,
        /// Number of random instances.
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

#[derive(Args)]
struct ConfigSource {
    /// TOML or JSON config file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    area_length: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    #[arg(long)]
    rsu_fraction: Option<f64>,
    #[arg(long)]
    range_min: Option<f64>,
    #[arg(long)]
    range_max: Option<f64>,
    #[arg(long)]
    rsu_range_factor: Option<f64>,
    #[arg(long)]
    speed_min: Option<f64>,
    #[arg(long)]
    speed_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tx_power_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    antenna_gain_dbi: Option<f64>,
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    noise_dbm_per_mhz: Option<f64>,
    #[arg(long)]
    path_loss_exponent: Option<f64>,
    #[arg(long)]
    carrier_hz: Option<f64>,
    #[arg(long)]
    interference: Option<bool>,
    #[arg(long)]
    fading: Option<bool>,
    #[arg(long)]
    multihop_loss: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    v_intra: Option<f64>,
    #[arg(long)]
    v_inter: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    epsilon_decay: Option<f64>,
    #[arg(long)]
    epsilon_floor: Option<f64>,
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Comma-separated: dca, greedy-unilateral, mst-cfa.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// Comma-separated: none, cabp.
    #[arg(long, value_delimiter = ',')]
    inits: Option<Vec<InitMode>>,
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),* $(,)?) => {
        $(if let Some(v) = $o.$field { $cfg.$field = v; })*
    };
}

impl ConfigSource {
    fn load(self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_file(path)?,
            None => SimConfig::default(),
        };
        let o = self.overrides;
        apply!(cfg, o;
            area_length, nodes, sweep, rsu_fraction, range_min, range_max, rsu_range_factor, speed_min,
            speed_max, dt, tx_power_dbm, antenna_gain_dbi, bandwidth_hz, noise_dbm_per_mhz, path_loss_exponent,
            carrier_hz, interference, fading, multihop_loss, beta, v_intra, v_inter, n_max, d_max, zeta, epsilon,
            epsilon_decay, epsilon_floor, slots, seed, runs, algorithms, inits,
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_file(path: &Path) -> Result<SimConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = if path.extension().is_some_and(|e| e == "json") {
        SimConfig::from_json(&text)
    } else {
        SimConfig::from_toml(&text)
    };
    cfg.with_context(|| format!("parsing {}", path.display()))
}

fn cmd_run(cfg: SimConfig, out: &Path) -> Result<()> {
    let started = Instant::now();
    eprintln!(
        "running {} jobs ({} node counts x {} algorithms x {} inits x {} runs), config {}",
        cfg.node_counts().len() * cfg.algorithms.len() * cfg.inits.len() * cfg.runs,
        cfg.node_counts().len(),
        cfg.algorithms.len(),
        cfg.inits.len(),
        cfg.runs,
        &cfg.hash()[..12]
    );
    let result = run_experiment(&cfg)?;
    write_experiment(out, &result)?;
    print!("{}", render_table(&result.aggregate, &cfg.hash()));
    eprintln!(
        "wrote {} in {:.1}s",
        out.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_table(dir: &Path) -> Result<()> {
    let cfg = read_config(dir)?;
    let records = read_runs_csv(&dir.join(RUNS_FILE))?;
    if records.is_empty() {
        bail!("{} holds no runs", dir.join(RUNS_FILE).display());
    }
    let rows = aggregate(&records);
    write_aggregate(dir, &rows, &cfg.hash())?;
    print!("{}", render_table(&rows, &cfg.hash()));
    Ok(())
}

fn cmd_curve(dir: &Path) -> Result<()> {
    let cfg = read_config(dir)?;
    let traces = read_traces(dir)?;
    let points = curve(&traces);
    write_curve(dir, &points, &cfg.hash())?;
    eprintln!("wrote {} curve points", points.len());
    Ok(())
}

fn cmd_verify(cfg: SimConfig, instances: usize) -> Result<()> {
    let params = cfg.objective();
    let dynamics = Dynamics::dca(params, LearningParams::greedy());
    let mut ratios = Vec::with_capacity(instances);
    let mut disagreements = 0;
    for k in 0..instances {
        let seed = derive_seed(cfg.seed, k as u64);
        let graph = snapshot_graph(&cfg, seed)?;
        let mut state = EngineState::new(Partition::singletons(graph.len()), seed);
        run(
            &mut state,
            &mut FrozenTopology::new(graph.clone()),
            &dynamics,
            cfg.slots,
        )?;
        let engine = is_nash_stable(&state.partition, &graph, &params).stable;
        let oracle = verify_nash(&state.partition, &graph, &params)?;
        let reached = Objective::new(&graph, params)
            .global_objective(&state.partition)
            .g1;
        let best = optimum(&graph, &params)?.score;
        ratios.push(reached / best);
        if engine != oracle || !oracle {
            disagreements += 1;
        }
        println!(
            "instance {k:>3}: edges {:>3} slots {:>3} stable engine={engine} oracle={oracle} G1 {reached:.6} optimum {best:.6}",
            graph.edge_count(),
            state.slot
        );
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    println!("mean G1 / optimum = {mean:.4}; unstable or disputed fixed points: {disagreements}");
    if disagreements > 0 {
        bail!("{disagreements} fixed points failed the oracle check");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { source, out } => cmd_run(source.load()?, &out),
        Command::Table { dir } => cmd_table(&dir),
        Command::Curve { dir } => cmd_curve(&dir),
        Command::Verify { source, instances } => {
            let cfg = source.load()?;
            if cfg.nodes > vcluster::oracle::ENUMERATION_LIMIT {
                bail!(
                    "verify enumerates every partition; use --nodes {} or fewer",
                    vcluster::oracle::ENUMERATION_LIMIT
                );
            }
            cmd_verify(cfg, instances)
        }
    }
}
