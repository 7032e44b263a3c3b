use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{jobs, ops_note, run_job, Job, RunOutcome, RunRecord};
use crate::config::{Algorithm, InitMode, SimConfig};
use crate::error::{Error, Result};
use crate::game::MetricsRecord;

pub const CONFIG_FILE: &str = "config.json";
pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const TABLE_FILE: &str = "table.txt";
pub const CURVE_FILE: &str = "curve.csv";
pub const TRACE_DIR: &str = "traces";
pub const PARTITION_DIR: &str = "partitions";

/// Mean, best and worst final objective of one (nodes, algorithm, init) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub nodes: usize,
    pub algorithm: Algorithm,
    pub init: InitMode,
    pub runs: usize,
    pub mean: f64,
    pub best: f64,
    pub worst: f64,
    pub chi_total: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub nodes: usize,
    pub algorithm: Algorithm,
    pub init: InitMode,
    pub slot: usize,
    pub mean_g1: f64,
    /// `mean_g1` divided by the largest `mean_g1` of the same series.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: SimConfig,
    pub outcomes: Vec<RunOutcome>,
    pub aggregate: Vec<AggregateRow>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn csv_body<T: Serialize>(header: &str, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = header.as_bytes().to_vec();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for row in rows {
            w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(out)
}

fn csv_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = read_file(path)?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(|e| parse_err(path, e)))
        .collect()
}

/// Comment lines heading every trace file.
fn trace_header(cfg: &SimConfig, job: &Job, seed: u64) -> String {
    format!(
        "# config_hash={}\n# base_seed={}\n# seed={seed}\n# nodes={}\n# algorithm={}\n# init={}\n# run={}\n# ops={}\n",
        cfg.hash(),
        cfg.seed,
        job.nodes,
        job.algorithm.tag(),
        job.init.tag(),
        job.run,
        ops_note(job.algorithm),
    )
}

/// The exact bytes of one run's trace file.
pub fn trace_csv(cfg: &SimConfig, outcome: &RunOutcome) -> Result<Vec<u8>> {
    csv_body(
        &trace_header(cfg, &outcome.job, outcome.record.seed),
        &outcome.trace,
    )
}

/// Reads a trace file back: its `# key=value` header and the rows.
pub fn read_trace_csv(path: &Path) -> Result<(BTreeMap<String, String>, Vec<MetricsRecord>)> {
    let text = read_file(path)?;
    let meta = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    Ok((meta, csv_rows(path)?))
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    csv_rows(path)
}

/// Runs every job of the configuration; independent runs go to the rayon pool.
pub fn run_experiment(cfg: &SimConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let outcomes: Vec<RunOutcome> = jobs(cfg)
        .into_par_iter()
        .map(|job| run_job(cfg, job))
        .collect::<Result<_>>()?;
    let records: Vec<RunRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    Ok(ExperimentOutput {
        config: cfg.clone(),
        aggregate: aggregate(&records),
        outcomes,
    })
}

/// Groups per-run records by (nodes, algorithm, init) in first-seen order.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut order: Vec<(usize, Algorithm, InitMode)> = Vec::new();
    let mut groups: BTreeMap<(usize, Algorithm, InitMode), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.nodes, r.algorithm, r.init);
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let k = rs.len() as f64;
            let mean = |f: fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / k;
            AggregateRow {
                nodes: key.0,
                algorithm: key.1,
                init: key.2,
                runs: rs.len(),
                mean: mean(|r| r.g1),
                best: rs.iter().map(|r| r.g1).fold(f64::NEG_INFINITY, f64::max),
                worst: rs.iter().map(|r| r.g1).fold(f64::INFINITY, f64::min),
                chi_total: mean(|r| r.chi_total),
                e_total: mean(|r| r.e_total),
                m: mean(|r| r.m as f64),
            }
        })
        .collect()
}

/// Plain-text results table, one block per init mode.
pub fn render_table(rows: &[AggregateRow], config_hash: &str) -> String {
    let mut out = format!("# config_hash={config_hash}\n");
    let mut inits: Vec<InitMode> = rows.iter().map(|r| r.init).collect();
    inits.sort_unstable();
    inits.dedup();
    for init in inits {
        let title = match init {
            InitMode::None => "without initial clustering",
            InitMode::Cabp => "with CA-BP initial clustering",
        };
        let _ = writeln!(out, "\nAlgorithm comparison {title}");
        let _ = writeln!(
            out,
            "{:<9} {:<17} {:>8} {:>8} {:>8} {:>13} {:>10}",
            "Node num", "Algorithm", "R̄", "Best", "Worst", "χ_total", "E_total"
        );
        for r in rows.iter().filter(|r| r.init == init) {
            let _ = writeln!(
                out,
                "{:<9} {:<17} {:>8.4} {:>8.4} {:>8.4} {:>13.4e} {:>10.2}",
                r.nodes,
                r.algorithm.label(),
                r.mean,
                r.best,
                r.worst,
                r.chi_total,
                r.e_total
            );
        }
    }
    out
}

/// Mean objective per slot across runs for every distributed series. Runs
/// that stopped early hold their last value.
pub fn curve(outcomes: &[(Job, Vec<MetricsRecord>)]) -> Vec<CurvePoint> {
    let mut order: Vec<(usize, Algorithm, InitMode)> = Vec::new();
    let mut groups: BTreeMap<(usize, Algorithm, InitMode), Vec<&[MetricsRecord]>> = BTreeMap::new();
    for (job, trace) in outcomes {
        if job.algorithm == Algorithm::MstCfa || trace.is_empty() {
            continue;
        }
        let key = (job.nodes, job.algorithm, job.init);
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(trace);
    }
    let mut out = Vec::new();
    for key in order {
        let traces = &groups[&key];
        let len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
        let means: Vec<f64> = (0..len)
            .map(|s| {
                traces.iter().map(|t| t[s.min(t.len() - 1)].g1).sum::<f64>() / traces.len() as f64
            })
            .collect();
        let peak = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (slot, &mean_g1) in means.iter().enumerate() {
            let normalized = if peak != 0.0 { mean_g1 / peak } else { 0.0 };
            out.push(CurvePoint {
                nodes: key.0,
                algorithm: key.1,
                init: key.2,
                slot,
                mean_g1,
                normalized,
            });
        }
    }
    out
}

#[derive(Serialize)]
struct PartitionFile<'a> {
    config_hash: String,
    base_seed: u64,
    seed: u64,
    nodes: usize,
    algorithm: Algorithm,
    init: InitMode,
    run: usize,
    partition: &'a crate::objective::Partition,
}

pub fn trace_path(dir: &Path, job: &Job) -> PathBuf {
    dir.join(TRACE_DIR).join(format!("{}.csv", job.stem()))
}

pub fn partition_path(dir: &Path, job: &Job) -> PathBuf {
    dir.join(PARTITION_DIR).join(format!("{}.json", job.stem()))
}

pub fn write_aggregate(dir: &Path, rows: &[AggregateRow], cfg_hash: &str) -> Result<()> {
    let header = format!("# config_hash={cfg_hash}\n");
    write_file(&dir.join(AGGREGATE_FILE), &csv_body(&header, rows)?)?;
    write_file(
        &dir.join(TABLE_FILE),
        render_table(rows, cfg_hash).as_bytes(),
    )
}

pub fn write_curve(dir: &Path, points: &[CurvePoint], cfg_hash: &str) -> Result<()> {
    let header = format!("# config_hash={cfg_hash}\n");
    write_file(&dir.join(CURVE_FILE), &csv_body(&header, points)?)
}

/// Writes config, traces, partitions, per-run and aggregate tables and the curve.
pub fn write_experiment(dir: &Path, out: &ExperimentOutput) -> Result<()> {
    let cfg = &out.config;
    let hash = cfg.hash();
    let config_json = serde_json::to_string_pretty(cfg).expect("config serializes") + "\n";
    write_file(&dir.join(CONFIG_FILE), config_json.as_bytes())?;
    for o in &out.outcomes {
        write_file(&trace_path(dir, &o.job), &trace_csv(cfg, o)?)?;
        let file = PartitionFile {
            config_hash: hash.clone(),
            base_seed: cfg.seed,
            seed: o.record.seed,
            nodes: o.job.nodes,
            algorithm: o.job.algorithm,
            init: o.job.init,
            run: o.job.run,
            partition: &o.partition,
        };
        let json = serde_json::to_string(&file).expect("partition serializes") + "\n";
        write_file(&partition_path(dir, &o.job), json.as_bytes())?;
    }
    let records: Vec<RunRecord> = out.outcomes.iter().map(|o| o.record.clone()).collect();
    let header = format!("# config_hash={hash}\n# base_seed={}\n", cfg.seed);
    write_file(&dir.join(RUNS_FILE), &csv_body(&header, &records)?)?;
    write_aggregate(dir, &out.aggregate, &hash)?;
    let traces: Vec<(Job, Vec<MetricsRecord>)> = out
        .outcomes
        .iter()
        .map(|o| (o.job, o.trace.clone()))
        .collect();
    write_curve(dir, &curve(&traces), &hash)
}

/// Loads `config.json` from an output directory.
pub fn read_config(dir: &Path) -> Result<SimConfig> {
    SimConfig::from_json(&read_file(&dir.join(CONFIG_FILE))?)
}

/// Traces of an output directory with the job each belongs to, in file-name order.
pub fn read_traces(dir: &Path) -> Result<Vec<(Job, Vec<MetricsRecord>)>> {
    let trace_dir = dir.join(TRACE_DIR);
    let mut paths: Vec<PathBuf> = fs::read_dir(&trace_dir)
        .map_err(|e| io_err(&trace_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let (meta, rows) = read_trace_csv(&path)?;
        let field = |k: &str| {
            meta.get(k)
                .ok_or_else(|| parse_err(&path, format!("missing `{k}` header")))
        };
        let job = Job {
            nodes: field("nodes")?.parse().map_err(|e| parse_err(&path, e))?,
            algorithm: field("algorithm")?.parse()?,
            init: field("init")?.parse()?,
            run: field("run")?.parse().map_err(|e| parse_err(&path, e))?,
        };
        out.push((job, rows));
    }
    Ok(out)
}
