use std::process::Command;
use std::time::Instant;

use vcluster::baselines::{mst_best_move, mst_cfa};
use vcluster::bench::{
    aggregate, read_runs_csv, read_trace_csv, run_experiment, snapshot_graph, write_experiment,
    AggregateRow, AGGREGATE_FILE, RUNS_FILE, TRACE_DIR,
};
use vcluster::game::{run, Dynamics, EngineState, LearningParams};
use vcluster::net::FrozenTopology;
use vcluster::objective::{Objective, Partition};
use vcluster::{Algorithm, InitMode, SimConfig};

fn small_config() -> SimConfig {
    SimConfig {
        nodes: 20,
        sweep: vec![20, 30, 40],
        area_length: 1200.0,
        slots: 30,
        runs: 2,
        inits: vec![InitMode::None, InitMode::Cabp],
        ..SimConfig::default()
    }
}

#[test]
fn emitted_aggregates_match_recomputation_from_emitted_runs() {
    let cfg = small_config();
    let out = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_experiment(dir.path(), &out).unwrap();

    let runs = read_runs_csv(&dir.path().join(RUNS_FILE)).unwrap();
    assert_eq!(runs.len(), 3 * 3 * 2 * 2);
    let recomputed = aggregate(&runs);
    assert_eq!(recomputed.len(), 3 * 3 * 2);

    let text = std::fs::read_to_string(dir.path().join(AGGREGATE_FILE)).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let emitted: Vec<AggregateRow> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(emitted.len(), recomputed.len());
    for (e, r) in emitted.iter().zip(&recomputed) {
        assert_eq!(
            (e.nodes, e.algorithm, e.init),
            (r.nodes, r.algorithm, r.init)
        );
        assert!((e.chi_total - r.chi_total).abs() <= 1e-9 * r.chi_total.abs().max(1.0));
        assert!((e.mean - r.mean).abs() <= 1e-9);
        assert!(e.worst <= e.mean && e.mean <= e.best);
    }

    // per-run records agree with the last row of each emitted trace
    for r in &runs {
        let stem = format!(
            "n{}_{}_{}_run{:02}.csv",
            r.nodes,
            r.algorithm.tag(),
            r.init.tag(),
            r.run
        );
        let (meta, rows) = read_trace_csv(&dir.path().join(TRACE_DIR).join(stem)).unwrap();
        assert_eq!(meta["config_hash"], cfg.hash());
        assert_eq!(meta["seed"], r.seed.to_string());
        assert_eq!(rows.last().unwrap().g1, r.g1);
    }
}

#[test]
fn single_run_has_equal_best_worst_and_mean() {
    let cfg = SimConfig {
        runs: 1,
        sweep: vec![],
        inits: vec![InitMode::None],
        ..small_config()
    };
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.aggregate.len(), Algorithm::ALL.len());
    for row in &out.aggregate {
        assert_eq!(row.best, row.mean);
        assert_eq!(row.worst, row.mean);
    }
}

#[test]
fn repeated_experiments_write_identical_files() {
    let cfg = SimConfig {
        runs: 1,
        sweep: vec![],
        ..small_config()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_experiment(a.path(), &run_experiment(&cfg).unwrap()).unwrap();
    write_experiment(b.path(), &run_experiment(&cfg).unwrap()).unwrap();
    let mut files = Vec::new();
    for entry in walk(a.path()) {
        let rel = entry.strip_prefix(a.path()).unwrap().to_path_buf();
        assert_eq!(
            std::fs::read(&entry).unwrap(),
            std::fs::read(b.path().join(&rel)).unwrap(),
            "{rel:?}"
        );
        files.push(rel);
    }
    assert!(files.len() > 5);
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

#[test]
fn centralized_search_is_slower_than_distributed_convergence() {
    let cfg = SimConfig::default();
    let graph = snapshot_graph(&cfg, 3).unwrap();
    let params = cfg.objective();

    let started = Instant::now();
    let mut state = EngineState::new(Partition::singletons(graph.len()), 3);
    run(
        &mut state,
        &mut FrozenTopology::new(graph.clone()),
        &Dynamics::dca(params, LearningParams::greedy()),
        500,
    )
    .unwrap();
    let distributed = started.elapsed();

    let started = Instant::now();
    let centralized = mst_cfa(&graph, &params);
    let central = started.elapsed();
    assert!(central > distributed, "{central:?} vs {distributed:?}");
    assert!(mst_best_move(&Objective::new(&graph, params), &centralized.partition).is_none());
}

#[test]
fn cli_rejects_unknown_algorithms_and_bad_configs() {
    let bin = env!("CARGO_BIN_EXE_vcluster");
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(bin)
        .args(["run", "--algorithms", "nope", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("nope"));

    let status = Command::new(bin)
        .args(["run", "--zeta", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("zeta"));
}

#[test]
fn cli_run_then_table_reproduces_the_table() {
    let bin = env!("CARGO_BIN_EXE_vcluster");
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        "nodes = 15\narea_length = 900.0\nslots = 10\nruns = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let first = Command::new(bin)
        .args(["run", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let table = std::fs::read(out.join("table.txt")).unwrap();
    let again = Command::new(bin)
        .args(["table", "--dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(again.status.success());
    assert_eq!(std::fs::read(out.join("table.txt")).unwrap(), table);
    assert_eq!(again.stdout, table);
    let curve = Command::new(bin)
        .args(["curve", "--dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(curve.status.success());
    assert!(
        std::fs::read_to_string(out.join("curve.csv"))
            .unwrap()
            .lines()
            .count()
            > 10
    );
}
