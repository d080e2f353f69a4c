use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn cdnplace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdnplace")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_topology_passes_check() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("na.topo");
    assert_eq!(cdnplace(&["topo", "gen", "-o", path(&file)]).status.code(), Some(0));
    let out = cdnplace(&["topo", "check", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("11 zones, 3 regions"));

    let random = dir.path().join("random.topo");
    let out = cdnplace(&["topo", "gen", "--shape", "random", "--zones", "6", "--seed", "4", "-o", path(&random)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&cdnplace(&["topo", "check", path(&random)])).contains("6 zones"));
}

#[test]
fn broken_topology_is_an_input_error() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("bad.topo");
    fs::write(&file, "region 1\nzone 1 1 0\n").unwrap();
    let out = cdnplace(&["topo", "check", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn unknown_flags_and_kinds_are_usage_errors() {
    assert_eq!(cdnplace(&["place", "--kind", "best"]).status.code(), Some(2));
    assert_eq!(cdnplace(&["experiment"]).status.code(), Some(2));
    assert_eq!(cdnplace(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn paths_and_betweenness_tables() {
    let out = stdout(&cdnplace(&["paths", "--from", "2", "--to", "6"]));
    assert_eq!(out.lines().nth(1), Some("2,6,1,2-1-6,42"));
    let bc = stdout(&cdnplace(&["bc"]));
    assert!(bc.starts_with("zone,region,betweenness,sna_priority\n"));
    assert!(bc.lines().nth(1).unwrap().starts_with("1,1,24,"));
}

#[test]
fn placement_round_trips_through_validate() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.csv");
    let demand = dir.path().join("demand.csv");
    let out = cdnplace(&["scenario", "gen", "--kind", "sparse", "--seed", "5", "-o", path(&demand)]);
    assert_eq!(out.status.code(), Some(0));

    let out = cdnplace(&["place", "--kind", "wsna", "--rate", "60", "--demand", path(&demand), "-o", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SLA met"));
    let text = fs::read_to_string(&cfg).unwrap();
    assert!(text.lines().any(|l| l.starts_with("x,")) && text.lines().any(|l| l.starts_with("y,")));
    let out = cdnplace(&["validate", path(&cfg), "--rate", "60", "--demand", path(&demand)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sla_violation_is_reported_with_exit_one() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("gs.csv");
    let out = cdnplace(&["place", "--kind", "gs", "--rate", "100", "-o", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SLA not met"));
    let out = cdnplace(&["validate", path(&cfg), "--rate", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("sla,\"sla\""));
    assert_eq!(cdnplace(&["validate", path(&cfg), "--rate", "100", "--lenient"]).status.code(), Some(0));
}

#[test]
fn oracle_and_lp_export_on_a_tiny_instance() {
    let dir = tempdir().unwrap();
    let topo = dir.path().join("tiny.topo");
    fs::write(&topo, "region 1\nzone 1 1 0.4\nzone 2 1 0.9\nzone 3 1 0.6\nedge 1 2 100 inter-zone\nedge 2 3 100 inter-zone\n")
        .unwrap();
    let demand = dir.path().join("demand.csv");
    fs::write(&demand, "zone,content,requests\n1,1,1\n2,1,2\n3,1,1\n").unwrap();
    let common = ["--topology", path(&topo), "--demand", path(&demand), "--k", "2"];

    let cfg = dir.path().join("opt.csv");
    let mut args = vec!["oracle", "-o", path(&cfg)];
    args.extend_from_slice(&common);
    let out = cdnplace(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("optimum"));

    let mut args = vec!["validate", path(&cfg)];
    args.extend_from_slice(&common);
    assert_eq!(cdnplace(&args).status.code(), Some(0));

    let lp = dir.path().join("model.lp");
    let mut args = vec!["export-lp", "-o", path(&lp)];
    args.extend_from_slice(&common);
    assert_eq!(cdnplace(&args).status.code(), Some(0));
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.lines().any(|l| l == "Minimize") && text.trim_end().ends_with("End"));

    // the default eleven-zone instance is beyond exhaustive search
    assert_eq!(cdnplace(&["oracle"]).status.code(), Some(2));
}

#[test]
fn experiment_outputs_are_reproducible() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    for dir in [&a, &b] {
        let out = cdnplace(&[
            "experiment", "--scenarios", "dense,sparse", "--rates", "20:60:20", "--kinds", "wsna,gs,sna", "--seed", "2",
            "--out", path(dir.path()),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).starts_with("18 cells, 0 failed"));
    }
    let results = fs::read(a.path().join("results.csv")).unwrap();
    assert_eq!(results, fs::read(b.path().join("results.csv")).unwrap());
    assert_eq!(
        fs::read(a.path().join("plot_cost_dense.csv")).unwrap(),
        fs::read(b.path().join("plot_cost_dense.csv")).unwrap()
    );

    let results = a.path().join("results.csv");
    let out = cdnplace(&["plotdata", "--results", path(&results), "--axis", "sla", "--scenario", "dense"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("rate,GS,WSNA,SNA\n"));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        text,
        fs::read_to_string(a.path().join("plot_sla_dense.csv")).unwrap(),
    );
    let out = cdnplace(&["plotdata", "--results", path(&results), "--axis", "colour"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cdnplace(&["plotdata", "--results", path(&results), "--axis", "cost", "--rate", "55"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn settings_file_overrides_defaults() {
    let dir = tempdir().unwrap();
    let settings = dir.path().join("settings.toml");
    fs::write(&settings, "seed = 3\nrates = [30.0]\nkinds = [\"wsna\"]\nscenarios = [\"sparse\"]\n").unwrap();
    let out = cdnplace(&["experiment", "--config", path(&settings), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("1 cells"));
    let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().starts_with("sparse,3,30.0,wsna,ok,"));

    // a partial link table keeps the other defaults
    fs::write(&settings, "[links.inter_region_tariff]\ntiers = [[1.0, 0.001]]\n").unwrap();
    assert_eq!(cdnplace(&["bc", "--config", path(&settings)]).status.code(), Some(0));

    fs::write(&settings, "colour = 1\n").unwrap();
    assert_eq!(cdnplace(&["bc", "--config", path(&settings)]).status.code(), Some(2));
}
