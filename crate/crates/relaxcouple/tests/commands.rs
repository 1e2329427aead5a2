use std::fs;
use std::path::Path;
use std::process::Command;

use relaxcouple::output::parse_table;
use relaxcouple::{cmd_consistency, cmd_convergence, cmd_run, RunConfig, RunError, Scenario};
use relaxcouple_core::psystem::{Experiment, PSystemModel};

fn small(dir: &Path, cells: usize) -> RunConfig {
    RunConfig {
        cells,
        cell_list: vec![100, 200],
        output_dir: dir.to_path_buf(),
        ..RunConfig::defaults(Scenario::PsystemJump)
    }
}

#[test]
fn run_writes_one_file_per_output_time_and_the_error_series() {
    let dir = tempfile::tempdir().unwrap();
    let summary = cmd_run(&small(dir.path(), 100)).unwrap();
    assert_eq!(summary.snapshots.len(), 3);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["errors.csv", "snapshot_t0.0716.csv", "snapshot_t0.2864.csv", "snapshot_t0.55.csv"]
    );
    let snap = fs::read_to_string(&summary.snapshots[2]).unwrap();
    let mut lines = snap.lines();
    assert_eq!(lines.next(), Some("x,rho,momentum,pressure"));
    assert_eq!(lines.count(), 100);
    let errors = fs::read_to_string(&summary.errors).unwrap();
    assert_eq!(errors.lines().next(), Some("t,e1,e2"));
    assert_eq!(errors.lines().count(), summary.steps + 2);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sa = cmd_run(&small(a.path(), 100)).unwrap();
    let sb = cmd_run(&small(b.path(), 100)).unwrap();
    for (pa, pb) in sa.snapshots.iter().chain([&sa.errors]).zip(sb.snapshots.iter().chain([&sb.errors])) {
        assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
    }
}

#[test]
fn relaxation_mode_is_close_to_the_central_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let central = cmd_run(&small(dir.path(), 100)).unwrap();
    let relaxed = cmd_run(&RunConfig {
        epsilon: 1e-8,
        ..small(dir.path(), 100)
    })
    .unwrap();
    assert!((relaxed.l1.0 - central.l1.0).abs() <= 1e-3 * central.l1.0);
}

#[test]
fn convergence_table_roundtrips_and_halves() {
    let dir = tempfile::tempdir().unwrap();
    let tables = cmd_convergence(&small(dir.path(), 100), &[4]).unwrap();
    assert_eq!(tables.len(), 1);
    let rows = parse_table(&fs::read_to_string(&tables[0].path).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].cells, 100);
    assert!(rows[0].eoc_e1.is_none());
    let eoc = rows[1].eoc_e2.unwrap();
    assert!((eoc - 1.0).abs() < 0.05, "{eoc}");
    for (a, b) in rows.iter().zip(&tables[0].rows) {
        assert!((a.l1_e1 - b.l1_e1).abs() <= 1e-3 * b.l1_e1);
    }
}

#[test]
fn single_mesh_table_has_no_orders() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        cell_list: vec![100],
        ..small(dir.path(), 100)
    };
    let tables = cmd_convergence(&config, &[3]).unwrap();
    assert_eq!(tables[0].rows.len(), 1);
    assert!(tables[0].rows[0].eoc_e1.is_none() && tables[0].rows[0].eoc_e2.is_none());
}

#[test]
fn non_doubling_cell_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        cell_list: vec![100, 300],
        ..small(dir.path(), 100)
    };
    assert!(matches!(cmd_convergence(&config, &[1]), Err(RunError::Config(_))));
}

#[test]
fn consistency_verdicts() {
    let model = PSystemModel::new(Experiment::ALPHA, 1.0, 2.0).unwrap();
    for ap in 1..=3 {
        let v = cmd_consistency(&model, ap).unwrap();
        assert!(!v.is_consistent(), "approach {ap}");
        assert!(v.describe().contains("counterexample"));
    }
    assert!(cmd_consistency(&model, 4).unwrap().is_consistent());
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relaxcouple"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = |args: &[&str]| binary().args(args).output().unwrap().status.code();
    assert_eq!(status(&["run", "--cells", "101", "--out", out]), Some(1));
    assert_eq!(status(&["run", "--approach", "5", "--out", out]), Some(1));
    assert_eq!(status(&["run", "--cells", "100", "--out", out]), Some(0));
    assert_eq!(status(&["consistency", "--approach", "1"]), Some(3));
    assert_eq!(status(&["consistency", "--approach", "4"]), Some(0));
    assert_eq!(status(&["run", "--config", "/nonexistent/relaxcouple.conf"]), Some(1));
}

#[test]
fn cli_reads_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("demo.conf");
    let out = dir.path().join("out");
    fs::write(
        &conf,
        format!("# demo\nscenario = kirchhoff-demo\ncells = 40\noutput_dir = {}\n", out.display()),
    )
    .unwrap();
    let res = binary().args(["run", "--config", conf.to_str().unwrap()]).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("snapshot_t0.2.csv").exists());
}
