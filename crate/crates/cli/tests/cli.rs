use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use elastic_sim::workloads::read_trace;
use elastic_sim::{WorkloadKind, WorkloadParams};

const SMALL: &str = r#"
name = "small"
strict = true

[cluster]
capacities = [64, 64]

[policy]
threshold = 8

[workload]
kind = "linear-search"
elements = 50000
"#;

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastic-sim"))
        .current_dir(dir)
        .env_remove("RUST_LOG")
        .args(args)
        .output()
        .expect("spawn")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = cli(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

fn setup(spec: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), spec).unwrap();
    dir
}

#[test]
fn run_with_baseline_writes_both_rows_and_verifies() {
    let dir = setup(SMALL);
    let stdout = ok(dir.path(), &["--spec", "small.toml", "run", "--baseline"]);
    assert!(stdout.contains("speedup"));
    let path = dir.path().join("out/small/metrics.csv");
    let metrics = fs::read_to_string(&path).unwrap();
    assert!(metrics.starts_with("workload,threshold,sim_time_ns,network_bytes,pulls,pushes,jumps,jump_freq\n"));
    let thresholds: Vec<String> = rows(&path).iter().map(|r| r[1].to_string()).collect();
    assert_eq!(thresholds, ["8", "never"]);
    let verified = ok(dir.path(), &["--spec", "small.toml", "verify"]);
    assert_eq!(verified.matches(": ok").count(), 2);
}

#[test]
fn verify_catches_a_tampered_metrics_file() {
    let dir = setup(SMALL);
    ok(dir.path(), &["--spec", "small.toml", "run"]);
    let path = dir.path().join("out/small/metrics.csv");
    let mut records = rows(&path);
    let mut cells: Vec<String> = records[0].iter().map(String::from).collect();
    cells[2] = (cells[2].parse::<u64>().unwrap() + 1).to_string();
    records[0] = cells.into();
    let mut w = csv::Writer::from_path(&path).unwrap();
    w.write_record(["workload", "threshold", "sim_time_ns", "network_bytes", "pulls", "pushes", "jumps", "jump_freq"])
        .unwrap();
    for r in &records {
        w.write_record(r).unwrap();
    }
    w.flush().unwrap();
    let out = cli(dir.path(), &["--spec", "small.toml", "verify"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("replay gives"));
}

#[test]
fn identical_inputs_give_identical_files() {
    let a = setup(SMALL);
    let b = setup(SMALL);
    for d in [&a, &b] {
        ok(d.path(), &["--spec", "small.toml", "run", "--baseline"]);
    }
    for f in ["metrics.csv", "summary.txt", "events.log", "events-baseline.log"] {
        let read = |d: &tempfile::TempDir| fs::read(d.path().join("out/small").join(f)).unwrap();
        assert_eq!(read(&a), read(&b), "{f}");
    }
}

#[test]
fn sweep_has_a_baseline_row_and_one_row_per_threshold() {
    let dir = setup(SMALL);
    let stdout = ok(dir.path(), &["--spec", "small.toml", "sweep", "--thresholds", "4,8,64,4M"]);
    assert!(stdout.contains("best threshold 4"));
    let records = rows(&dir.path().join("out/small/metrics.csv"));
    let thresholds: Vec<&str> = records.iter().map(|r| &r[1]).collect();
    assert_eq!(thresholds, ["never", "4", "8", "64", "4194304"]);
    // a threshold above every fault count behaves like the baseline
    let tail = |r: &csv::StringRecord| r.iter().skip(2).map(String::from).collect::<Vec<_>>();
    assert_eq!(tail(&records[0]), tail(&records[4]));

    let report = ok(dir.path(), &["report"]);
    assert_eq!(report.lines().count(), 2);
    assert!(fs::read_to_string(dir.path().join("out/report.txt")).unwrap() == report);
}

#[test]
fn descending_thresholds_are_rejected() {
    let dir = setup(SMALL);
    let out = cli(dir.path(), &["--spec", "small.toml", "sweep", "--thresholds", "64,8"]);
    assert!(!out.status.success());
}

#[test]
fn depth_sweep_runs_dfs_and_refuses_other_workloads() {
    let spec = "name = \"d\"\n[cluster]\ncapacities = [256, 256]\n[workload]\nkind = \"dfs\"\nelements = 20000\n\
                [sweep]\ndepths = [2, 4]\ndepth_threshold = 16\n";
    let dir = setup(spec);
    let stdout = ok(dir.path(), &["--spec", "small.toml", "depth-sweep"]);
    assert_eq!(stdout.lines().count(), 4);
    assert_eq!(rows(&dir.path().join("out/d/metrics.csv")).len(), 4);

    let other = setup(SMALL);
    let out = cli(other.path(), &["--spec", "small.toml", "depth-sweep"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dfs"));
}

#[test]
fn unknown_spec_key_names_its_line() {
    let dir = setup("name = \"x\"\n[cluster]\ncapacities = [4, 4]\nbogus = 1\n");
    let out = cli(dir.path(), &["--spec", "small.toml", "run"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("bogus"), "{err}");
}

#[test]
fn report_on_an_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["report", "."]);
    assert!(!out.status.success());
}

#[test]
fn gen_trace_matches_the_generator() {
    let dir = setup(SMALL);
    ok(dir.path(), &["--spec", "small.toml", "--seed", "9", "gen-trace", "--output", "t.bin"]);
    let bytes = fs::read(dir.path().join("t.bin")).unwrap();
    let mut params = WorkloadParams::new(WorkloadKind::LinearSearch, 50_000, 9);
    params.element_bytes = 8;
    let want = params.generate().unwrap();
    let got = read_trace(&bytes[..], want.workload_id.clone()).unwrap();
    // the file format carries accesses and footprint only
    assert_eq!((got.accesses, got.footprint_pages), (want.accesses, want.footprint_pages));
}

#[test]
fn spec_can_inject_a_trace_file() {
    let dir = setup(SMALL);
    ok(dir.path(), &["--spec", "small.toml", "gen-trace", "--output", "t.bin"]);
    fs::create_dir(dir.path().join("specs")).unwrap();
    let spec = "name = \"injected\"\n[cluster]\ncapacities = [64, 64]\n[workload]\ntrace = \"../t.bin\"\n";
    fs::write(dir.path().join("specs/inj.toml"), spec).unwrap();
    let stdout = ok(dir.path(), &["--spec", "specs/inj.toml", "run", "--baseline"]);
    assert!(stdout.starts_with("trace(t.bin)"));

    let both = "[workload]\ntrace = \"t.bin\"\nkind = \"dfs\"\n";
    fs::write(dir.path().join("both.toml"), both).unwrap();
    assert!(!cli(dir.path(), &["--spec", "both.toml", "run"]).status.success());
}
