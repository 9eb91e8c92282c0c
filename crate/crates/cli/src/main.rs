//! Command-line harness: runs, baselines, threshold and depth sweeps,
//! consolidated reports, trace export and event-log verification.

mod output;
mod spec;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use elastic_sim::engine::{depth_sweep, replay, sweep_thresholds_with};
use elastic_sim::policy::parse_count;
use elastic_sim::workloads::{read_trace, write_trace};
use elastic_sim::{run, AccessTrace, Execution, PolicySpec, WorkloadKind, WorkloadParams};

use output::{MetricsRow, METRICS_FILE};
use spec::{Experiment, SpecFile};

#[derive(Parser, Debug)]
#[command(name = "elastic-sim", version, about = "Simulate stretch/push/pull/jump over memory-limited nodes")]
struct Cli {
    /// Experiment spec (TOML). Without one the desk-scale defaults are used.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Desk-default workload to use when no spec is given.
    #[arg(long, global = true, conflicts_with = "spec")]
    workload: Option<String>,
    /// Overrides the seed for workload data and latency jitter.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Audit the cluster after every primitive and write event logs.
    #[arg(long, global = true)]
    strict: bool,
    /// Output root; each experiment writes to <out>/<name>.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One elastic run at the spec's threshold.
    Run {
        /// Also run the baseline and print the comparison.
        #[arg(long)]
        baseline: bool,
        /// Overrides the spec's threshold (a count, "inf" or "never").
        #[arg(long)]
        threshold: Option<String>,
    },
    /// The network-swap baseline alone (jumping disabled).
    Baseline,
    /// Elastic runs at each threshold plus one baseline run.
    Sweep {
        /// Comma-separated, ascending, e.g. 32,512,8192,4M.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<String>>,
    },
    /// DFS at a fixed threshold over a list of tree depths.
    DepthSweep {
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<u32>>,
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Consolidated best-threshold table over every metrics.csv below a directory.
    Report {
        /// Defaults to --out.
        dir: Option<PathBuf>,
    },
    /// Writes the workload's trace in the flat binary format.
    GenTrace {
        /// Defaults to <out>/<name>/trace.bin.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replays the event logs in a run directory against its metrics.csv.
    Verify {
        /// Defaults to <out>/<name>.
        dir: Option<PathBuf>,
    },
}

fn experiment(cli: &Cli) -> Result<Experiment> {
    let (file, default_name) = match (&cli.spec, &cli.workload) {
        (Some(path), _) => {
            let stem = path.file_stem().map_or("experiment".into(), |s| s.to_string_lossy().into_owned());
            (SpecFile::load(path)?, stem)
        }
        (None, Some(kind)) => {
            let kind: WorkloadKind = kind.parse()?;
            let mut f = SpecFile::default();
            f.workload.kind = Some(kind.name().to_string());
            (f, kind.name().to_string())
        }
        (None, None) => (SpecFile::default(), WorkloadKind::LinearSearch.name().to_string()),
    };
    let exp = file.resolve(&default_name)?;
    Ok(exp.with_overrides(cli.seed, cli.strict))
}

fn run_dir(cli: &Cli, exp: &Experiment) -> Result<PathBuf> {
    let dir = cli.out.join(&exp.name);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn generate(params: &WorkloadParams) -> Result<AccessTrace> {
    info!("generating {}", params.id());
    let trace = params.generate()?;
    info!("{} accesses over {} pages", trace.len(), trace.footprint_pages);
    Ok(trace)
}

/// The experiment's trace: the injected file if there is one, else generated.
fn load_trace(exp: &Experiment) -> Result<AccessTrace> {
    let Some(path) = &exp.trace_file else { return generate(&exp.workload) };
    let id = format!("trace({})", path.file_name().unwrap_or_default().to_string_lossy());
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let trace = read_trace(BufReader::new(f), id).with_context(|| format!("reading {}", path.display()))?;
    info!("{} accesses over {} pages", trace.len(), trace.footprint_pages);
    Ok(trace)
}

/// Writes metrics.csv and summary.txt and echoes the summary.
fn finish(dir: &Path, rows: &[MetricsRow], summary: String) -> Result<()> {
    output::write_metrics(&dir.join(METRICS_FILE), rows)?;
    fs::write(dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_run(cli: &Cli, policies: &[PolicySpec]) -> Result<()> {
    let exp = experiment(cli)?;
    let dir = run_dir(cli, &exp)?;
    let trace = load_trace(&exp)?;
    let mut rows = Vec::new();
    for &policy in policies {
        let out = run(&exp.config.with_policy(policy), &trace)?;
        if exp.write_events {
            output::write_events(&dir.join(output::events_file(policy)), &trace.workload_id, policy, &out.log)?;
        }
        rows.push(MetricsRow::new(&trace.workload_id, policy, &out.metrics));
    }
    let mut summary = format!("{}\n{}", trace.workload_id, output::runs_table(&rows));
    if let [elastic, base] = &rows[..] {
        summary += &format!(
            "speedup {:.3}x, traffic ratio {:.3}\n",
            base.sim_time_ns as f64 / elastic.sim_time_ns.max(1) as f64,
            elastic.network_bytes as f64 / base.network_bytes.max(1) as f64
        );
    }
    finish(&dir, &rows, summary)
}

fn cmd_sweep(cli: &Cli, thresholds: &Option<Vec<String>>) -> Result<()> {
    let exp = experiment(cli)?;
    let thresholds = match thresholds {
        Some(list) => list.iter().map(|s| parse_count(s)).collect::<elastic_sim::Result<Vec<_>>>()?,
        None => exp.thresholds.clone(),
    };
    let dir = run_dir(cli, &exp)?;
    let trace = load_trace(&exp)?;
    let config = elastic_sim::RunConfig { record_events: false, ..exp.config.clone() };
    let report = sweep_thresholds_with(Execution::default(), &config, &trace, &thresholds)?;
    let mut rows = vec![MetricsRow::new(&trace.workload_id, PolicySpec::Never, &report.baseline)];
    rows.extend(report.rows.iter().map(|r| MetricsRow::new(&trace.workload_id, r.policy, &r.metrics)));
    let best = report.best_comparison();
    let summary = format!(
        "{}\n{}best threshold {}: speedup {:.3}x, traffic ratio {:.3}, {} jumps\n",
        trace.workload_id,
        output::runs_table(&rows),
        report.best().policy,
        best.speedup,
        best.traffic_ratio,
        best.jumps
    );
    finish(&dir, &rows, summary)
}

fn cmd_depth_sweep(cli: &Cli, depths: &Option<Vec<u32>>, threshold: &Option<String>) -> Result<()> {
    let exp = experiment(cli)?;
    ensure!(exp.trace_file.is_none(), "depth-sweep generates its own traces and cannot use a trace file");
    ensure!(exp.workload.kind == WorkloadKind::Dfs, "depth-sweep needs a dfs workload, got {}", exp.workload.kind);
    let depths = depths.clone().unwrap_or_else(|| exp.depths.clone());
    let threshold = match threshold {
        Some(t) => parse_count(t)?,
        None => exp.depth_threshold,
    };
    let dir = run_dir(cli, &exp)?;
    let config = elastic_sim::RunConfig { record_events: false, ..exp.config.clone() };
    let found = depth_sweep(Execution::default(), &config, &exp.workload, &depths, threshold)?;
    let policy = PolicySpec::Threshold(threshold);
    let mut rows = Vec::new();
    let mut body = Vec::new();
    for r in &found {
        let id = WorkloadParams { dfs_depth: Some(r.depth), ..exp.workload.clone() }.id();
        rows.push(MetricsRow::new(&id, PolicySpec::Never, &r.baseline));
        rows.push(MetricsRow::new(&id, policy, &r.elastic));
        body.push(vec![
            r.depth.to_string(),
            r.footprint_pages.to_string(),
            format!("{:.4}", r.elastic.sim_time_ns as f64 * 1e-9),
            r.elastic.counts.jumps.to_string(),
            format!("{:.4}", r.baseline.sim_time_ns as f64 * 1e-9),
            format!("{:.3}", r.baseline.sim_time_ns as f64 / r.elastic.sim_time_ns.max(1) as f64),
        ]);
    }
    let summary = format!(
        "dfs depth sweep at threshold {threshold}\n{}",
        output::table(&["depth", "pages", "time_s", "jumps", "baseline_s", "speedup"], &body)
    );
    finish(&dir, &rows, summary)
}

fn cmd_report(cli: &Cli, dir: &Option<PathBuf>) -> Result<()> {
    let dir = dir.clone().unwrap_or_else(|| cli.out.clone());
    ensure!(dir.is_dir(), "{} is not a directory", dir.display());
    let files = output::find_files(&dir, METRICS_FILE)?;
    let mut rows = Vec::new();
    for f in &files {
        rows.extend(output::read_metrics(f)?);
    }
    if rows.is_empty() {
        bail!("no metrics rows under {}", dir.display());
    }
    let table = output::report_table(&output::consolidate(&rows));
    fs::write(dir.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_gen_trace(cli: &Cli, path: &Option<PathBuf>) -> Result<()> {
    let exp = experiment(cli)?;
    let path = match path {
        Some(p) => p.clone(),
        None => run_dir(cli, &exp)?.join("trace.bin"),
    };
    let trace = load_trace(&exp)?;
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_trace(BufWriter::new(f), &trace)?;
    println!("{}: {} accesses, {} pages -> {}", trace.workload_id, trace.len(), trace.footprint_pages, path.display());
    Ok(())
}

fn cmd_verify(cli: &Cli, dir: &Option<PathBuf>) -> Result<()> {
    let exp = experiment(cli)?;
    let dir = dir.clone().unwrap_or_else(|| cli.out.join(&exp.name));
    let rows = output::read_metrics(&dir.join(METRICS_FILE))?;
    let mut logs = Vec::new();
    for name in ["events.log", "events-baseline.log"] {
        let p = dir.join(name);
        if p.exists() {
            logs.push(p);
        }
    }
    ensure!(!logs.is_empty(), "no event logs in {}", dir.display());
    for path in logs {
        let (header, log) = output::read_events(&path)?;
        let r = replay(&log, &exp.config.cost).with_context(|| format!("replaying {}", path.display()))?;
        let row = rows
            .iter()
            .find(|m| m.workload == header.workload && m.threshold == header.threshold)
            .with_context(|| format!("{}: no metrics row for threshold {}", path.display(), header.threshold))?;
        let got = (r.sim_time_ns, r.network_bytes, r.counts.pulls, r.counts.pushes, r.counts.jumps);
        let want = (row.sim_time_ns, row.network_bytes, row.pulls, row.pushes, row.jumps);
        ensure!(
            got == want,
            "{}: replay gives (time, bytes, pulls, pushes, jumps) {got:?}, metrics.csv has {want:?}",
            path.display()
        );
        println!("{}: ok ({} events, threshold {})", path.display(), log.len(), header.threshold);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { baseline, threshold } => {
            let exp_policy = match threshold {
                Some(t) => PolicySpec::parse(t)?,
                None => experiment(cli)?.config.policy,
            };
            let mut policies = vec![exp_policy];
            if *baseline {
                policies.push(PolicySpec::Never);
            }
            cmd_run(cli, &policies)
        }
        Command::Baseline => cmd_run(cli, &[PolicySpec::Never]),
        Command::Sweep { thresholds } => cmd_sweep(cli, thresholds),
        Command::DepthSweep { depths, threshold } => cmd_depth_sweep(cli, depths, threshold),
        Command::Report { dir } => cmd_report(cli, dir),
        Command::GenTrace { output } => cmd_gen_trace(cli, output),
        Command::Verify { dir } => cmd_verify(cli, dir),
    }
}
