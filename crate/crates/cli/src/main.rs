use chaoslab::harness::{self, ExperimentConfig, Manifest, RunReport};
use chaoslab::Error;
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Run the numerical checks and write CSV/JSON reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed; overrides the config file.
    #[arg(long, global = true, env = "CHAOSLAB_SEED")]
    seed: Option<u64>,
    /// Number of independent replicas per run.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run every config in a manifest {"runs": [...]}.
    Suite { manifest: PathBuf },
    /// List registered experiments and their parameters.
    List,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    statistic: &'a str,
    estimate: f64,
    se: Option<f64>,
    target: f64,
    tolerance: f64,
    pass: bool,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn apply_overrides(cli: &Cli, c: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(r) = cli.replicas {
        c.replicas = r;
    }
}

fn out_dir(cli: &Cli, c: &ExperimentConfig) -> PathBuf {
    cli.out.clone().or_else(|| c.output_path.clone()).unwrap_or_else(|| PathBuf::from("."))
}

/// Writes through a sibling temp file so a failed run never leaves a partial report.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Numeric(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn csv_bytes(report: &RunReport) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(CsvRow {
            experiment: &report.config.experiment,
            statistic: &r.statistic,
            estimate: r.estimate,
            se: r.se,
            target: r.target,
            tolerance: r.tolerance,
            pass: r.pass,
        })
        .map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))
}

fn write_report(dir: &Path, report: &RunReport) -> Result<(), Failure> {
    let name = &report.config.experiment;
    write_atomic(&dir.join(format!("{name}.csv")), &csv_bytes(report)?)?;
    let json = serde_json::to_vec_pretty(report).map_err(|e| Failure::Numeric(e.to_string()))?;
    write_atomic(&dir.join(format!("{name}.json")), &json)
}

fn summarize(report: &RunReport) {
    for r in &report.rows {
        println!("{:<6} {}  estimate={} target={} tol={}", if r.pass { "pass" } else { "FAIL" }, r.statistic, r.estimate, r.target, r.tolerance);
    }
    println!("{}: {} ({:.1}s)", report.config.experiment, if report.passed() { "PASS" } else { "FAIL" }, report.wall_clock_s);
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let mut config: ExperimentConfig = read_json(path)?;
    apply_overrides(cli, &mut config);
    harness::resolve(&config)?;
    let report = harness::run(&config)?;
    write_report(&out_dir(cli, &config), &report)?;
    summarize(&report);
    Ok(report.exit_code())
}

fn cmd_suite(cli: &Cli, path: &Path) -> Result<i32, Failure> {
    let mut manifest: Manifest = read_json(path)?;
    manifest.runs.iter_mut().for_each(|c| apply_overrides(cli, c));
    let suite = harness::suite(&manifest)?;
    for entry in &suite.runs {
        match (&entry.report, &entry.error) {
            (Some(r), _) => {
                write_report(&out_dir(cli, &r.config), r)?;
                summarize(r);
            }
            (None, Some(e)) => eprintln!("{}: error: {e}", entry.experiment),
            _ => {}
        }
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let json = serde_json::to_vec_pretty(&suite).map_err(|e| Failure::Numeric(e.to_string()))?;
    write_atomic(&dir.join("suite.json"), &json)?;
    Ok(suite.exit_code)
}

fn cmd_list() -> i32 {
    for e in harness::registry() {
        println!("{:<22} criterion {:>2}  {}", e.name, e.criterion, e.summary);
        for p in e.params {
            let d = p.default.map(|d| d.to_string()).unwrap_or_else(|| "ladder".into());
            println!("    {:<14} default {:<8} range [{}, {}]{}", p.name, d, p.min, p.max, if p.integer { " integer" } else { "" });
        }
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Run { config } => cmd_run(&cli, config),
        Command::Suite { manifest } => cmd_suite(&cli, manifest),
        Command::List => Ok(cmd_list()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
