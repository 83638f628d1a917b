use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use samplebench::conformance::precision_recall_tree;
use samplebench::conformance::ConformanceResult;
use samplebench::discovery::discover;
use samplebench::eventlog::{directly_follows, write_csv, write_xes, EventLog};
use samplebench::harness::{
    self, correlate, read_log, read_records, write_records, ExperimentConfig, ExperimentRecord, Grouping,
};
use samplebench::par::Execution;
use samplebench::processtree::{generate, simulate, GeneratorParams, ProcessTree, SimulationParams};
use samplebench::quality::measure_profiles;
use samplebench::sampling::{draw, Technique};

#[derive(Parser)]
#[command(name = "samplebench", version, about = "Event-log sampling and log/model quality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample from a log.
    Sample {
        log: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Technique::Simple)]
        technique: Technique,
        /// Output file; `.csv` writes a case/activity table, anything else XES.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Directly-follows quality of a sample against its parent log.
    Quality {
        log: PathBuf,
        sample: PathBuf,
        /// Sampling ratio; defaults to |sample| / |log|.
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Discover a process tree and print it in text form.
    Discover { log: PathBuf },
    /// Entropy-based precision and recall of a process tree against a log.
    Conformance {
        log: PathBuf,
        /// File holding the tree in text form.
        tree: PathBuf,
    },
    /// Play out a process tree into a log file.
    Simulate {
        /// Tree file; a random tree is generated when omitted.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        traces: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Controlled experiment on generated process trees.
    Invitro(ExperimentArgs),
    /// Experiment on recorded logs.
    Invivo {
        #[command(flatten)]
        args: ExperimentArgs,
        #[arg(required = true)]
        logs: Vec<PathBuf>,
    },
    /// Correlation table from a records file.
    Correlate {
        records: PathBuf,
        #[arg(long)]
        per_log: bool,
        /// Also write long-format plot data here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` configuration; defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Records CSV output.
    #[arg(long, short)]
    out: PathBuf,
    /// Correlation report output; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Long-format plot data output.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Run on the calling thread only.
    #[arg(long)]
    serial: bool,
}

fn write_log(log: &EventLog, path: &Path) -> Result<()> {
    let out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(log, out)?;
    } else {
        write_xes(log, out)?;
    }
    Ok(())
}

fn read_tree(path: &Path) -> Result<ProcessTree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.trim().parse()?)
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    let config = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text).with_context(|| p.display().to_string())?
        }
        None => ExperimentConfig::default(),
    };
    Ok(config.with_env_seed()?)
}

fn emit_report(records: &[ExperimentRecord], grouping: Grouping, report: Option<&Path>, plot: Option<&Path>) -> Result<()> {
    let table = correlate(records, grouping)?;
    let text = table.to_text();
    match report {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(p) = plot {
        fs::write(p, table.plot_csv(records))?;
    }
    Ok(())
}

fn run_experiment(args: &ExperimentArgs, logs: Option<&[PathBuf]>) -> Result<()> {
    let config = load_config(args.config.as_deref())?;
    let execution = if args.serial { Execution::Serial } else { Execution::Parallel };
    let (records, grouping) = match logs {
        None => (harness::run_invitro(&config, execution)?, Grouping::PerModel),
        Some(paths) => (harness::run_invivo(paths, &config, execution)?, Grouping::PerLog),
    };
    let out = BufWriter::new(File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?);
    write_records(&records, out)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} records written to {} ({failed} with errors)", records.len(), args.out.display());
    emit_report(&records, grouping, args.report.as_deref(), args.plot.as_deref())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sample { log, ratio, seed, technique, out } => {
            if !(ratio > 0.0 && ratio <= 1.0) {
                bail!("ratio must be within (0, 1]");
            }
            let sample = draw(&read_log(&log)?, ratio, seed, technique);
            write_log(&sample.log, &out)?;
            eprintln!("{} of {} traces sampled", sample.len(), sample.source_total);
        }
        Command::Quality { log, sample, ratio } => {
            let parent = read_log(&log)?;
            let sample = read_log(&sample)?;
            let ratio = ratio.unwrap_or(sample.total_traces() as f64 / parent.total_traces() as f64);
            let q = measure_profiles(&directly_follows(&parent), &directly_follows(&sample), ratio)?;
            println!("ratio = {}", q.ratio);
            println!("pairs = {}", q.n);
            println!("coverage = {}", q.coverage);
            println!("nmae = {}", q.nmae);
            println!("nrmse = {}", q.nrmse);
            println!("smape = {}", q.smape);
            println!("srmspe = {}", q.srmspe);
        }
        Command::Discover { log } => println!("{}", discover(&read_log(&log)?)?),
        Command::Conformance { log, tree } => {
            let result = precision_recall_tree(&read_log(&log)?, &read_tree(&tree)?)?;
            println!("{}", ConformanceResult::CSV_HEADER);
            println!("{}", result.to_csv_row());
        }
        Command::Simulate { tree, traces, seed, out } => {
            let tree = match tree {
                Some(p) => read_tree(&p)?,
                None => generate(&GeneratorParams { seed, ..GeneratorParams::default() })?,
            };
            let params = SimulationParams { trace_count: traces, ..SimulationParams::default() };
            write_log(&simulate(&tree, &params, seed), &out)?;
            eprintln!("{tree}");
        }
        Command::Invitro(args) => run_experiment(&args, None)?,
        Command::Invivo { args, logs } => run_experiment(&args, Some(&logs))?,
        Command::Correlate { records, per_log, plot } => {
            let file = File::open(&records).with_context(|| format!("opening {}", records.display()))?;
            let records = read_records(file)?;
            let grouping = if per_log { Grouping::PerLog } else { Grouping::PerModel };
            emit_report(&records, grouping, None, plot.as_deref())?;
        }
    }
    Ok(())
}
