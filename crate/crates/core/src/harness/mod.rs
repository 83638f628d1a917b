//! Experiment protocols: in-vitro runs against generated process trees with a
//! known language, and in-vivo runs against recorded event logs.
//!
//! Every (model, log, ratio, repetition) cell is independent. Cells run
//! through [`par::map`] and the resulting records are put in canonical order
//! before they leave this module, so serial and parallel runs agree exactly.

pub mod config;
pub mod records;
pub mod report;
pub mod seed;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::conformance::{precision_recall_tree, ConformanceResult};
use crate::discovery::discover;
use crate::eventlog::{directly_follows, parse_csv, parse_xes, CsvOptions, DirectlyFollowsProfile, EventLog, LogError, XesOptions};
use crate::par::{self, Execution};
use crate::processtree::{generate, simulate, GeneratorError, GeneratorParams, ProcessTree};
use crate::quality::measure;
use crate::sampling::draw;

pub use config::{ConfigError, ExperimentConfig, DEFAULT_RATIOS, SEED_ENV};
pub use records::{canonicalize, read_records, write_records, ExperimentRecord, QualityValues, RECORD_COLUMNS};
pub use report::{correlate, ConformanceMeasure, CorrelationCell, CorrelationTable, GroupReport, Grouping, QualityMeasure};
pub use seed::derive_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model {model}: {source}")]
    Generator { model: u64, source: GeneratorError },
    #[error("{}: {source}", path.display())]
    Log { path: PathBuf, source: LogError },
    #[error("no event logs given")]
    NoLogs,
    #[error("malformed records: {0}")]
    Records(String),
    #[error("group {group}: {count} usable records, at least 3 required")]
    InsufficientRecords { group: String, count: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads a log file: `.csv` as a case/activity table, anything else as XES
/// (plain or gzip-compressed).
pub fn read_log(path: &Path) -> Result<EventLog, HarnessError> {
    let wrap = |source| HarnessError::Log { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(|e| wrap(LogError::Io(e)))?;
    let reader = BufReader::new(file);
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_csv(reader, &CsvOptions::default()).map_err(wrap)
    } else {
        parse_xes(reader, XesOptions::default()).map_err(wrap)
    }
}

/// A parent log shared by all cells drawn from it.
struct Source {
    model_id: u64,
    log_id: u64,
    log: EventLog,
    profile: DirectlyFollowsProfile,
    truth: Option<ConformanceResult>,
    /// Set when the true model quality could not be computed.
    truth_error: Option<String>,
}

impl Source {
    fn new(model_id: u64, log_id: u64, log: EventLog) -> Self {
        let profile = directly_follows(&log);
        Source { model_id, log_id, log, profile, truth: None, truth_error: None }
    }
}

struct Cell {
    source: usize,
    ratio_index: usize,
    repetition: usize,
}

fn run_cell(source: &Source, cell: &Cell, config: &ExperimentConfig) -> ExperimentRecord {
    let ratio = config.ratios[cell.ratio_index];
    let seed = derive_seed(
        config.master_seed,
        source.model_id,
        source.log_id,
        cell.ratio_index as u64,
        cell.repetition as u64,
    );
    let mut record = ExperimentRecord {
        model_id: source.model_id,
        log_id: source.log_id,
        ratio,
        ratio_index: cell.ratio_index,
        repetition: cell.repetition,
        technique: config.sampler,
        seed,
        quality: None,
        precision_sample: None,
        recall_sample: None,
        precision_true: source.truth.map(|t| t.precision),
        recall_true: source.truth.map(|t| t.recall),
        error: source.truth_error.clone(),
    };
    let sample = draw(&source.log, ratio, seed, config.sampler);
    let mut errors: Vec<String> = record.error.take().into_iter().collect();
    match measure(&source.profile, &sample) {
        Ok(q) => record.quality = Some(QualityValues::from(&q)),
        Err(e) => errors.push(format!("quality: {e}")),
    }
    match discover(&sample.log) {
        Ok(model) => match precision_recall_tree(&sample.log, &model) {
            Ok(pr) => {
                record.precision_sample = Some(pr.precision);
                record.recall_sample = Some(pr.recall);
            }
            Err(e) => errors.push(format!("conformance: {e}")),
        },
        Err(e) => errors.push(format!("discovery: {e}")),
    }
    if !errors.is_empty() {
        record.error = Some(errors.join("; "));
    }
    record
}

fn run_cells(sources: &[Source], config: &ExperimentConfig, execution: Execution) -> Vec<ExperimentRecord> {
    let mut cells = Vec::new();
    for source in 0..sources.len() {
        for ratio_index in 0..config.ratios.len() {
            for repetition in 0..config.samples_per_ratio {
                cells.push(Cell { source, ratio_index, repetition });
            }
        }
    }
    let mut records = par::map(&cells, execution, |c| run_cell(&sources[c.source], c, config));
    canonicalize(&mut records);
    records
}

/// The generated tree and simulated log for one (model, log) pair.
pub fn invitro_source(config: &ExperimentConfig, model_id: u64, log_id: u64) -> Result<(ProcessTree, EventLog), HarnessError> {
    let params = GeneratorParams {
        seed: seed::model_seed(config.master_seed, model_id),
        ..config.generator.clone()
    };
    let tree = generate(&params).map_err(|source| HarnessError::Generator { model: model_id, source })?;
    let log = simulate(&tree, &config.simulation_params(), seed::log_seed(config.master_seed, model_id, log_id));
    Ok((tree, log))
}

/// Controlled experiment: generate `models` trees, simulate
/// `logs_per_model` logs of each, and sample every log `samples_per_ratio`
/// times at every ratio. Each record carries the quality of the model
/// discovered from the sample and of the true tree against the full log.
pub fn run_invitro(config: &ExperimentConfig, execution: Execution) -> Result<Vec<ExperimentRecord>, HarnessError> {
    config.validate()?;
    let pairs: Vec<(u64, u64)> = (0..config.models as u64)
        .flat_map(|m| (0..config.logs_per_model as u64).map(move |l| (m, l)))
        .collect();
    let sources = par::map(&pairs, execution, |&(model_id, log_id)| {
        let (tree, log) = invitro_source(config, model_id, log_id)?;
        let mut source = Source::new(model_id, log_id, log);
        match precision_recall_tree(&source.log, &tree) {
            Ok(t) => source.truth = Some(t),
            Err(e) => source.truth_error = Some(format!("true model: {e}")),
        }
        Ok(source)
    })
    .into_iter()
    .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(run_cells(&sources, config, execution))
}

/// Field experiment on recorded logs. Records use `model_id = 0` and the
/// position of the log in `logs` as `log_id`; no true model exists.
pub fn run_invivo_logs(logs: Vec<EventLog>, config: &ExperimentConfig, execution: Execution) -> Result<Vec<ExperimentRecord>, HarnessError> {
    config.validate()?;
    if logs.is_empty() {
        return Err(HarnessError::NoLogs);
    }
    let sources: Vec<Source> = logs
        .into_iter()
        .enumerate()
        .map(|(i, log)| Source::new(0, i as u64, log))
        .collect();
    Ok(run_cells(&sources, config, execution))
}

pub fn run_invivo<P: AsRef<Path>>(paths: &[P], config: &ExperimentConfig, execution: Execution) -> Result<Vec<ExperimentRecord>, HarnessError> {
    if paths.is_empty() {
        return Err(HarnessError::NoLogs);
    }
    let logs = paths
        .iter()
        .map(|p| read_log(p.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    run_invivo_logs(logs, config, execution)
}
