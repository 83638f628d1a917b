//! Exact-matching entropy-based precision and recall.
//!
//! Both measures compare languages: the log contributes the set of its
//! distinct traces, the model its full trace language. With `ent` the
//! short-circuit topological entropy,
//! `precision = ent(log ∩ model) / ent(model)` and
//! `recall = ent(log ∩ model) / ent(log)`.

pub mod automaton;
pub mod entropy;

pub use automaton::{Automaton, Nfa};
pub use entropy::{short_circuit_entropy, EntropyError};

use thiserror::Error;

use crate::eventlog::EventLog;
use crate::par;
use crate::processtree::ProcessTree;

#[derive(Debug, Error, PartialEq)]
pub enum ConformanceError {
    #[error("cannot build the language of an empty log")]
    EmptyLog,
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformanceResult {
    pub precision: f64,
    pub recall: f64,
    pub ent_log: f64,
    pub ent_model: f64,
    pub ent_intersection: f64,
}

impl ConformanceResult {
    pub const CSV_HEADER: &'static str = "precision,recall,ent_log,ent_model,ent_intersection";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.precision, self.recall, self.ent_log, self.ent_model, self.ent_intersection
        )
    }
}

/// Minimal acceptor of the distinct traces of a non-empty log.
pub fn log_automaton(log: &EventLog) -> Result<Automaton, ConformanceError> {
    if log.is_empty() {
        return Err(ConformanceError::EmptyLog);
    }
    Ok(Automaton::from_log(log))
}

pub fn precision_recall(log: &EventLog, model: &Automaton) -> Result<ConformanceResult, ConformanceError> {
    let log_lang = log_automaton(log)?;
    if !model.is_trimmed() {
        return Err(EntropyError::NotTrimmed.into());
    }
    // Minimal acceptors are canonical, so equal languages get bitwise equal entropies.
    let both = log_lang.intersect(model).minimize();
    let ((ent_log, ent_model), ent_intersection) = par::join(
        || par::join(|| short_circuit_entropy(&log_lang), || short_circuit_entropy(model)),
        || short_circuit_entropy(&both),
    );
    let (ent_log, ent_model, ent_intersection) = (ent_log?, ent_model?, ent_intersection?);
    // Zero entropy means a language of at most one word; compare languages directly.
    let ratio = |denominator: f64, operand: &Automaton| {
        if denominator > 0.0 {
            (ent_intersection / denominator).clamp(0.0, 1.0)
        } else if both.language_eq(operand) {
            1.0
        } else {
            0.0
        }
    };
    Ok(ConformanceResult {
        precision: ratio(ent_model, model),
        recall: ratio(ent_log, &log_lang),
        ent_log,
        ent_model,
        ent_intersection,
    })
}

pub fn precision_recall_tree(log: &EventLog, model: &ProcessTree) -> Result<ConformanceResult, ConformanceError> {
    precision_recall(log, &model.to_automaton())
}
