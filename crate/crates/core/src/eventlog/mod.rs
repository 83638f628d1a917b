//! Event logs as multisets of traces, plus CSV/XES ingestion and
//! directly-follows profiling.

mod csv;
mod xes;

pub use self::csv::{parse_csv, write_csv, CsvOptions};
pub use self::xes::{parse_xes, write_xes, XesOptions};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("empty log")]
    Empty,
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("unparsable timestamp `{0}`")]
    Timestamp(String),
    #[error("empty activity label")]
    EmptyLabel,
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An activity label. Equality and ordering are by exact text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Activity(Arc<str>);

impl Activity {
    /// Returns `None` for an empty label.
    pub fn new(label: &str) -> Option<Self> {
        if label.is_empty() {
            None
        } else {
            Some(Activity(Arc::from(label)))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Activity {
    /// Panics on an empty label.
    fn from(label: &str) -> Self {
        Activity::new(label).expect("activity label must be non-empty")
    }
}

/// Deduplicates label storage so every occurrence of a label shares one allocation.
#[derive(Default, Debug)]
pub struct Interner {
    labels: HashSet<Arc<str>>,
}

impl Interner {
    pub fn intern(&mut self, label: &str) -> Option<Activity> {
        if label.is_empty() {
            return None;
        }
        if let Some(existing) = self.labels.get(label) {
            return Some(Activity(existing.clone()));
        }
        let arc: Arc<str> = Arc::from(label);
        self.labels.insert(arc.clone());
        Some(Activity(arc))
    }
}

/// A finite sequence of activities. Traces order lexicographically by label sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Trace(Vec<Activity>);

impl Trace {
    pub fn new(events: Vec<Activity>) -> Self {
        Trace(events)
    }

    pub fn events(&self) -> &[Activity] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "⟩")
    }
}

impl From<Vec<Activity>> for Trace {
    fn from(events: Vec<Activity>) -> Self {
        Trace(events)
    }
}

impl<'a> FromIterator<&'a str> for Trace {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Trace(iter.into_iter().map(Activity::from).collect())
    }
}

/// A multiset of traces.
///
/// Entries are kept in lexicographic trace order so every iteration over a
/// log is deterministic.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct EventLog {
    entries: BTreeMap<Trace, u64>,
    alphabet: BTreeSet<Activity>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` instances of `trace`. A zero count is ignored.
    pub fn add(&mut self, trace: Trace, count: u64) {
        if count == 0 {
            return;
        }
        self.alphabet.extend(trace.events().iter().cloned());
        *self.entries.entry(trace).or_insert(0) += count;
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = (&Trace, u64)> + '_ {
        self.entries.iter().map(|(t, &m)| (t, m))
    }

    pub fn multiplicity(&self, trace: &Trace) -> u64 {
        self.entries.get(trace).copied().unwrap_or(0)
    }

    pub fn alphabet(&self) -> &BTreeSet<Activity> {
        &self.alphabet
    }

    pub fn unique_traces(&self) -> usize {
        self.entries.len()
    }

    pub fn total_traces(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn total_events(&self) -> u64 {
        self.entries.iter().map(|(t, &m)| m * t.len() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every trace of `self` occurs in `other` at least as often.
    pub fn is_sub_multiset_of(&self, other: &EventLog) -> bool {
        self.entries.iter().all(|(t, &m)| m <= other.multiplicity(t))
    }
}

impl fmt::Debug for EventLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl FromIterator<(Trace, u64)> for EventLog {
    fn from_iter<I: IntoIterator<Item = (Trace, u64)>>(iter: I) -> Self {
        let mut log = EventLog::new();
        for (t, m) in iter {
            log.add(t, m);
        }
        log
    }
}

/// Multiplicity-weighted directly-follows counts with start and end tallies.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DirectlyFollowsProfile {
    pub pairs: BTreeMap<(Activity, Activity), u64>,
    pub start_counts: BTreeMap<Activity, u64>,
    pub end_counts: BTreeMap<Activity, u64>,
    pub alphabet: BTreeSet<Activity>,
}

impl DirectlyFollowsProfile {
    pub fn count(&self, a: &Activity, b: &Activity) -> u64 {
        self.pairs.get(&(a.clone(), b.clone())).copied().unwrap_or(0)
    }

    pub fn has_edge(&self, a: &Activity, b: &Activity) -> bool {
        self.count(a, b) > 0
    }
}

pub fn directly_follows(log: &EventLog) -> DirectlyFollowsProfile {
    let mut profile = DirectlyFollowsProfile {
        alphabet: log.alphabet().clone(),
        ..Default::default()
    };
    for (trace, m) in log.entries() {
        let events = trace.events();
        let (Some(first), Some(last)) = (events.first(), events.last()) else {
            continue;
        };
        *profile.start_counts.entry(first.clone()).or_insert(0) += m;
        *profile.end_counts.entry(last.clone()).or_insert(0) += m;
        for w in events.windows(2) {
            *profile.pairs.entry((w[0].clone(), w[1].clone())).or_insert(0) += m;
        }
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Trace {
        s.chars().map(|c| Activity::from(c.to_string().as_str())).collect::<Vec<_>>().into()
    }

    fn a(s: &str) -> Activity {
        Activity::from(s)
    }

    #[test]
    fn df_single_trace() {
        let log: EventLog = [(t("abc"), 1)].into_iter().collect();
        let df = directly_follows(&log);
        assert_eq!(df.pairs.len(), 2);
        assert_eq!(df.count(&a("a"), &a("b")), 1);
        assert_eq!(df.count(&a("b"), &a("c")), 1);
        assert_eq!(df.start_counts, BTreeMap::from([(a("a"), 1)]));
        assert_eq!(df.end_counts, BTreeMap::from([(a("c"), 1)]));
    }

    #[test]
    fn df_no_pairs() {
        let log: EventLog = [(t("a"), 3)].into_iter().collect();
        let df = directly_follows(&log);
        assert!(df.pairs.is_empty());
        assert_eq!(df.start_counts[&a("a")], 3);
        assert_eq!(df.end_counts[&a("a")], 3);
    }

    #[test]
    fn df_weighted() {
        let log: EventLog = [(t("ab"), 2), (t("ba"), 1)].into_iter().collect();
        let df = directly_follows(&log);
        assert_eq!(df.count(&a("a"), &a("b")), 2);
        assert_eq!(df.count(&a("b"), &a("a")), 1);
    }

    #[test]
    fn empty_trace_counts_in_totals_only() {
        let log: EventLog = [(Trace::default(), 2), (t("ab"), 1)].into_iter().collect();
        assert_eq!(log.total_traces(), 3);
        assert_eq!(log.total_events(), 2);
        let df = directly_follows(&log);
        assert_eq!(df.start_counts.values().sum::<u64>(), 1);
        assert_eq!(df.end_counts.values().sum::<u64>(), 1);
    }

    #[test]
    fn zero_multiplicity_is_ignored() {
        let mut log = EventLog::new();
        log.add(t("ab"), 0);
        assert!(log.is_empty());
        assert!(log.alphabet().is_empty());
    }

    #[test]
    fn empty_label_rejected() {
        assert!(Activity::new("").is_none());
        let mut interner = Interner::default();
        assert!(interner.intern("").is_none());
        let x = interner.intern("x").unwrap();
        let y = interner.intern("x").unwrap();
        assert!(Arc::ptr_eq(&x.0, &y.0));
    }
}
