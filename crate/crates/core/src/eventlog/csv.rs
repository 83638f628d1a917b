//! `case,activity[,timestamp]` CSV logs.

use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{EventLog, Interner, LogError, Trace};

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            case_column: "case".into(),
            activity_column: "activity".into(),
            timestamp_column: None,
        }
    }
}

/// Reads a CSV event log. Events keep file order within a case unless a
/// timestamp column is configured, in which case they are stably sorted by it.
pub fn parse_csv<R: Read>(source: R, options: &CsvOptions) -> Result<EventLog, LogError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| LogError::MissingColumn(name.to_string()))
    };
    let case_idx = column(&options.case_column)?;
    let act_idx = column(&options.activity_column)?;
    let ts_idx = options.timestamp_column.as_deref().map(column).transpose()?;

    let mut interner = Interner::default();
    let mut case_order: Vec<String> = Vec::new();
    let mut cases: HashMap<String, Vec<(i64, super::Activity)>> = HashMap::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        rows += 1;
        let case = record.get(case_idx).unwrap_or_default();
        let label = record.get(act_idx).unwrap_or_default();
        let activity = interner.intern(label).ok_or(LogError::EmptyLabel)?;
        let key = match ts_idx {
            Some(i) => parse_timestamp(record.get(i).unwrap_or_default())?,
            None => 0,
        };
        let events = cases.entry(case.to_string()).or_insert_with(|| {
            case_order.push(case.to_string());
            Vec::new()
        });
        events.push((key, activity));
    }
    if rows == 0 {
        return Err(LogError::Empty);
    }
    let mut log = EventLog::new();
    for case in case_order {
        let mut events = cases.remove(&case).unwrap_or_default();
        // `sort_by_key` is stable: equal timestamps keep file order.
        events.sort_by_key(|(k, _)| *k);
        log.add(Trace::new(events.into_iter().map(|(_, a)| a).collect()), 1);
    }
    Ok(log)
}

/// Nanoseconds since the epoch for an ISO-8601 timestamp.
fn parse_timestamp(raw: &str) -> Result<i64, LogError> {
    let raw = raw.trim();
    let err = || LogError::Timestamp(raw.to_string());
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return dt.timestamp_nanos_opt().ok_or_else(err);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return dt.and_utc().timestamp_nanos_opt().ok_or_else(err);
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return d
            .and_hms_opt(0, 0, 0)
            .and_then(|dt| dt.and_utc().timestamp_nanos_opt())
            .ok_or_else(err);
    }
    Err(err())
}

/// Writes `log` as `case,activity` rows, one case per trace instance, named
/// `c1`, `c2`, ... in lexicographic trace order. Empty traces produce no rows.
pub fn write_csv<W: Write>(log: &EventLog, mut out: W) -> std::io::Result<()> {
    out.write_all(b"case,activity\n")?;
    let mut case = 0u64;
    for (trace, m) in log.entries() {
        for _ in 0..m {
            case += 1;
            for activity in trace.events() {
                writeln!(out, "c{case},{}", quote(activity.as_str()))?;
            }
        }
    }
    out.flush()
}

fn quote(field: &str) -> std::borrow::Cow<'_, str> {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\"")).into()
    } else {
        field.into()
    }
}
