//! Experiment records and their CSV representation.

use std::io::{Read, Write};

use crate::quality::QualityReport;
use crate::sampling::Technique;

use super::HarnessError;

pub const RECORD_COLUMNS: [&str; 16] = [
    "model_id",
    "log_id",
    "ratio",
    "repetition",
    "technique",
    "seed",
    "coverage",
    "nmae",
    "nrmse",
    "smape",
    "srmspe",
    "precision_sample",
    "recall_sample",
    "precision_true",
    "recall_true",
    "error",
];

/// Quality columns of a record, in the report's measure order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityValues {
    pub coverage: f64,
    pub nmae: f64,
    pub nrmse: f64,
    pub smape: f64,
    pub srmspe: f64,
}

impl From<&QualityReport> for QualityValues {
    fn from(r: &QualityReport) -> Self {
        QualityValues {
            coverage: r.coverage,
            nmae: r.nmae,
            nrmse: r.nrmse,
            smape: r.smape,
            srmspe: r.srmspe,
        }
    }
}

/// One (model, log, ratio, repetition) cell of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub model_id: u64,
    pub log_id: u64,
    pub ratio: f64,
    pub ratio_index: usize,
    pub repetition: usize,
    pub technique: Technique,
    pub seed: u64,
    pub quality: Option<QualityValues>,
    pub precision_sample: Option<f64>,
    pub recall_sample: Option<f64>,
    pub precision_true: Option<f64>,
    pub recall_true: Option<f64>,
    pub error: Option<String>,
}

impl ExperimentRecord {
    pub fn is_complete(&self) -> bool {
        self.error.is_none() && self.quality.is_some() && self.precision_sample.is_some()
    }

    fn sort_key(&self) -> (u64, u64, usize, usize) {
        (self.model_id, self.log_id, self.ratio_index, self.repetition)
    }
}

/// Orders records by (model, log, ratio, repetition).
pub fn canonicalize(records: &mut [ExperimentRecord]) {
    records.sort_by_key(ExperimentRecord::sort_key);
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_records<W: Write>(records: &[ExperimentRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", RECORD_COLUMNS.join(","))?;
    for r in records {
        let q = r.quality.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model_id,
            r.log_id,
            r.ratio,
            r.repetition,
            r.technique,
            r.seed,
            opt(q.map(|q| q.coverage)),
            opt(q.map(|q| q.nmae)),
            opt(q.map(|q| q.nrmse)),
            opt(q.map(|q| q.smape)),
            opt(q.map(|q| q.srmspe)),
            opt(r.precision_sample),
            opt(r.recall_sample),
            opt(r.precision_true),
            opt(r.recall_true),
            escape(r.error.as_deref().unwrap_or_default()),
        )?;
    }
    out.flush()
}

/// Reads a records file. Ratio indices are recovered from the order of
/// distinct ratios within the file.
pub fn read_records<R: Read>(source: R) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != RECORD_COLUMNS {
        return Err(HarnessError::Records("unexpected header".into()));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let bad = |col: &str| HarnessError::Records(format!("row {}: bad `{col}`", i + 2));
        let field = |k: usize| row.get(k).unwrap_or_default();
        let num = |k: usize| -> Result<Option<f64>, HarnessError> {
            match field(k) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(RECORD_COLUMNS[k])),
            }
        };
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| bad(RECORD_COLUMNS[k]));
        let quality = match (num(6)?, num(7)?, num(8)?, num(9)?, num(10)?) {
            (Some(coverage), Some(nmae), Some(nrmse), Some(smape), Some(srmspe)) => Some(QualityValues {
                coverage,
                nmae,
                nrmse,
                smape,
                srmspe,
            }),
            _ => None,
        };
        out.push(ExperimentRecord {
            model_id: int(0)?,
            log_id: int(1)?,
            ratio: num(2)?.ok_or_else(|| bad("ratio"))?,
            ratio_index: 0,
            repetition: int(3)? as usize,
            technique: field(4).parse().map_err(|_| bad("technique"))?,
            seed: int(5)?,
            quality,
            precision_sample: num(11)?,
            recall_sample: num(12)?,
            precision_true: num(13)?,
            recall_true: num(14)?,
            error: Some(field(15)).filter(|e| !e.is_empty()).map(str::to_string),
        });
    }
    let mut ratios: Vec<f64> = out.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();
    for r in &mut out {
        r.ratio_index = ratios.iter().position(|x| *x == r.ratio).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(error: Option<&str>) -> ExperimentRecord {
        ExperimentRecord {
            model_id: 1,
            log_id: 0,
            ratio: 0.05,
            ratio_index: 0,
            repetition: 3,
            technique: Technique::Stratified,
            seed: 12345678901234567890,
            quality: error.is_none().then_some(QualityValues {
                coverage: 0.75,
                nmae: 0.1,
                nrmse: 0.2,
                smape: 0.3,
                srmspe: 0.4,
            }),
            precision_sample: error.is_none().then_some(0.9),
            recall_sample: error.is_none().then_some(1.0),
            precision_true: Some(0.8),
            recall_true: Some(1.0),
            error: error.map(str::to_string),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_records(&[record(None), record(Some("empty log, no model"))], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RECORD_COLUMNS.join(","));
        assert_eq!(
            lines[1],
            "1,0,0.05,3,stratified,12345678901234567890,0.75,0.1,0.2,0.3,0.4,0.9,1,0.8,1,"
        );
        assert_eq!(
            lines[2],
            "1,0,0.05,3,stratified,12345678901234567890,,,,,,,,0.8,1,\"empty log, no model\""
        );
    }

    #[test]
    fn roundtrip() {
        let records = vec![record(None), record(Some("boom \"x\""))];
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        assert_eq!(read_records(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn canonical_order() {
        let mut a = record(None);
        a.model_id = 2;
        let b = record(None);
        let mut c = record(None);
        c.repetition = 0;
        let mut rs = vec![a.clone(), b.clone(), c.clone()];
        canonicalize(&mut rs);
        assert_eq!(rs, vec![c, b, a]);
    }
}
