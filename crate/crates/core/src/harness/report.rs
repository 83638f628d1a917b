//! Rank-correlation reports over experiment records.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::discovery::MINER_VARIANT;
use crate::stats::{spearman, CorrelationResult, StatsError};

use super::records::ExperimentRecord;
use super::HarnessError;

/// Correlations with `p` below this are flagged as significant.
pub const SIGNIFICANCE: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grouping {
    PerModel,
    PerLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum QualityMeasure {
    Coverage,
    Smape,
    Srmspe,
    Nrmse,
    Nmae,
}

impl QualityMeasure {
    pub const ALL: [QualityMeasure; 5] = [
        QualityMeasure::Coverage,
        QualityMeasure::Smape,
        QualityMeasure::Srmspe,
        QualityMeasure::Nrmse,
        QualityMeasure::Nmae,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QualityMeasure::Coverage => "coverage",
            QualityMeasure::Smape => "smape",
            QualityMeasure::Srmspe => "srmspe",
            QualityMeasure::Nrmse => "nrmse",
            QualityMeasure::Nmae => "nmae",
        }
    }

    /// True for the four measures where lower is better.
    pub fn is_error(self) -> bool {
        self != QualityMeasure::Coverage
    }

    fn value(self, r: &ExperimentRecord) -> f64 {
        let q = r.quality.as_ref().expect("complete record");
        match self {
            QualityMeasure::Coverage => q.coverage,
            QualityMeasure::Smape => q.smape,
            QualityMeasure::Srmspe => q.srmspe,
            QualityMeasure::Nrmse => q.nrmse,
            QualityMeasure::Nmae => q.nmae,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConformanceMeasure {
    Precision,
    Recall,
}

impl ConformanceMeasure {
    pub const ALL: [ConformanceMeasure; 2] = [ConformanceMeasure::Precision, ConformanceMeasure::Recall];

    pub fn name(self) -> &'static str {
        match self {
            ConformanceMeasure::Precision => "precision",
            ConformanceMeasure::Recall => "recall",
        }
    }

    fn value(self, r: &ExperimentRecord) -> f64 {
        match self {
            ConformanceMeasure::Precision => r.precision_sample.expect("complete record"),
            ConformanceMeasure::Recall => r.recall_sample.expect("complete record"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CorrelationCell {
    Value(CorrelationResult),
    /// The coefficient is undefined, e.g. because one column is constant.
    NotApplicable(String),
}

impl CorrelationCell {
    fn of(x: &[f64], y: &[f64]) -> Self {
        match spearman(x, y) {
            Ok(r) => CorrelationCell::Value(r),
            Err(StatsError::ConstantInput) => CorrelationCell::NotApplicable("constant input".into()),
            Err(e) => CorrelationCell::NotApplicable(e.to_string()),
        }
    }

    pub fn result(&self) -> Option<&CorrelationResult> {
        match self {
            CorrelationCell::Value(r) => Some(r),
            CorrelationCell::NotApplicable(_) => None,
        }
    }

    pub fn is_significant(&self) -> bool {
        self.result().is_some_and(|r| r.p_value < SIGNIFICANCE)
    }
}

impl fmt::Display for CorrelationCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationCell::Value(r) => {
                let mark = if r.p_value < SIGNIFICANCE { "*" } else { "" };
                write!(f, "{:.3}{mark}", r.rho)
            }
            CorrelationCell::NotApplicable(_) => f.write_str("n/a"),
        }
    }
}

/// How close models discovered from the largest samples come to the true
/// model quality.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Summary {
    pub ratio: f64,
    pub precision_sample: f64,
    pub recall_sample: f64,
    pub precision_true: Option<f64>,
    pub recall_true: Option<f64>,
}

impl P1Summary {
    pub fn precision_gap(&self) -> Option<f64> {
        self.precision_true.map(|t| (self.precision_sample - t).abs())
    }

    pub fn recall_gap(&self) -> Option<f64> {
        self.recall_true.map(|t| (self.recall_sample - t).abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupReport {
    pub model_id: u64,
    /// `None` for per-model groups.
    pub log_id: Option<u64>,
    /// Records that entered the correlations.
    pub n: usize,
    /// Records with an error marker or missing measurements.
    pub failed: usize,
    pub precision_true: Option<f64>,
    pub recall_true: Option<f64>,
    /// Quality measure vs conformance measure, indexed like
    /// `QualityMeasure::ALL` x `ConformanceMeasure::ALL`.
    pub cells: [[CorrelationCell; 2]; 5],
    /// Sampling ratio vs each quality measure, then vs precision and recall.
    pub ratio_cells: Vec<(&'static str, CorrelationCell)>,
    pub p1: P1Summary,
}

impl GroupReport {
    pub fn label(&self) -> String {
        group_label(self.model_id, self.log_id)
    }

    pub fn cell(&self, m: QualityMeasure, c: ConformanceMeasure) -> &CorrelationCell {
        let i = QualityMeasure::ALL.iter().position(|x| *x == m).unwrap();
        let j = ConformanceMeasure::ALL.iter().position(|x| *x == c).unwrap();
        &self.cells[i][j]
    }

    pub fn ratio_cell(&self, measure: &str) -> Option<&CorrelationCell> {
        self.ratio_cells.iter().find(|(m, _)| *m == measure).map(|(_, c)| c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    pub grouping: Grouping,
    pub groups: Vec<GroupReport>,
}

fn group_label(model_id: u64, log_id: Option<u64>) -> String {
    match log_id {
        None => format!("model {model_id}"),
        Some(l) => format!("model {model_id} log {l}"),
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn group_report(model_id: u64, log_id: Option<u64>, records: &[&ExperimentRecord]) -> Result<GroupReport, HarnessError> {
    let usable: Vec<&ExperimentRecord> = records.iter().copied().filter(|r| r.is_complete()).collect();
    let label = group_label(model_id, log_id);
    if usable.len() < 3 {
        return Err(HarnessError::InsufficientRecords { group: label, count: usable.len() });
    }
    let column = |f: &dyn Fn(&ExperimentRecord) -> f64| usable.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let ratios = column(&|r| r.ratio);
    let quality: Vec<Vec<f64>> = QualityMeasure::ALL.iter().map(|m| column(&|r| m.value(r))).collect();
    let conformance: Vec<Vec<f64>> = ConformanceMeasure::ALL.iter().map(|c| column(&|r| c.value(r))).collect();

    let cells: [[CorrelationCell; 2]; 5] = std::array::from_fn(|i| {
        std::array::from_fn(|j| CorrelationCell::of(&quality[i], &conformance[j]))
    });
    let mut ratio_cells: Vec<(&'static str, CorrelationCell)> = QualityMeasure::ALL
        .iter()
        .zip(&quality)
        .map(|(m, v)| (m.name(), CorrelationCell::of(&ratios, v)))
        .collect();
    ratio_cells.extend(
        ConformanceMeasure::ALL
            .iter()
            .zip(&conformance)
            .map(|(c, v)| (c.name(), CorrelationCell::of(&ratios, v))),
    );

    let precision_true = mean(records.iter().filter_map(|r| r.precision_true));
    let recall_true = mean(records.iter().filter_map(|r| r.recall_true));
    let top = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let at_top = || usable.iter().filter(|r| r.ratio == top);
    let p1 = P1Summary {
        ratio: top,
        precision_sample: mean(at_top().map(|r| r.precision_sample.unwrap())).unwrap(),
        recall_sample: mean(at_top().map(|r| r.recall_sample.unwrap())).unwrap(),
        precision_true,
        recall_true,
    };
    Ok(GroupReport {
        model_id,
        log_id,
        n: usable.len(),
        failed: records.len() - usable.len(),
        precision_true,
        recall_true,
        cells,
        ratio_cells,
        p1,
    })
}

/// Spearman correlations of every quality measure against precision and
/// recall of the discovered models, per model or per log. Records with an
/// error marker are counted but left out of the correlations; each group
/// needs at least three usable records.
pub fn correlate(records: &[ExperimentRecord], grouping: Grouping) -> Result<CorrelationTable, HarnessError> {
    let mut groups: BTreeMap<(u64, Option<u64>), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        let log = (grouping == Grouping::PerLog).then_some(r.log_id);
        groups.entry((r.model_id, log)).or_default().push(r);
    }
    if groups.is_empty() {
        return Err(HarnessError::InsufficientRecords { group: "all".into(), count: 0 });
    }
    let groups = groups
        .into_iter()
        .map(|((m, l), rs)| group_report(m, l, &rs))
        .collect::<Result<_, _>>()?;
    Ok(CorrelationTable { grouping, groups })
}

fn opt3(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.3}"))
}

impl CorrelationTable {
    /// Fixed-width text table: one row per group, the true model quality,
    /// then every quality measure against precision and against recall.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let label_width = self.groups.iter().map(|g| g.label().len()).max().unwrap_or(5).max(5);
        let mut header = format!("{:<label_width$} {:>5} {:>6} | {:>7} {:>7} |", "group", "n", "failed", "T.prec", "T.rec");
        for c in ConformanceMeasure::ALL {
            for m in QualityMeasure::ALL {
                let _ = write!(header, " {:>8}", format!("{}.{}", &c.name()[..4], m.name()));
            }
            header.push_str(" |");
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{}", "-".repeat(header.len()));
        for g in &self.groups {
            let _ = write!(
                out,
                "{:<label_width$} {:>5} {:>6} | {:>7} {:>7} |",
                g.label(),
                g.n,
                g.failed,
                opt3(g.precision_true),
                opt3(g.recall_true)
            );
            for c in ConformanceMeasure::ALL {
                for m in QualityMeasure::ALL {
                    let _ = write!(out, " {:>8}", g.cell(m, c).to_string());
                }
                out.push_str(" |");
            }
            out.push('\n');
        }

        let _ = writeln!(out, "\nsampling ratio vs measure");
        for g in &self.groups {
            let _ = write!(out, "{:<label_width$}", g.label());
            for (m, cell) in &g.ratio_cells {
                let _ = write!(out, " {m}={cell}");
            }
            out.push('\n');
        }

        let _ = writeln!(out, "\nmodels from the largest samples vs the true model");
        for g in &self.groups {
            let p = &g.p1;
            let _ = writeln!(
                out,
                "{:<label_width$} ratio={} S.prec={:.3} S.rec={:.3} T.prec={} T.rec={} gap.prec={} gap.rec={}",
                g.label(),
                p.ratio,
                p.precision_sample,
                p.recall_sample,
                opt3(p.precision_true),
                opt3(p.recall_true),
                opt3(p.precision_gap()),
                opt3(p.recall_gap()),
            );
        }

        let _ = writeln!(out);
        let _ = writeln!(out, "* p < {SIGNIFICANCE}; two-sided p from the t-approximation with n-2 degrees of freedom.");
        let _ = writeln!(out, "n/a: coefficient undefined, usually because a column is constant.");
        let _ = writeln!(out, "Models discovered with {MINER_VARIANT}.");
        let _ = writeln!(
            out,
            "Precision and recall are exact-matching entropy ratios over distinct traces; trace multiplicities are ignored."
        );
        let _ = writeln!(
            out,
            "Entropy: log2 of the spectral radius after adding one transition from every final state back to the initial state."
        );
        out
    }

    /// Long-format rows `group,x_measure,y_measure,ratio,repetition,x,y`
    /// for every plotted pair of every usable record.
    pub fn plot_csv(&self, records: &[ExperimentRecord]) -> String {
        let mut out = String::from("group,x_measure,y_measure,ratio,repetition,x,y\n");
        for g in &self.groups {
            let label = g.label();
            let members = records.iter().filter(|r| {
                r.is_complete() && r.model_id == g.model_id && g.log_id.is_none_or(|l| l == r.log_id)
            });
            for r in members {
                let mut row = |x: &str, y: &str, xv: f64, yv: f64| {
                    let _ = writeln!(out, "{label},{x},{y},{},{},{xv},{yv}", r.ratio, r.repetition);
                };
                for m in QualityMeasure::ALL {
                    for c in ConformanceMeasure::ALL {
                        row(m.name(), c.name(), m.value(r), c.value(r));
                    }
                }
                for m in QualityMeasure::ALL {
                    row("ratio", m.name(), r.ratio, m.value(r));
                }
                for c in ConformanceMeasure::ALL {
                    row("ratio", c.name(), r.ratio, c.value(r));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::records::QualityValues;
    use crate::sampling::Technique;

    fn record(model_id: u64, rep: usize, smape: f64, precision: f64) -> ExperimentRecord {
        ExperimentRecord {
            model_id,
            log_id: 0,
            ratio: 0.1 * (rep + 1) as f64,
            ratio_index: rep,
            repetition: 0,
            technique: Technique::Simple,
            seed: rep as u64,
            quality: Some(QualityValues {
                coverage: 0.5 + 0.01 * rep as f64,
                nmae: smape,
                nrmse: smape * 2.0,
                smape,
                srmspe: smape * 1.5,
            }),
            precision_sample: Some(precision),
            recall_sample: Some(1.0),
            precision_true: Some(0.9),
            recall_true: Some(1.0),
            error: None,
        }
    }

    #[test]
    fn perfect_negative_and_constant() {
        let rs: Vec<_> = (0..6).map(|i| record(0, i, 1.0 - 0.1 * i as f64, 0.5 + 0.05 * i as f64)).collect();
        let t = correlate(&rs, Grouping::PerModel).unwrap();
        let g = &t.groups[0];
        let r = g.cell(QualityMeasure::Smape, ConformanceMeasure::Precision).result().unwrap();
        assert_eq!(r.rho, -1.0);
        assert!(g.cell(QualityMeasure::Smape, ConformanceMeasure::Precision).is_significant());
        assert_eq!(
            g.cell(QualityMeasure::Smape, ConformanceMeasure::Recall),
            &CorrelationCell::NotApplicable("constant input".into())
        );
        assert_eq!(g.p1.ratio, 0.6000000000000001);
        assert!((g.p1.precision_gap().unwrap() - 0.15).abs() < 1e-12);
        let text = t.to_text();
        assert!(text.contains("-1.000*"));
        assert!(text.contains("n/a"));
        assert!(text.contains(MINER_VARIANT));
    }

    #[test]
    fn failed_records_are_counted() {
        let mut rs: Vec<_> = (0..4).map(|i| record(1, i, 0.1 * i as f64, 0.9 - 0.1 * i as f64)).collect();
        let mut bad = record(1, 9, 0.0, 0.0);
        bad.quality = None;
        bad.error = Some("quality: no behavior".into());
        rs.push(bad);
        let t = correlate(&rs, Grouping::PerLog).unwrap();
        assert_eq!((t.groups[0].n, t.groups[0].failed), (4, 1));
        assert_eq!(t.groups[0].label(), "model 1 log 0");
        let plot = t.plot_csv(&rs);
        // 4 records x (10 pairs + 7 ratio pairs) plus the header.
        assert_eq!(plot.lines().count(), 1 + 4 * 17);
    }

    #[test]
    fn too_few_records() {
        let rs: Vec<_> = (0..2).map(|i| record(0, i, 0.1, 0.1)).collect();
        assert!(matches!(
            correlate(&rs, Grouping::PerModel),
            Err(HarnessError::InsufficientRecords { count: 2, .. })
        ));
        assert!(correlate(&[], Grouping::PerModel).is_err());
    }
}
