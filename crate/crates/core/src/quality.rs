//! Sample quality: directly-follows coverage and four frequency error
//! measures (NMAE, NRMSE, sMAPE, sRMSPE) against ratio-scaled expectations.

use thiserror::Error;

use crate::eventlog::{directly_follows, Activity, DirectlyFollowsProfile};
use crate::sampling::SampleLog;

#[derive(Debug, Error, PartialEq)]
pub enum QualityError {
    #[error("degenerate expectation: ratio must be in (0, 1], got {0}")]
    DegenerateExpectation(f64),
    #[error("no behavior to compare: parent log has no directly-follows pairs")]
    NoBehavior,
    #[error("not a sample: pair ({0}, {1}) does not occur in the parent log")]
    NotASample(Activity, Activity),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub coverage: f64,
    pub nmae: f64,
    pub nrmse: f64,
    pub smape: f64,
    pub srmspe: f64,
    /// Number of unique directly-follows pairs in the parent log.
    pub n: usize,
    pub ratio: f64,
}

pub type Pair = (Activity, Activity);

/// `ratio * count` for every parent pair, in lexicographic pair order.
pub fn expected_behavior(
    parent: &DirectlyFollowsProfile,
    ratio: f64,
) -> Result<Vec<(Pair, f64)>, QualityError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(QualityError::DegenerateExpectation(ratio));
    }
    // BTreeMap iteration is already the canonical order.
    Ok(parent
        .pairs
        .iter()
        .map(|(pair, &c)| (pair.clone(), ratio * c as f64))
        .collect())
}

/// The sample's count for each parent pair, aligned with `expected_behavior`.
pub fn sampled_behavior(
    parent: &DirectlyFollowsProfile,
    sample: &DirectlyFollowsProfile,
) -> Result<Vec<u64>, QualityError> {
    if let Some(((a, b), _)) = sample.pairs.iter().find(|(p, _)| !parent.pairs.contains_key(*p)) {
        return Err(QualityError::NotASample(a.clone(), b.clone()));
    }
    Ok(parent
        .pairs
        .keys()
        .map(|p| sample.pairs.get(p).copied().unwrap_or(0))
        .collect())
}

pub fn measure(parent: &DirectlyFollowsProfile, sample: &SampleLog) -> Result<QualityReport, QualityError> {
    measure_profiles(parent, &directly_follows(&sample.log), sample.ratio)
}

pub fn measure_profiles(
    parent: &DirectlyFollowsProfile,
    sample: &DirectlyFollowsProfile,
    ratio: f64,
) -> Result<QualityReport, QualityError> {
    let expected = expected_behavior(parent, ratio)?;
    if expected.is_empty() {
        return Err(QualityError::NoBehavior);
    }
    let sampled = sampled_behavior(parent, sample)?;
    let e: Vec<f64> = expected.iter().map(|(_, e)| *e).collect();
    let s: Vec<f64> = sampled.iter().map(|&s| s as f64).collect();
    Ok(measure_vectors(&e, &s, ratio))
}

/// Evaluates the measures on aligned expected/sampled vectors. All `e_i` must
/// be positive.
pub fn measure_vectors(e: &[f64], s: &[f64], ratio: f64) -> QualityReport {
    assert_eq!(e.len(), s.len());
    let n = e.len();
    let nf = n as f64;
    let sum_e: f64 = e.iter().sum();
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut sym = 0.0;
    let mut sym_sq = 0.0;
    let mut covered = 0usize;
    for (&ei, &si) in e.iter().zip(s) {
        if si >= 1.0 {
            covered += 1;
        }
        let d = si - ei;
        abs += d.abs();
        sq += d * d;
        let term = (ei - si).abs() / (ei + si);
        sym += term;
        sym_sq += term * term;
    }
    QualityReport {
        coverage: covered as f64 / nf,
        nmae: abs / sum_e,
        nrmse: (sq / nf).sqrt() / (sum_e / nf),
        smape: sym / nf,
        srmspe: (sym_sq / nf).sqrt(),
        n,
        ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::{EventLog, Trace};
    use crate::sampling::{stratified, Technique};

    fn t(s: &str) -> Trace {
        s.split_whitespace().collect()
    }

    fn parent() -> DirectlyFollowsProfile {
        // (a,b):4, (b,c):2
        let log: EventLog = [(t("a b c"), 2), (t("a b"), 2)].into_iter().collect();
        directly_follows(&log)
    }

    #[test]
    fn expected_scales() {
        let e = expected_behavior(&parent(), 0.5).unwrap();
        assert_eq!(e.iter().map(|(_, v)| *v).collect::<Vec<_>>(), vec![2.0, 1.0]);
        let e = expected_behavior(&parent(), 1.0).unwrap();
        assert_eq!(e.iter().map(|(_, v)| *v).collect::<Vec<_>>(), vec![4.0, 2.0]);
        assert!(expected_behavior(&DirectlyFollowsProfile::default(), 0.3).unwrap().is_empty());
    }

    #[test]
    fn zero_ratio_rejected() {
        assert_eq!(
            expected_behavior(&parent(), 0.0),
            Err(QualityError::DegenerateExpectation(0.0))
        );
    }

    #[test]
    fn hand_computed_vector() {
        let sample: EventLog = [(t("a b c"), 1)].into_iter().collect();
        let r = measure_profiles(&parent(), &directly_follows(&sample), 0.5).unwrap();
        assert_eq!(r.coverage, 1.0);
        assert!((r.nmae - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.nrmse - 0.5f64.sqrt() / 1.5).abs() < 1e-12);
        assert!((r.smape - 1.0 / 6.0).abs() < 1e-12);
        assert!((r.srmspe - (1.0 / 3.0) / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_sample_is_perfect() {
        let log: EventLog = [(t("a b c"), 2), (t("a b"), 2)].into_iter().collect();
        let s = stratified(&log, 1.0, 0);
        let r = measure(&directly_follows(&log), &s).unwrap();
        assert_eq!((r.coverage, r.nmae, r.nrmse, r.smape, r.srmspe), (1.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn empty_sample_uniform_parent() {
        let log: EventLog = [(t("a b"), 3), (t("c d"), 3)].into_iter().collect();
        let r = measure_profiles(&directly_follows(&log), &DirectlyFollowsProfile::default(), 0.5).unwrap();
        assert_eq!(r.coverage, 0.0);
        assert!((r.nmae - 1.0).abs() < 1e-15);
        assert!((r.nrmse - 1.0).abs() < 1e-15);
        assert_eq!(r.smape, 1.0);
        assert_eq!(r.srmspe, 1.0);
    }

    #[test]
    fn no_pairs() {
        let log: EventLog = [(t("a"), 3)].into_iter().collect();
        let sample = SampleLog {
            log: log.clone(),
            source_total: 3,
            ratio: 1.0,
            technique: Technique::Simple,
            seed: 0,
        };
        assert_eq!(measure(&directly_follows(&log), &sample), Err(QualityError::NoBehavior));
    }

    #[test]
    fn foreign_pair() {
        let foreign: EventLog = [(t("b a"), 1)].into_iter().collect();
        assert!(matches!(
            measure_profiles(&parent(), &directly_follows(&foreign), 0.5),
            Err(QualityError::NotASample(..))
        ));
    }
}
